#pragma once

#include "quiver/index_store.hpp"
#include "quiver/query_graph.hpp"

#include <memory>

namespace quiver {

struct ScanSelector {
    std::optional<uint64_t> fixed_id; // v.ID = c / r.eID = c
    std::vector<QueryAtom> atoms;     // same-var constant atoms
};

// One adjacency list access of an E/I or Multi-Extend node.
struct PlanAccessor {
    const IndexDescriptor* index = nullptr;
    int query_edge = -1;    // the query edge each entry binds
    bool from_edge = false; // edge-partitioned accessor
    int bound_vertex = -1;  // owner var (vertex accessors)
    int bound_edge = -1;    // bound edge var (edge accessors)
    Direction dir = Direction::FW;
    std::vector<PropertyValue> key_path;

    std::string describe(const QueryGraph& q) const;
};

enum class StepKind { ScanVertex, ScanEdge, Extend, MultiExtend, Filter };

struct PlanStep {
    StepKind kind = StepKind::ScanVertex;
    int var = -1; // scan subject (vertex var / edge var)
    ScanSelector selector;
    std::vector<PlanAccessor> accessors;
    int target = -1;                  // Extend
    std::vector<int> accessor_target; // MultiExtend: target var fed by accessor i
    std::vector<QueryAtom> filter_atoms;
    double icost = 0.0;
    double est_out = 0.0;

    std::vector<int> distinct_targets() const;
};

struct Plan {
    QueryGraph query;
    std::vector<PlanStep> steps;
    double total_icost = 0.0;

    std::string signature() const;
    size_t operator_count() const { return steps.size(); }
};

struct ExecStats {
    uint64_t matches = 0;
    // Entries read from adjacency lists by E/I and Multi-Extend (scans and
    // filters contribute nothing).
    uint64_t edges_scanned = 0;
};

// Pull-based plan execution, one match at a time.
class Executor {
public:
    Executor(const PropertyGraph& graph, const Plan& plan);
    ~Executor();

    bool next(MatchRow& out);
    const ExecStats& stats() const { return stats_; }

    // Runs the plan to completion.
    std::vector<MatchRow> all();

private:
    struct OpBase;
    struct ScanVertexOp;
    struct ScanEdgeOp;
    struct ExtendOp;
    struct MultiExtendOp;
    struct FilterOp;

    const PropertyGraph* graph_;
    const Plan* plan_;
    ExecStats stats_;
    std::vector<std::unique_ptr<OpBase>> ops_;
};

// Logical adjacency entries an accessor yields for one input match, in
// sort-key order. Exposed for tests.
void collect_accessor(const PropertyGraph& graph, const PlanAccessor& acc,
                      const MatchRow& row, std::vector<ListEntry>& out);

// Value of the accessor's leading sort property for one entry (the
// Multi-Extend join key).
PropertyValue accessor_sort_value(const PropertyGraph& graph, const PlanAccessor& acc,
                                  const MatchRow& row, const ListEntry& entry);

} // namespace quiver
