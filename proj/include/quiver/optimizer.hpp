#pragma once

#include "quiver/operators.hpp"

#include <map>

namespace quiver {

// Catalog statistics feeding the i-cost model: per index, list counts, total
// entries and per-first-level-partition entry counts.
class CostModel {
public:
    static CostModel build(const PropertyGraph& graph, const IndexStore& store);

    // Average qualifying list length of an index at a key path.
    double avg_list_length(const IndexDescriptor& desc,
                           std::span<const PropertyValue> key_path) const;
    // Estimated output of a scan step.
    double scan_estimate(const QueryGraph& q, const PlanStep& scan) const;

    const PropertyGraph* graph() const { return graph_; }

private:
    struct IndexStats {
        uint64_t owners = 0;
        uint64_t entries = 0;
        LevelLayout layout;
        std::vector<uint64_t> level1_counts;
    };

    const PropertyGraph* graph_ = nullptr;
    std::map<const IndexDescriptor*, IndexStats> stats_;
    std::vector<uint64_t> vertex_label_counts_;
};

// One enumerated way to start a plan.
struct SeedOption {
    PlanStep scan;                      // ScanVertex or ScanEdge
    std::vector<QueryAtom> filter;      // atoms checked right after the scan
    uint64_t mask = 0;                  // bound query vertices
    double est = 0;
};

// One enumerated way to grow a sub-query: an E/I or Multi-Extend step plus
// its residual filter.
struct ExtensionOption {
    PlanStep step;
    std::vector<QueryAtom> filter;
    uint64_t from_mask = 0;
    uint64_t to_mask = 0;
    double icost = 0;  // est(from) x total accessed list length
    double factor = 0; // canonical cardinality factor of this (targets, mask)
};

// Bottom-up DP join optimizer over vertex subsets. i-cost of a plan is the
// sum over its E/I and Multi-Extend steps of (estimated input cardinality x
// total estimated accessed list length); Scan and Filter contribute nothing.
class Optimizer {
public:
    Optimizer(const PropertyGraph& graph, const IndexStore& store, const CostModel& model);

    struct Result {
        Plan plan;
        // Canonical per-subquery cardinality estimates (plan-independent).
        std::map<uint64_t, double> estimates;
    };

    Result run(const QueryGraph& query) const;
    Plan optimize(const QueryGraph& query) const { return run(query).plan; }

    // Enumeration surface (used by the DP itself and by exhaustive test
    // oracles). `extensions` requires the canonical estimate of `mask`.
    std::vector<SeedOption> seeds(const QueryGraph& q) const;
    std::vector<ExtensionOption> extensions(const QueryGraph& q, uint64_t mask,
                                            double est_in) const;

    // Full DP is used up to this many query vertices; beyond it a greedy
    // bottom-up fallback picks the cheapest extension at each level.
    static constexpr int kFullDpLimit = 10;
    static constexpr double kIntersectionDamping = 0.1;
    static constexpr int kMaxCombos = 16;

private:
    struct AccessorChoice {
        PlanAccessor accessor;
        std::vector<size_t> consumed; // indices into query.atoms
        double est_len = 0;
    };

    std::vector<AccessorChoice> edge_candidates(const QueryGraph& q, uint64_t mask,
                                                int qedge, int target,
                                                const std::optional<SortKey>& sort) const;
    void ei_options(const QueryGraph& q, uint64_t mask, double est_in,
                    std::vector<ExtensionOption>& out) const;
    void me_options(const QueryGraph& q, uint64_t mask, double est_in,
                    std::vector<ExtensionOption>& out) const;

    const PropertyGraph* graph_;
    const IndexStore* store_;
    const CostModel* model_;
};

// JSON rendering of a plan (EXPLAIN).
std::string explain_plan(const Plan& plan, bool pretty = false);

} // namespace quiver
