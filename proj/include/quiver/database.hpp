#pragma once

#include "quiver/optimizer.hpp"

#include <memory>
#include <shared_mutex>

namespace quiver {

struct MergeReport {
    uint64_t pages_merged = 0;
    uint64_t inserts_applied = 0;
    uint64_t tombstones_cleared = 0;
    bool full_rebuild = false;
};

// The engine facade: owns the graph, the two primary indexes, all secondary
// indexes and the index store, and coordinates maintenance. Reads are safe
// from multiple threads; mutations take the store-wide writer lock.
class Database {
public:
    Database();

    const PropertyGraph& graph() const { return graph_; }
    PropertyCatalog& catalog() { return graph_.catalog(); }
    const IndexStore& store() const { return store_; }

    uint32_t buffer_capacity = 32; // per-page update buffer entries
    double ep_cap_factor = 10.0;   // 2-hop view size guardrail (x |E|)
    uint32_t ep_build_threads = 0; // 0 = hardware concurrency

    // --- loading / DDL (exclusive) ---
    LoadReport load_csv(const std::string& vertex_file, const std::string& edge_file);
    void export_csv(const std::string& vertex_file, const std::string& edge_file) const;

    // Rebuilds both primary indexes under a new partitioning/sorting and
    // re-points every secondary; returns the reconfiguration time in seconds.
    double reconfigure_primary(std::vector<PartitioningCriterion> partitioning,
                               SortCriterion sorting);
    // Creates one index per direction (FW-BW creates "<name>-fw"/"<name>-bw");
    // returns the creation time in seconds.
    double create_vertex_view(const std::string& name, IndexConfig config);
    double create_edge_view(const std::string& name, IndexConfig config);
    void drop_index(const std::string& name);

    // --- maintenance (exclusive) ---
    VertexId add_vertex(uint32_t label, const PropertyList& props = {});
    EdgeId insert_edge(VertexId src, VertexId dst, uint32_t label,
                       const PropertyList& props = {});
    void delete_edge(EdgeId e);
    MergeReport flush_all();
    MergeReport flush_index(const std::string& name);
    // Flushes the page owning `owner` (a vertex id, or a bound edge id for
    // edge-partitioned indexes) in the named index, with cascades.
    MergeReport flush_page(const std::string& name, uint64_t owner);

    // --- queries (shared) ---
    Optimizer::Result plan_query(const QueryGraph& query) const;
    struct QueryResult {
        Plan plan;
        std::vector<MatchRow> rows;
        ExecStats stats;
    };
    QueryResult execute(const QueryGraph& query) const;
    QueryResult execute_plan(const Plan& plan) const;

    std::string stats_json(bool pretty = false) const;

    PrimaryIndex& primary(Direction dir) {
        return dir == Direction::FW ? *fw_ : *bw_;
    }
    const PrimaryIndex& primary(Direction dir) const {
        return dir == Direction::FW ? *fw_ : *bw_;
    }

private:
    friend struct MaintenanceOps;

    void rebuild_primaries();
    void register_primaries();
    void rebuild_secondary_objects();
    MergeReport flush_impl(bool all, const std::string& index_name, int64_t owner);
    void autoflush();

    mutable std::shared_mutex mutex_;
    PropertyGraph graph_;
    std::unique_ptr<PrimaryIndex> fw_;
    std::unique_ptr<PrimaryIndex> bw_;
    struct Secondary {
        std::string name;
        IndexConfig config;
        std::unique_ptr<VertexPartitionedIndex> vp;
        std::unique_ptr<EdgePartitionedIndex> ep;
    };
    std::vector<Secondary> secondaries_;
    IndexStore store_;
};

} // namespace quiver
