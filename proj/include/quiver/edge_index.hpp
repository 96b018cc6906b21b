#pragma once

#include "quiver/primary_index.hpp"

namespace quiver {

// A 2-hop view partitioned by the bound edge's id: for every edge e_b, the
// adjacent edges e_adj (per the config's EdgeAdjacencyKind) that pass the
// view predicate, stored as offset lists into the designated endpoint's
// primary ID list. Bound edges are grouped 64 per page, mirroring the vertex
// grouping, and always carry their own CSR levels.
class EdgePartitionedIndex {
public:
    EdgePartitionedIndex(const PropertyGraph& graph, const PrimaryIndex& resolution,
                         IndexConfig config, double cap_factor = 10.0,
                         uint32_t build_threads = 0);

    const IndexConfig& config() const { return config_; }
    EdgeAdjacencyKind kind() const { return config_.ep_kind; }
    const PrimaryIndex& resolution_primary() const { return *primary_; }

    // Logical adjacency list of bound edge e at a key path. Entry `pos` is
    // the stored offset into the designated vertex's primary list.
    void collect_edge(EdgeId e, std::span<const PropertyValue> key_path, ListOrder order,
                      std::vector<ListEntry>& out) const;

    // Sum of logical list lengths (an adjacent edge may be counted once per
    // bound edge whose list contains it).
    uint64_t total_indexed_edges() const;

    struct Memory {
        uint64_t offset_bytes = 0;
        uint64_t level_bytes = 0;
    };
    Memory memory_usage() const;
    uint8_t group_width(uint32_t g) const { return groups_[g].width; }

    // --- maintenance ---
    // Delta maintenance for an inserted edge: adds e to the lists of
    // qualifying bound edges and creates e's own list.
    void on_insert(EdgeId e);
    void on_delete(EdgeId e);
    uint32_t group_of(EdgeId e) const { return static_cast<uint32_t>(e / kGroupSize); }
    uint32_t group_count() const { return static_cast<uint32_t>(groups_.size()); }
    uint32_t pending_load(uint32_t g) const;
    bool group_dirty(uint32_t g) const { return pending_load(g) != 0; }
    void merge_group(uint32_t g);
    void rebuild();

    // Adjacent-edge candidates of a bound edge, straight from the graph.
    std::vector<EdgeId> adjacency_candidates(EdgeId bound) const;
    // Bound edges whose adjacency may contain `adj`.
    std::vector<EdgeId> bound_candidates(EdgeId adj) const;

private:
    struct Group {
        uint8_t width = 1;
        std::vector<uint8_t> offsets;
        std::vector<std::vector<uint32_t>> levels;
        std::vector<std::pair<uint32_t, uint64_t>> pending; // (slot, adj edge)
        std::vector<uint32_t> dead;                         // entry indices, sorted
    };

    void build(uint32_t build_threads);
    void build_one(uint32_t g);
    bool passes(EdgeId bound, EdgeId adj) const;

    const PropertyGraph* graph_;
    const PrimaryIndex* primary_;
    IndexConfig config_;
    LevelLayout layout_;
    double cap_factor_;
    std::vector<Group> groups_;
};

} // namespace quiver
