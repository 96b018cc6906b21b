#pragma once

#include "quiver/csr_common.hpp"

#include <atomic>

namespace quiver {

struct PrimaryGroup {
    BuiltGroup data;
    std::vector<std::pair<uint64_t, uint32_t>> pending; // buffered (edge, nbr) inserts
    std::vector<uint32_t> dead;                         // tombstoned group-local positions
};

// One direction of the required nested-CSR index over all edges: pages of 64
// vertices, each holding per-level offset arrays and the (edge id, neighbour
// id) ID lists. Leaf sublists are sorted by the config's sort criterion with
// the (NbrId, EdgeId) tie-break.
class PrimaryIndex {
public:
    PrimaryIndex(const PropertyGraph& graph, IndexConfig config);

    const IndexConfig& config() const { return config_; }
    Direction direction() const { return config_.direction; }
    const LevelLayout& layout() const { return layout_; }
    const PropertyGraph& graph() const { return *graph_; }

    uint32_t group_count() const { return static_cast<uint32_t>(groups_.size()); }
    const PrimaryGroup& group(uint32_t g) const { return groups_[g]; }

    struct Slice {
        uint32_t group = 0;
        uint32_t begin = 0; // group-local
        uint32_t end = 0;
    };

    // Constant-depth stored-slice access: one page lookup plus one offset-
    // array read per key-path level. Unknown key values yield an empty slice.
    Slice get_list(VertexId v, std::span<const PropertyValue> key_path) const;

    // Logical list contents: stored entries minus tombstones merged with
    // buffered inserts, in the requested order. Positions are owner-local.
    void collect(VertexId v, std::span<const PropertyValue> key_path, ListOrder order,
                 std::vector<ListEntry>& out) const;

    // Owner-local region info for offset-list resolution.
    uint32_t region_begin(VertexId v) const;
    uint32_t stored_length(VertexId v) const;
    ListEntry stored_entry(VertexId v, uint32_t owner_pos) const;

    bool has_pending() const;

    // --- maintenance (called under the store-wide writer lock) ---
    void buffer_insert(EdgeId e);
    void apply_delete(EdgeId e);
    uint32_t group_of(VertexId v) const { return v / kGroupSize; }
    uint32_t pending_load(uint32_t g) const {
        return static_cast<uint32_t>(groups_[g].pending.size() + groups_[g].dead.size());
    }
    bool group_dirty(uint32_t g) const { return pending_load(g) != 0; }
    // Rebuilds one group from the graph, clearing its buffers.
    void merge_group(uint32_t g);
    // Catalog gained categorical codes beyond this index's keyspace snapshot.
    bool needs_full_rebuild() const { return !layout_.covers_catalog(*graph_); }
    void rebuild();

    struct Memory {
        uint64_t idlist_bytes = 0;
        std::vector<uint64_t> level_bytes; // [0..depth]
        uint64_t total = 0;
    };
    Memory memory_usage() const;

    uint64_t indirections() const { return indirections_.load(std::memory_order_relaxed); }
    void reset_indirections() { indirections_.store(0, std::memory_order_relaxed); }

    // Sort-key values of an entry under this index's criterion.
    std::vector<PropertyValue> sort_values(EdgeId e) const;

private:
    void build();
    std::vector<BuildEntry> group_entries(uint32_t g) const;
    BuildEntry make_entry(EdgeId e) const;

    const PropertyGraph* graph_;
    IndexConfig config_;
    LevelLayout layout_;
    std::vector<PrimaryGroup> groups_;
    mutable std::atomic<uint64_t> indirections_{0};
};

// True when `value` matches a partition key value, with Null matching the
// null partition.
bool key_value_matches(const PropertyValue& entry_value, const PropertyValue& key);

} // namespace quiver
