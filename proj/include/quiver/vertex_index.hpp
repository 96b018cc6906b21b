#pragma once

#include "quiver/primary_index.hpp"

namespace quiver {

enum class StorageMode { SharedLevels, OwnLevels };

const char* storage_mode_name(StorageMode mode);

// A 1-hop view (edges passing the config's predicate) partitioned by vertex
// id and stored as per-group offset lists into the matching-direction primary
// ID lists. With no predicate and the primary's partitioning structure the
// index shares the primary's CSR levels and stores only offsets.
class VertexPartitionedIndex {
public:
    VertexPartitionedIndex(const PropertyGraph& graph, const PrimaryIndex& primary,
                           IndexConfig config);

    const IndexConfig& config() const { return config_; }
    Direction direction() const { return config_.direction; }
    StorageMode mode() const { return mode_; }
    const PrimaryIndex& primary() const { return *primary_; }

    // Resolved logical contents of v's list at a key path; exactly one
    // indirection into the primary ID list per stored entry. `pos` of each
    // entry is the stored offset (owner-local primary position).
    void collect(VertexId v, std::span<const PropertyValue> key_path, ListOrder order,
                 std::vector<ListEntry>& out) const;

    struct Memory {
        uint64_t offset_bytes = 0;
        uint64_t level_bytes = 0;
    };
    Memory memory_usage() const;

    uint8_t group_width(uint32_t g) const { return groups_[g].width; }
    uint32_t group_count() const { return static_cast<uint32_t>(groups_.size()); }
    uint64_t entry_count() const; // live stored + buffered

    // --- maintenance ---
    // Buffers e when it passes the view predicate; returns whether it did.
    bool on_insert(EdgeId e);
    void apply_delete(EdgeId e);
    uint32_t pending_load(uint32_t g) const;
    bool group_dirty(uint32_t g) const { return pending_load(g) != 0; }
    // Rebuilds one group from the (merged) primary index.
    void merge_group(uint32_t g);
    void rebuild();

private:
    struct Group {
        uint8_t width = 1;
        std::vector<uint8_t> offsets; // packed owner-local primary positions
        std::vector<std::vector<uint32_t>> levels; // OwnLevels only
        std::vector<std::pair<uint64_t, uint32_t>> pending;
        std::vector<uint32_t> dead; // group-local entry indices, sorted
    };

    void build();
    void build_one(uint32_t g);
    bool passes(EdgeId e) const;
    VertexId owner_of(EdgeId e) const;
    std::pair<uint32_t, uint32_t> entry_range(VertexId v,
                                              std::span<const PropertyValue> key_path,
                                              bool& known) const;

    const PropertyGraph* graph_;
    const PrimaryIndex* primary_;
    IndexConfig config_;
    StorageMode mode_ = StorageMode::OwnLevels;
    LevelLayout layout_;
    std::vector<Group> groups_;
};

} // namespace quiver
