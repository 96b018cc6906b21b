#pragma once

#include "quiver/predicate.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace quiver {

// Vertices (and bound edges) are grouped 64 to a page; offset byte widths and
// CSR offsets are scoped per group.
inline constexpr uint32_t kGroupSize = 64;

// Offset byte width rule: the number of bytes of the longest list length in a
// group, rounded to the next byte. A group whose longest list has length L
// needs the smallest w with L < 2^(8w); an all-empty group gets width 1.
uint8_t offset_width_for_length(uint32_t longest);

uint64_t read_packed(const std::vector<uint8_t>& bytes, uint64_t index, uint8_t width);
void append_packed(std::vector<uint8_t>& bytes, uint8_t width, uint64_t value);

// Resolved nested partitioning: one level per criterion, each with a fixed
// keyspace (all catalog codes plus one dedicated null slot, placed last).
class LevelLayout {
public:
    struct Level {
        PartitioningCriterion criterion;
        uint32_t keyspace = 1;
    };

    LevelLayout() = default;
    LevelLayout(const PropertyGraph& graph,
                const std::vector<PartitioningCriterion>& criteria);

    const std::vector<Level>& levels() const { return levels_; }
    size_t depth() const { return levels_.size(); }

    // Slots per owner at nesting depth d (product of the first d keyspaces).
    uint64_t slots_at(size_t depth) const;
    uint64_t leaf_slots() const { return slots_at(levels_.size()); }

    // Slot of a concrete key value at one level; nullopt when the value is
    // outside this layout's keyspace snapshot (no stored partition).
    std::optional<uint32_t> slot_of_value(size_t level, const PropertyValue& value) const;

    // Key slot of an edge entry during build; null values go to the last slot.
    uint32_t entry_slot(size_t level, const EvalContext& ctx) const;
    // Key value of an edge entry (used to match buffered entries by value).
    PropertyValue entry_value(size_t level, const EvalContext& ctx) const;

    // True if the stored keyspaces still cover every categorical code in the
    // catalog (new codes force a rebuild at merge time).
    bool covers_catalog(const PropertyGraph& graph) const;

private:
    std::vector<Level> levels_;
};

// One resolved adjacency entry. `pos` is the entry's owner-local position in
// the stored primary ID list (what secondary offset lists store); buffered
// entries that have not been merged yet carry kPendingPos.
struct ListEntry {
    uint64_t edge = 0;
    uint32_t nbr = 0;
    uint32_t pos = UINT32_MAX;
};

inline constexpr uint32_t kPendingPos = UINT32_MAX;

// Physical: (partition key path, sort keys, nbr, edge) — the stored layout
// order. BySortKey: (sort keys, nbr, edge) across partition boundaries, used
// when intersecting lists read through a partial key path.
enum class ListOrder { Physical, BySortKey };

// One entry of a list during construction: group slot, per-level key slots,
// materialized sort-key values, the (edge id, neighbour id) payload and an
// auxiliary value carried through the sort (secondary indexes stash the
// owner-local primary position here).
struct BuildEntry {
    uint32_t slot = 0;
    std::vector<uint32_t> key_slots;
    std::vector<PropertyValue> sort_values;
    uint64_t edge = 0;
    uint32_t nbr = 0;
    uint32_t aux = 0;
};

// Compare by sort-key values with the deterministic (NbrId, EdgeId) tie-break.
bool sort_values_less(const std::vector<PropertyValue>& a_vals, uint32_t a_nbr,
                      uint64_t a_edge, const std::vector<PropertyValue>& b_vals,
                      uint32_t b_nbr, uint64_t b_edge);

// Nested-CSR data of one 64-owner group: level offset arrays (positions into
// the payload) plus the payload order. levels[0] has 65 entries (per-owner
// spans); levels[j] has 64 * prod(K_1..K_j) + 1 entries.
struct BuiltGroup {
    std::vector<std::vector<uint32_t>> levels;
    std::vector<uint64_t> edge_ids;
    std::vector<uint32_t> nbr_ids;
    std::vector<uint32_t> aux;

    uint32_t owner_begin(uint32_t slot) const { return levels[0][slot]; }
    uint32_t owner_end(uint32_t slot) const { return levels[0][slot + 1]; }
    uint32_t owner_length(uint32_t slot) const {
        return owner_end(slot) - owner_begin(slot);
    }
};

// Sorts entries into (slot, key path, sort keys, nbr, edge) order and builds
// the level arrays.
BuiltGroup build_group(std::vector<BuildEntry> entries, const LevelLayout& layout);

// Longest per-owner list length in a built group.
uint32_t longest_list(const BuiltGroup& group);

// Re-sorts logical list entries after buffered inserts joined or when a
// partial key path is read in sort-key order. `ctx_of` supplies the
// evaluation context of one entry.
template <typename CtxFn>
void order_entries(const LevelLayout& layout, const SortCriterion& sorting,
                   ListOrder order, CtxFn&& ctx_of, std::vector<ListEntry>& entries);

} // namespace quiver

// --- template implementation ---

#include <algorithm>

namespace quiver {

std::vector<PropertyValue> sort_values_for(const EvalContext& ctx,
                                           const SortCriterion& sorting);

template <typename CtxFn>
void order_entries(const LevelLayout& layout, const SortCriterion& sorting,
                   ListOrder order, CtxFn&& ctx_of, std::vector<ListEntry>& entries) {
    struct Rank {
        std::vector<uint32_t> slots;
        std::vector<PropertyValue> values;
    };
    std::vector<Rank> ranks(entries.size());
    for (size_t i = 0; i < entries.size(); ++i) {
        const EvalContext ctx = ctx_of(entries[i]);
        if (order == ListOrder::Physical) {
            ranks[i].slots.reserve(layout.depth());
            for (size_t j = 0; j < layout.depth(); ++j)
                ranks[i].slots.push_back(layout.entry_slot(j, ctx));
        }
        ranks[i].values = sort_values_for(ctx, sorting);
    }
    std::vector<uint32_t> idx(entries.size());
    for (uint32_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](uint32_t a, uint32_t b) {
        if (ranks[a].slots != ranks[b].slots) return ranks[a].slots < ranks[b].slots;
        return sort_values_less(ranks[a].values, entries[a].nbr, entries[a].edge,
                                ranks[b].values, entries[b].nbr, entries[b].edge);
    });
    std::vector<ListEntry> sorted(entries.size());
    for (size_t i = 0; i < idx.size(); ++i) sorted[i] = entries[idx[i]];
    entries.swap(sorted);
}

} // namespace quiver
