#include "quiver/vertex_index.hpp"

#include <algorithm>

namespace quiver {

const char* storage_mode_name(StorageMode mode) {
    return mode == StorageMode::SharedLevels ? "shared" : "own";
}

VertexPartitionedIndex::VertexPartitionedIndex(const PropertyGraph& graph,
                                               const PrimaryIndex& primary,
                                               IndexConfig config)
    : graph_(&graph), primary_(&primary), config_(std::move(config)) {
    if (config_.kind != IndexKind::VertexPartitioned)
        fail(ErrorCode::InvalidOperation, "config is not vertex-partitioned");
    if (config_.direction == Direction::FWBW)
        fail(ErrorCode::InvalidOperation, "a built index has a single direction");
    if (primary.direction() != config_.direction)
        fail(ErrorCode::MissingPrimaryDirection,
             std::string("need primary ") + direction_name(config_.direction));
    validate_config(config_, graph.catalog());
    mode_ = (config_.predicate.empty() &&
             config_.partitioning == primary.config().partitioning)
                ? StorageMode::SharedLevels
                : StorageMode::OwnLevels;
    build();
}

VertexId VertexPartitionedIndex::owner_of(EdgeId e) const {
    const EdgeRecord& rec = graph_->edge(e);
    return direction() == Direction::FW ? rec.src : rec.dst;
}

bool VertexPartitionedIndex::passes(EdgeId e) const {
    if (config_.predicate.empty()) return true;
    return eval_predicate(make_1hop_context(*graph_, e, direction()), config_.predicate);
}

void VertexPartitionedIndex::build() {
    if (primary_->has_pending())
        fail(ErrorCode::InvalidOperation,
             "primary index must be merged before building a secondary");
    layout_ = LevelLayout(*graph_, config_.partitioning);
    groups_.assign(primary_->group_count(), Group{});
    for (uint32_t g = 0; g < groups_.size(); ++g) build_one(g);
}

void VertexPartitionedIndex::rebuild() { build(); }

void VertexPartitionedIndex::build_one(uint32_t g) {
    Group& grp = groups_[g];
    grp = Group{};

    // Width is fixed by the longest primary list of the 64 vertices the
    // offsets point into.
    grp.width = offset_width_for_length(longest_list(primary_->group(g).data));

    std::vector<BuildEntry> entries;
    const VertexId lo = g * kGroupSize;
    const VertexId hi = std::min<uint64_t>(lo + kGroupSize, graph_->vertex_count());
    for (VertexId v = lo; v < hi; ++v) {
        const uint32_t len = primary_->stored_length(v);
        for (uint32_t pos = 0; pos < len; ++pos) {
            const ListEntry src = primary_->stored_entry(v, pos);
            if (!passes(src.edge)) continue;
            const EvalContext ctx = make_1hop_context(*graph_, src.edge, direction());
            BuildEntry entry;
            entry.slot = v % kGroupSize;
            entry.key_slots.reserve(layout_.depth());
            for (size_t j = 0; j < layout_.depth(); ++j)
                entry.key_slots.push_back(layout_.entry_slot(j, ctx));
            entry.sort_values = sort_values_for(ctx, config_.sorting);
            entry.edge = src.edge;
            entry.nbr = src.nbr;
            entry.aux = pos;
            entries.push_back(std::move(entry));
        }
    }
    BuiltGroup built = build_group(std::move(entries), layout_);
    grp.offsets.reserve(built.aux.size() * grp.width);
    for (const uint32_t pos : built.aux) append_packed(grp.offsets, grp.width, pos);
    if (mode_ == StorageMode::OwnLevels) grp.levels = std::move(built.levels);
}

std::pair<uint32_t, uint32_t>
VertexPartitionedIndex::entry_range(VertexId v, std::span<const PropertyValue> key_path,
                                    bool& known) const {
    known = true;
    const uint32_t slot = v % kGroupSize;
    uint64_t flat = slot;
    for (size_t j = 0; j < key_path.size(); ++j) {
        const auto key_slot = layout_.slot_of_value(j, key_path[j]);
        if (!key_slot) {
            known = false;
            return {0, 0};
        }
        flat = flat * layout_.levels()[j].keyspace + *key_slot;
    }
    if (mode_ == StorageMode::SharedLevels) {
        if (v / kGroupSize >= primary_->group_count()) return {0, 0};
        const std::vector<uint32_t>& offsets =
            primary_->group(v / kGroupSize).data.levels[key_path.size()];
        return {offsets[flat], offsets[flat + 1]};
    }
    const Group& grp = groups_[v / kGroupSize];
    if (grp.levels.empty()) return {0, 0}; // fresh group, nothing merged yet
    const std::vector<uint32_t>& offsets = grp.levels[key_path.size()];
    return {offsets[flat], offsets[flat + 1]};
}

void VertexPartitionedIndex::collect(VertexId v, std::span<const PropertyValue> key_path,
                                     ListOrder order, std::vector<ListEntry>& out) const {
    out.clear();
    if (!graph_->vertex_exists(v))
        fail(ErrorCode::UnknownId, "vertex " + std::to_string(v));
    if (key_path.size() > layout_.depth())
        fail(ErrorCode::InvalidOperation, "key path deeper than index partitioning");
    const uint32_t g = v / kGroupSize;
    if (g >= groups_.size() || g >= primary_->group_count()) return;
    const Group& grp = groups_[g];
    bool known = true;
    const auto [begin, end] = entry_range(v, key_path, known);
    const uint32_t region = primary_->region_begin(v);
    const BuiltGroup& pdata = primary_->group(g).data;
    if (known) {
        for (uint32_t idx = begin; idx < end; ++idx) {
            if (std::binary_search(grp.dead.begin(), grp.dead.end(), idx)) continue;
            const uint32_t off =
                static_cast<uint32_t>(read_packed(grp.offsets, idx, grp.width));
            out.push_back(
                ListEntry{pdata.edge_ids[region + off], pdata.nbr_ids[region + off], off});
        }
    }

    bool merged_needed = false;
    for (const auto& [edge, nbr] : grp.pending) {
        if (owner_of(edge) != v) continue;
        const EvalContext ctx = make_1hop_context(*graph_, edge, direction());
        bool match = true;
        for (size_t j = 0; j < key_path.size() && match; ++j)
            match = key_value_matches(layout_.entry_value(j, ctx), key_path[j]);
        if (!match) continue;
        out.push_back(ListEntry{edge, nbr, kPendingPos});
        merged_needed = true;
    }

    const bool partial = key_path.size() < layout_.depth();
    if (!merged_needed && (order == ListOrder::Physical || !partial)) return;
    order_entries(layout_, config_.sorting, order,
                  [&](const ListEntry& e) {
                      return make_1hop_context(*graph_, e.edge, direction());
                  },
                  out);
}

VertexPartitionedIndex::Memory VertexPartitionedIndex::memory_usage() const {
    Memory mem;
    for (const Group& grp : groups_) {
        mem.offset_bytes += grp.offsets.size();
        for (const std::vector<uint32_t>& level : grp.levels)
            mem.level_bytes += level.size() * 4;
    }
    return mem;
}

uint64_t VertexPartitionedIndex::entry_count() const {
    uint64_t count = 0;
    for (const Group& grp : groups_)
        count += grp.offsets.size() / grp.width - grp.dead.size() + grp.pending.size();
    return count;
}

bool VertexPartitionedIndex::on_insert(EdgeId e) {
    if (!passes(e)) return false;
    const VertexId owner = owner_of(e);
    const VertexId nbr = direction() == Direction::FW ? graph_->edge(e).dst
                                                      : graph_->edge(e).src;
    const uint32_t g = owner / kGroupSize;
    if (g >= groups_.size()) groups_.resize(g + 1);
    groups_[g].pending.emplace_back(e, nbr);
    return true;
}

void VertexPartitionedIndex::apply_delete(EdgeId e) {
    if (!passes(e)) return;
    const VertexId owner = owner_of(e);
    const uint32_t g = owner / kGroupSize;
    if (g >= groups_.size()) return;
    Group& grp = groups_[g];
    for (size_t i = 0; i < grp.pending.size(); ++i) {
        if (grp.pending[i].first == e) {
            grp.pending.erase(grp.pending.begin() + static_cast<ptrdiff_t>(i));
            return;
        }
    }
    // Locate the stored entry resolving to e within the owner's entry range.
    bool known = true;
    const auto [begin, end] = entry_range(owner, {}, known);
    const uint32_t region = primary_->region_begin(owner);
    const BuiltGroup& pdata = primary_->group(g).data;
    for (uint32_t idx = begin; idx < end; ++idx) {
        const uint32_t off = static_cast<uint32_t>(read_packed(grp.offsets, idx, grp.width));
        if (pdata.edge_ids[region + off] != e) continue;
        auto it = std::lower_bound(grp.dead.begin(), grp.dead.end(), idx);
        if (it == grp.dead.end() || *it != idx) grp.dead.insert(it, idx);
        return;
    }
}

uint32_t VertexPartitionedIndex::pending_load(uint32_t g) const {
    return static_cast<uint32_t>(groups_[g].pending.size() + groups_[g].dead.size());
}

void VertexPartitionedIndex::merge_group(uint32_t g) {
    if (g < groups_.size()) build_one(g);
}

} // namespace quiver
