#include "quiver/primary_index.hpp"

#include <algorithm>
#include <thread>

namespace quiver {

std::vector<PropertyValue> sort_values_for(const EvalContext& ctx,
                                           const SortCriterion& sorting) {
    std::vector<PropertyValue> values;
    values.reserve(sorting.keys.size());
    for (const SortKey& key : sorting.keys) {
        if (key.is_nbr_id) continue;
        values.push_back(resolve_ref(ctx, PropRef{key.subject, key.property}));
    }
    return values;
}

bool key_value_matches(const PropertyValue& entry_value, const PropertyValue& key) {
    if (entry_value.is_null() || key.is_null())
        return entry_value.is_null() && key.is_null();
    return entry_value == key;
}

PrimaryIndex::PrimaryIndex(const PropertyGraph& graph, IndexConfig config)
    : graph_(&graph), config_(std::move(config)) {
    if (config_.kind != IndexKind::Primary)
        fail(ErrorCode::InvalidOperation, "config is not a primary index config");
    if (config_.direction == Direction::FWBW)
        fail(ErrorCode::InvalidOperation, "a built index has a single direction");
    validate_config(config_, graph.catalog());
    build();
}

BuildEntry PrimaryIndex::make_entry(EdgeId e) const {
    const EdgeRecord& rec = graph_->edge(e);
    const VertexId owner = direction() == Direction::FW ? rec.src : rec.dst;
    const EvalContext ctx = make_1hop_context(*graph_, e, direction());
    BuildEntry entry;
    entry.slot = owner % kGroupSize;
    entry.key_slots.reserve(layout_.depth());
    for (size_t j = 0; j < layout_.depth(); ++j)
        entry.key_slots.push_back(layout_.entry_slot(j, ctx));
    entry.sort_values = sort_values_for(ctx, config_.sorting);
    entry.edge = e;
    entry.nbr = ctx.nbr;
    return entry;
}

std::vector<BuildEntry> PrimaryIndex::group_entries(uint32_t g) const {
    std::vector<BuildEntry> entries;
    const VertexId lo = g * kGroupSize;
    for (EdgeId e = 0; e < graph_->edge_ids_end(); ++e) {
        if (!graph_->edge_alive(e)) continue;
        const EdgeRecord& rec = graph_->edge(e);
        const VertexId owner = direction() == Direction::FW ? rec.src : rec.dst;
        if (owner / kGroupSize == g) entries.push_back(make_entry(e));
    }
    (void)lo;
    return entries;
}

void PrimaryIndex::build() {
    layout_ = LevelLayout(*graph_, config_.partitioning);
    const uint32_t n_groups =
        (graph_->vertex_count() + kGroupSize - 1) / kGroupSize;
    groups_.assign(n_groups, PrimaryGroup{});
    if (n_groups == 0) return;

    // Single bucketing pass, then groups build independently (parallelizable
    // with a bit-identical result).
    std::vector<std::vector<BuildEntry>> buckets(n_groups);
    for (EdgeId e = 0; e < graph_->edge_ids_end(); ++e) {
        if (!graph_->edge_alive(e)) continue;
        BuildEntry entry = make_entry(e);
        const EdgeRecord& rec = graph_->edge(e);
        const VertexId owner = direction() == Direction::FW ? rec.src : rec.dst;
        buckets[owner / kGroupSize].push_back(std::move(entry));
    }

    const uint32_t n_threads =
        std::max(1u, std::min(std::thread::hardware_concurrency(), n_groups));
    auto worker = [&](uint32_t t) {
        for (uint32_t g = t; g < n_groups; g += n_threads)
            groups_[g].data = build_group(std::move(buckets[g]), layout_);
    };
    if (n_threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (uint32_t t = 0; t < n_threads; ++t) pool.emplace_back(worker, t);
        for (std::thread& th : pool) th.join();
    }
}

void PrimaryIndex::rebuild() { build(); }

PrimaryIndex::Slice PrimaryIndex::get_list(VertexId v,
                                           std::span<const PropertyValue> key_path) const {
    if (!graph_->vertex_exists(v))
        fail(ErrorCode::UnknownId, "vertex " + std::to_string(v));
    if (key_path.size() > layout_.depth())
        fail(ErrorCode::InvalidOperation, "key path deeper than index partitioning");
    // One indirection for the page, one per level descended.
    indirections_.fetch_add(1 + key_path.size(), std::memory_order_relaxed);
    const uint32_t g = v / kGroupSize;
    if (g >= groups_.size()) return Slice{g, 0, 0}; // vertex added after build
    const uint32_t slot = v % kGroupSize;
    const BuiltGroup& data = groups_[g].data;
    uint64_t flat = slot;
    for (size_t j = 0; j < key_path.size(); ++j) {
        const auto key_slot = layout_.slot_of_value(j, key_path[j]);
        if (!key_slot) return Slice{g, 0, 0};
        flat = flat * layout_.levels()[j].keyspace + *key_slot;
    }
    const std::vector<uint32_t>& offsets = data.levels[key_path.size()];
    return Slice{g, offsets[flat], offsets[flat + 1]};
}

uint32_t PrimaryIndex::region_begin(VertexId v) const {
    if (v / kGroupSize >= groups_.size()) return 0;
    const BuiltGroup& data = groups_[v / kGroupSize].data;
    return data.owner_begin(v % kGroupSize);
}

uint32_t PrimaryIndex::stored_length(VertexId v) const {
    if (v / kGroupSize >= groups_.size()) return 0;
    const BuiltGroup& data = groups_[v / kGroupSize].data;
    return data.owner_length(v % kGroupSize);
}

ListEntry PrimaryIndex::stored_entry(VertexId v, uint32_t owner_pos) const {
    const BuiltGroup& data = groups_[v / kGroupSize].data;
    const uint32_t gpos = data.owner_begin(v % kGroupSize) + owner_pos;
    return ListEntry{data.edge_ids[gpos], data.nbr_ids[gpos], owner_pos};
}

bool PrimaryIndex::has_pending() const {
    for (const PrimaryGroup& g : groups_)
        if (!g.pending.empty() || !g.dead.empty()) return true;
    return false;
}

void PrimaryIndex::collect(VertexId v, std::span<const PropertyValue> key_path,
                           ListOrder order, std::vector<ListEntry>& out) const {
    out.clear();
    const Slice slice = get_list(v, key_path);
    if (slice.group >= groups_.size()) return;
    const PrimaryGroup& grp = groups_[slice.group];
    const BuiltGroup& data = grp.data;
    const uint32_t region = data.owner_begin(v % kGroupSize);

    for (uint32_t gpos = slice.begin; gpos < slice.end; ++gpos) {
        if (std::binary_search(grp.dead.begin(), grp.dead.end(), gpos)) continue;
        out.push_back(ListEntry{data.edge_ids[gpos], data.nbr_ids[gpos], gpos - region});
    }

    bool merged_needed = false;
    if (!grp.pending.empty()) {
        for (const auto& [edge, nbr] : grp.pending) {
            const EdgeRecord& rec = graph_->edge(edge);
            const VertexId owner = direction() == Direction::FW ? rec.src : rec.dst;
            if (owner != v) continue;
            const EvalContext ctx = make_1hop_context(*graph_, edge, direction());
            bool match = true;
            for (size_t j = 0; j < key_path.size() && match; ++j)
                match = key_value_matches(layout_.entry_value(j, ctx), key_path[j]);
            if (!match) continue;
            out.push_back(ListEntry{edge, nbr, kPendingPos});
            merged_needed = true;
        }
    }

    // Stored entries are already in Physical order; a re-sort is only needed
    // when buffered inserts joined, or when a partial key path must be read
    // in sort-key order across leaf boundaries.
    const bool partial = key_path.size() < layout_.depth();
    if (!merged_needed && (order == ListOrder::Physical || !partial)) return;

    order_entries(layout_, config_.sorting, order,
                  [&](const ListEntry& e) {
                      return make_1hop_context(*graph_, e.edge, direction());
                  },
                  out);
}

void PrimaryIndex::buffer_insert(EdgeId e) {
    const EdgeRecord& rec = graph_->edge(e);
    const VertexId owner = direction() == Direction::FW ? rec.src : rec.dst;
    const VertexId nbr = direction() == Direction::FW ? rec.dst : rec.src;
    const uint32_t g = owner / kGroupSize;
    while (groups_.size() <= g) {
        PrimaryGroup fresh;
        fresh.data = build_group({}, layout_);
        groups_.push_back(std::move(fresh));
    }
    groups_[g].pending.emplace_back(e, nbr);
}

void PrimaryIndex::apply_delete(EdgeId e) {
    const EdgeRecord& rec = graph_->edge(e);
    const VertexId owner = direction() == Direction::FW ? rec.src : rec.dst;
    const uint32_t g = owner / kGroupSize;
    if (g >= groups_.size()) return;
    PrimaryGroup& grp = groups_[g];
    for (size_t i = 0; i < grp.pending.size(); ++i) {
        if (grp.pending[i].first == e) {
            grp.pending.erase(grp.pending.begin() + static_cast<ptrdiff_t>(i));
            return;
        }
    }
    const BuiltGroup& data = grp.data;
    const uint32_t begin = data.owner_begin(owner % kGroupSize);
    const uint32_t end = data.owner_end(owner % kGroupSize);
    for (uint32_t gpos = begin; gpos < end; ++gpos) {
        if (data.edge_ids[gpos] != e) continue;
        auto it = std::lower_bound(grp.dead.begin(), grp.dead.end(), gpos);
        if (it == grp.dead.end() || *it != gpos) grp.dead.insert(it, gpos);
        return;
    }
    fail(ErrorCode::UnknownEdge, "edge " + std::to_string(e) + " not in index");
}

void PrimaryIndex::merge_group(uint32_t g) {
    PrimaryGroup& grp = groups_[g];
    grp.data = build_group(group_entries(g), layout_);
    grp.pending.clear();
    grp.dead.clear();
}

PrimaryIndex::Memory PrimaryIndex::memory_usage() const {
    Memory mem;
    mem.level_bytes.assign(layout_.depth() + 1, 0);
    for (const PrimaryGroup& grp : groups_) {
        mem.idlist_bytes += grp.data.edge_ids.size() * 12; // 8-byte edge + 4-byte nbr
        for (size_t j = 0; j < grp.data.levels.size(); ++j)
            mem.level_bytes[j] += grp.data.levels[j].size() * 4;
    }
    mem.total = mem.idlist_bytes;
    for (const uint64_t b : mem.level_bytes) mem.total += b;
    return mem;
}

std::vector<PropertyValue> PrimaryIndex::sort_values(EdgeId e) const {
    return sort_values_for(make_1hop_context(*graph_, e, direction()), config_.sorting);
}

} // namespace quiver
