#include "quiver/edge_index.hpp"

#include <algorithm>
#include <thread>

namespace quiver {

EdgePartitionedIndex::EdgePartitionedIndex(const PropertyGraph& graph,
                                           const PrimaryIndex& resolution,
                                           IndexConfig config, double cap_factor,
                                           uint32_t build_threads)
    : graph_(&graph), primary_(&resolution), config_(std::move(config)),
      cap_factor_(cap_factor) {
    if (config_.kind != IndexKind::EdgePartitioned)
        fail(ErrorCode::InvalidOperation, "config is not edge-partitioned");
    if (resolution.direction() != ep_resolution_direction(config_.ep_kind))
        fail(ErrorCode::MissingPrimaryDirection,
             std::string("need primary ") +
                 direction_name(ep_resolution_direction(config_.ep_kind)));
    validate_config(config_, graph.catalog());
    build(build_threads);
}

bool EdgePartitionedIndex::passes(EdgeId bound, EdgeId adj) const {
    return eval_predicate(make_2hop_context(*graph_, bound, adj, kind()),
                          config_.predicate);
}

std::vector<EdgeId> EdgePartitionedIndex::adjacency_candidates(EdgeId bound) const {
    const EdgeRecord& rec = graph_->edge(bound);
    switch (kind()) {
    case EdgeAdjacencyKind::DestinationFW: return graph_->out_edges(rec.dst);
    case EdgeAdjacencyKind::DestinationBW: return graph_->in_edges(rec.dst);
    case EdgeAdjacencyKind::SourceFW: return graph_->in_edges(rec.src);
    case EdgeAdjacencyKind::SourceBW: return graph_->out_edges(rec.src);
    }
    return {};
}

std::vector<EdgeId> EdgePartitionedIndex::bound_candidates(EdgeId adj) const {
    const EdgeRecord& rec = graph_->edge(adj);
    // The endpoint of `adj` that must coincide with the bound edge's owner.
    const VertexId x =
        ep_resolution_direction(kind()) == Direction::FW ? rec.src : rec.dst;
    return ep_owner_is_dst(kind()) ? graph_->in_edges(x) : graph_->out_edges(x);
}

void EdgePartitionedIndex::build(uint32_t build_threads) {
    if (primary_->has_pending())
        fail(ErrorCode::InvalidOperation,
             "primary index must be merged before building a secondary");
    layout_ = LevelLayout(*graph_, config_.partitioning);
    const uint32_t n_groups = static_cast<uint32_t>(
        (graph_->edge_ids_end() + kGroupSize - 1) / kGroupSize);
    groups_.assign(n_groups, Group{});
    if (n_groups == 0) return;

    const uint32_t hw = build_threads == 0 ? std::thread::hardware_concurrency()
                                           : build_threads;
    const uint32_t n_threads = std::max(1u, std::min(hw, n_groups));
    auto worker = [&](uint32_t t) {
        for (uint32_t g = t; g < n_groups; g += n_threads) build_one(g);
    };
    if (n_threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (uint32_t t = 0; t < n_threads; ++t) pool.emplace_back(worker, t);
        for (std::thread& th : pool) th.join();
    }

    const uint64_t total = total_indexed_edges();
    const double cap = cap_factor_ * static_cast<double>(graph_->live_edge_count());
    if (static_cast<double>(total) > cap)
        fail(ErrorCode::IndexTooLarge,
             "2-hop view would index " + std::to_string(total) + " edges (cap " +
                 std::to_string(static_cast<uint64_t>(cap)) + ")");
}

void EdgePartitionedIndex::rebuild() { build(1); }

void EdgePartitionedIndex::build_one(uint32_t g) {
    Group& grp = groups_[g];
    grp = Group{};

    const EdgeId lo = static_cast<EdgeId>(g) * kGroupSize;
    const EdgeId hi = std::min<EdgeId>(lo + kGroupSize, graph_->edge_ids_end());
    uint32_t longest = 0;
    std::vector<BuildEntry> entries;
    for (EdgeId e = lo; e < hi; ++e) {
        if (!graph_->edge_alive(e)) continue;
        const VertexId owner = ep_owner(*graph_, e, kind());
        longest = std::max(longest, primary_->stored_length(owner));
        const uint32_t len = primary_->stored_length(owner);
        for (uint32_t pos = 0; pos < len; ++pos) {
            const ListEntry src = primary_->stored_entry(owner, pos);
            if (!passes(e, src.edge)) continue;
            const EvalContext ctx = make_2hop_context(*graph_, e, src.edge, kind());
            BuildEntry entry;
            entry.slot = static_cast<uint32_t>(e % kGroupSize);
            entry.key_slots.reserve(layout_.depth());
            for (size_t j = 0; j < layout_.depth(); ++j)
                entry.key_slots.push_back(layout_.entry_slot(j, ctx));
            entry.sort_values = sort_values_for(ctx, config_.sorting);
            entry.edge = src.edge;
            entry.nbr = ctx.nbr;
            entry.aux = pos;
            entries.push_back(std::move(entry));
        }
    }
    grp.width = offset_width_for_length(longest);
    BuiltGroup built = build_group(std::move(entries), layout_);
    grp.offsets.reserve(built.aux.size() * grp.width);
    for (const uint32_t pos : built.aux) append_packed(grp.offsets, grp.width, pos);
    grp.levels = std::move(built.levels);
}

void EdgePartitionedIndex::collect_edge(EdgeId e, std::span<const PropertyValue> key_path,
                                        ListOrder order,
                                        std::vector<ListEntry>& out) const {
    out.clear();
    if (!graph_->edge_alive(e))
        fail(ErrorCode::UnknownEdge, std::to_string(e));
    if (key_path.size() > layout_.depth())
        fail(ErrorCode::InvalidOperation, "key path deeper than index partitioning");
    const uint32_t g = static_cast<uint32_t>(e / kGroupSize);
    const VertexId owner = ep_owner(*graph_, e, kind());

    if (g < groups_.size() && !groups_[g].levels.empty() &&
        owner / kGroupSize < primary_->group_count()) {
        const Group& grp = groups_[g];
        uint64_t flat = e % kGroupSize;
        bool known = true;
        for (size_t j = 0; j < key_path.size(); ++j) {
            const auto key_slot = layout_.slot_of_value(j, key_path[j]);
            if (!key_slot) {
                known = false;
                break;
            }
            flat = flat * layout_.levels()[j].keyspace + *key_slot;
        }
        if (known) {
            const std::vector<uint32_t>& offsets = grp.levels[key_path.size()];
            const uint32_t region = primary_->region_begin(owner);
            const BuiltGroup& pdata = primary_->group(owner / kGroupSize).data;
            for (uint32_t idx = offsets[flat]; idx < offsets[flat + 1]; ++idx) {
                if (std::binary_search(grp.dead.begin(), grp.dead.end(), idx)) continue;
                const uint32_t off =
                    static_cast<uint32_t>(read_packed(grp.offsets, idx, grp.width));
                out.push_back(ListEntry{pdata.edge_ids[region + off],
                                        pdata.nbr_ids[region + off], off});
            }
        }
    }

    bool merged_needed = false;
    if (g < groups_.size()) {
        for (const auto& [slot, adj] : groups_[g].pending) {
            if (slot != e % kGroupSize) continue;
            const EvalContext ctx = make_2hop_context(*graph_, e, adj, kind());
            bool match = true;
            for (size_t j = 0; j < key_path.size() && match; ++j)
                match = key_value_matches(layout_.entry_value(j, ctx), key_path[j]);
            if (!match) continue;
            out.push_back(ListEntry{adj, ctx.nbr, kPendingPos});
            merged_needed = true;
        }
    }

    const bool partial = key_path.size() < layout_.depth();
    if (!merged_needed && (order == ListOrder::Physical || !partial)) return;
    order_entries(layout_, config_.sorting, order,
                  [&](const ListEntry& le) {
                      return make_2hop_context(*graph_, e, le.edge, kind());
                  },
                  out);
}

uint64_t EdgePartitionedIndex::total_indexed_edges() const {
    uint64_t total = 0;
    for (const Group& grp : groups_) {
        total += grp.offsets.size() / grp.width;
        total -= grp.dead.size();
        total += grp.pending.size();
    }
    return total;
}

EdgePartitionedIndex::Memory EdgePartitionedIndex::memory_usage() const {
    Memory mem;
    for (const Group& grp : groups_) {
        mem.offset_bytes += grp.offsets.size();
        for (const std::vector<uint32_t>& level : grp.levels)
            mem.level_bytes += level.size() * 4;
    }
    return mem;
}

uint32_t EdgePartitionedIndex::pending_load(uint32_t g) const {
    return static_cast<uint32_t>(groups_[g].pending.size() + groups_[g].dead.size());
}

void EdgePartitionedIndex::on_insert(EdgeId e) {
    // (a) e joins the adjacency of existing bound edges.
    for (const EdgeId bound : bound_candidates(e)) {
        if (bound == e) continue; // covered by (b)
        if (!passes(bound, e)) continue;
        const uint32_t g = static_cast<uint32_t>(bound / kGroupSize);
        if (g >= groups_.size()) groups_.resize(g + 1);
        groups_[g].pending.emplace_back(static_cast<uint32_t>(bound % kGroupSize), e);
    }
    // (b) a fresh list for e, filled from the designated primary adjacency.
    const uint32_t g = static_cast<uint32_t>(e / kGroupSize);
    if (g >= groups_.size()) groups_.resize(g + 1);
    for (const EdgeId adj : adjacency_candidates(e)) {
        if (!passes(e, adj)) continue;
        groups_[g].pending.emplace_back(static_cast<uint32_t>(e % kGroupSize), adj);
    }
}

void EdgePartitionedIndex::on_delete(EdgeId e) {
    // Drop e's own list.
    const uint32_t g = static_cast<uint32_t>(e / kGroupSize);
    if (g < groups_.size()) {
        Group& grp = groups_[g];
        const uint32_t slot = static_cast<uint32_t>(e % kGroupSize);
        grp.pending.erase(std::remove_if(grp.pending.begin(), grp.pending.end(),
                                         [&](const auto& p) { return p.first == slot; }),
                          grp.pending.end());
        if (!grp.levels.empty()) {
            for (uint32_t idx = grp.levels[0][slot]; idx < grp.levels[0][slot + 1];
                 ++idx) {
                auto it = std::lower_bound(grp.dead.begin(), grp.dead.end(), idx);
                if (it == grp.dead.end() || *it != idx) grp.dead.insert(it, idx);
            }
        }
    }
    // Remove e from every bound list containing it.
    for (const EdgeId bound : bound_candidates(e)) {
        if (bound == e) continue;
        const uint32_t bg = static_cast<uint32_t>(bound / kGroupSize);
        if (bg >= groups_.size()) continue;
        Group& grp = groups_[bg];
        const uint32_t slot = static_cast<uint32_t>(bound % kGroupSize);
        bool removed = false;
        for (size_t i = 0; i < grp.pending.size(); ++i) {
            if (grp.pending[i].first == slot && grp.pending[i].second == e) {
                grp.pending.erase(grp.pending.begin() + static_cast<ptrdiff_t>(i));
                removed = true;
                break;
            }
        }
        if (removed || grp.levels.empty()) continue;
        const VertexId owner = ep_owner(*graph_, bound, kind());
        if (owner / kGroupSize >= primary_->group_count()) continue;
        const uint32_t region = primary_->region_begin(owner);
        const BuiltGroup& pdata = primary_->group(owner / kGroupSize).data;
        for (uint32_t idx = grp.levels[0][slot]; idx < grp.levels[0][slot + 1]; ++idx) {
            const uint32_t off =
                static_cast<uint32_t>(read_packed(grp.offsets, idx, grp.width));
            if (pdata.edge_ids[region + off] != e) continue;
            auto it = std::lower_bound(grp.dead.begin(), grp.dead.end(), idx);
            if (it == grp.dead.end() || *it != idx) grp.dead.insert(it, idx);
            break;
        }
    }
}

void EdgePartitionedIndex::merge_group(uint32_t g) {
    if (g < groups_.size()) build_one(g);
}

} // namespace quiver
