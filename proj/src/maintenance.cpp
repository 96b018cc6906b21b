#include "quiver/database.hpp"

#include <algorithm>
#include <mutex>
#include <set>

namespace quiver {

// Update-path coordination: buffered inserts, tombstones and page merges.
// Merging a primary page compacts positions, so every secondary list that
// resolves into it is rebuilt in the same exclusive section; offsets never
// dangle.
struct MaintenanceOps {
    Database& db;

    // Primary vertex groups that must merge before/along the requested scope.
    std::set<std::pair<int, uint32_t>> primary_targets; // (0=FW,1=BW, group)
    std::set<std::pair<size_t, uint32_t>> vp_targets;   // (secondary idx, group)
    std::set<std::pair<size_t, uint32_t>> ep_targets;

    void add_primary(Direction dir, uint32_t g) {
        primary_targets.emplace(dir == Direction::FW ? 0 : 1, g);
    }

    // A VP group rebuild requires its primary group merged first.
    void add_vp(size_t sec, uint32_t g) {
        const Direction dir = db.secondaries_[sec].config.direction;
        if (db.primary(dir).group_count() > g && db.primary(dir).group_dirty(g))
            add_primary(dir, g);
        vp_targets.emplace(sec, g);
    }

    // An EP group rebuild reads the primary lists of its 64 owners.
    void add_ep(size_t sec, uint32_t g) {
        const Database::Secondary& s = db.secondaries_[sec];
        const EdgeAdjacencyKind kind = s.config.ep_kind;
        const Direction dir = ep_resolution_direction(kind);
        const EdgeId lo = static_cast<EdgeId>(g) * kGroupSize;
        const EdgeId hi =
            std::min<EdgeId>(lo + kGroupSize, db.graph_.edge_ids_end());
        for (EdgeId e = lo; e < hi; ++e) {
            if (!db.graph_.edge_alive(e)) continue;
            const VertexId owner = ep_owner(db.graph_, e, kind);
            const uint32_t pg = owner / kGroupSize;
            if (db.primary(dir).group_count() > pg && db.primary(dir).group_dirty(pg))
                add_primary(dir, pg);
        }
        ep_targets.emplace(sec, g);
    }

    void add_all_dirty() {
        for (const Direction dir : {Direction::FW, Direction::BW}) {
            PrimaryIndex& idx = db.primary(dir);
            for (uint32_t g = 0; g < idx.group_count(); ++g)
                if (idx.group_dirty(g)) add_primary(dir, g);
        }
        for (size_t s = 0; s < db.secondaries_.size(); ++s) {
            const Database::Secondary& sec = db.secondaries_[s];
            if (sec.vp) {
                for (uint32_t g = 0; g < sec.vp->group_count(); ++g)
                    if (sec.vp->group_dirty(g)) add_vp(s, g);
            } else {
                for (uint32_t g = 0; g < sec.ep->group_count(); ++g)
                    if (sec.ep->group_dirty(g)) add_ep(s, g);
            }
        }
    }

    // Every secondary page whose stored offsets point into a merged primary
    // group must rebuild alongside it.
    bool cascade() {
        bool changed = false;
        for (size_t s = 0; s < db.secondaries_.size(); ++s) {
            const Database::Secondary& sec = db.secondaries_[s];
            if (sec.vp) {
                const int d = sec.config.direction == Direction::FW ? 0 : 1;
                for (const auto& [dir, g] : primary_targets)
                    if (dir == d && g < sec.vp->group_count())
                        changed |= vp_targets.emplace(s, g).second;
            } else {
                const EdgeAdjacencyKind kind = sec.config.ep_kind;
                const int d = ep_resolution_direction(kind) == Direction::FW ? 0 : 1;
                std::set<uint32_t> merged_vertex_groups;
                for (const auto& [dir, g] : primary_targets)
                    if (dir == d) merged_vertex_groups.insert(g);
                if (merged_vertex_groups.empty()) continue;
                for (EdgeId e = 0; e < db.graph_.edge_ids_end(); ++e) {
                    if (!db.graph_.edge_alive(e)) continue;
                    const VertexId owner = ep_owner(db.graph_, e, kind);
                    if (merged_vertex_groups.count(owner / kGroupSize)) {
                        const uint32_t eg = static_cast<uint32_t>(e / kGroupSize);
                        if (eg < sec.ep->group_count())
                            changed |= ep_targets.emplace(s, eg).second;
                    }
                }
            }
        }
        return changed;
    }

    // A secondary rebuild reads the stored primary lists it points into, so
    // those pages must merge first.
    bool dependencies() {
        bool changed = false;
        for (const auto& [s, g] : vp_targets) {
            const Direction dir = db.secondaries_[s].config.direction;
            if (g < db.primary(dir).group_count() && db.primary(dir).group_dirty(g)) {
                const std::pair<int, uint32_t> key{dir == Direction::FW ? 0 : 1, g};
                changed |= primary_targets.insert(key).second;
            }
        }
        for (const auto& [s, g] : ep_targets) {
            const Database::Secondary& sec = db.secondaries_[s];
            const EdgeAdjacencyKind kind = sec.config.ep_kind;
            const Direction dir = ep_resolution_direction(kind);
            const EdgeId lo = static_cast<EdgeId>(g) * kGroupSize;
            const EdgeId hi = std::min<EdgeId>(lo + kGroupSize, db.graph_.edge_ids_end());
            for (EdgeId e = lo; e < hi; ++e) {
                if (!db.graph_.edge_alive(e)) continue;
                const VertexId owner = ep_owner(db.graph_, e, kind);
                const uint32_t pg = owner / kGroupSize;
                if (pg < db.primary(dir).group_count() &&
                    db.primary(dir).group_dirty(pg)) {
                    const std::pair<int, uint32_t> key{dir == Direction::FW ? 0 : 1, pg};
                    changed |= primary_targets.insert(key).second;
                }
            }
        }
        return changed;
    }

    MergeReport run() {
        MergeReport report;
        // New categorical codes past a keyspace snapshot force full rebuilds.
        if (db.fw_->needs_full_rebuild() || db.bw_->needs_full_rebuild()) {
            db.fw_->rebuild();
            db.bw_->rebuild();
            db.rebuild_secondary_objects();
            report.full_rebuild = true;
            report.pages_merged = db.fw_->group_count() + db.bw_->group_count();
            return report;
        }
        while (cascade() | dependencies()) {
        }
        for (const auto& [dir, g] : primary_targets) {
            PrimaryIndex& idx = db.primary(dir == 0 ? Direction::FW : Direction::BW);
            report.inserts_applied += idx.group(g).pending.size();
            report.tombstones_cleared += idx.group(g).dead.size();
            idx.merge_group(g);
            ++report.pages_merged;
        }
        for (const auto& [s, g] : vp_targets) {
            VertexPartitionedIndex& vp = *db.secondaries_[s].vp;
            if (g >= vp.group_count()) {
                vp.rebuild(); // vertex growth: rebuild sizes the group array
            } else {
                report.inserts_applied += vp.pending_load(g);
                vp.merge_group(g);
            }
            ++report.pages_merged;
        }
        for (const auto& [s, g] : ep_targets) {
            EdgePartitionedIndex& ep = *db.secondaries_[s].ep;
            if (g >= ep.group_count()) {
                ep.rebuild();
            } else {
                report.inserts_applied += ep.pending_load(g);
                ep.merge_group(g);
            }
            ++report.pages_merged;
        }
        return report;
    }
};

VertexId Database::add_vertex(uint32_t label, const PropertyList& props) {
    std::unique_lock lock(mutex_);
    return graph_.add_vertex(label, props);
}

EdgeId Database::insert_edge(VertexId src, VertexId dst, uint32_t label,
                             const PropertyList& props) {
    std::unique_lock lock(mutex_);
    const EdgeId e = graph_.add_edge(src, dst, label, props);
    fw_->buffer_insert(e);
    bw_->buffer_insert(e);
    for (Secondary& sec : secondaries_) {
        if (sec.vp)
            sec.vp->on_insert(e);
        else
            sec.ep->on_insert(e);
    }
    autoflush();
    return e;
}

void Database::delete_edge(EdgeId e) {
    std::unique_lock lock(mutex_);
    if (!graph_.edge_alive(e))
        fail(ErrorCode::UnknownEdge, std::to_string(e));
    for (Secondary& sec : secondaries_) {
        if (sec.vp)
            sec.vp->apply_delete(e);
        else
            sec.ep->on_delete(e);
    }
    fw_->apply_delete(e);
    bw_->apply_delete(e);
    graph_.remove_edge(e);
    autoflush();
}

void Database::autoflush() {
    MaintenanceOps ops{*this};
    bool any = false;
    for (const Direction dir : {Direction::FW, Direction::BW}) {
        PrimaryIndex& idx = primary(dir);
        for (uint32_t g = 0; g < idx.group_count(); ++g) {
            if (idx.pending_load(g) >= buffer_capacity) {
                ops.add_primary(dir, g);
                any = true;
            }
        }
    }
    for (size_t s = 0; s < secondaries_.size(); ++s) {
        Secondary& sec = secondaries_[s];
        if (sec.vp) {
            for (uint32_t g = 0; g < sec.vp->group_count(); ++g)
                if (sec.vp->pending_load(g) >= buffer_capacity) {
                    ops.add_vp(s, g);
                    any = true;
                }
        } else {
            for (uint32_t g = 0; g < sec.ep->group_count(); ++g)
                if (sec.ep->pending_load(g) >= buffer_capacity) {
                    ops.add_ep(s, g);
                    any = true;
                }
        }
    }
    if (any) ops.run();
}

MergeReport Database::flush_impl(bool all, const std::string& index_name, int64_t owner) {
    MaintenanceOps ops{*this};
    if (all) {
        ops.add_all_dirty();
    } else {
        if (index_name == "primary-fw" || index_name == "primary-bw") {
            const Direction dir =
                index_name == "primary-fw" ? Direction::FW : Direction::BW;
            PrimaryIndex& idx = primary(dir);
            for (uint32_t g = 0; g < idx.group_count(); ++g) {
                if (!idx.group_dirty(g)) continue;
                if (owner >= 0 && static_cast<uint32_t>(owner / kGroupSize) != g) continue;
                ops.add_primary(dir, g);
            }
        } else {
            bool found = false;
            for (size_t s = 0; s < secondaries_.size(); ++s) {
                if (secondaries_[s].name != index_name) continue;
                found = true;
                Secondary& sec = secondaries_[s];
                const uint32_t n =
                    sec.vp ? sec.vp->group_count() : sec.ep->group_count();
                for (uint32_t g = 0; g < n; ++g) {
                    const bool dirty = sec.vp ? sec.vp->group_dirty(g)
                                              : sec.ep->group_dirty(g);
                    if (!dirty) continue;
                    if (owner >= 0 && static_cast<uint32_t>(owner / kGroupSize) != g)
                        continue;
                    if (sec.vp)
                        ops.add_vp(s, g);
                    else
                        ops.add_ep(s, g);
                }
            }
            if (!found) fail(ErrorCode::UnknownIndex, index_name);
        }
    }
    return ops.run();
}

MergeReport Database::flush_all() {
    std::unique_lock lock(mutex_);
    return flush_impl(true, "", -1);
}

MergeReport Database::flush_index(const std::string& name) {
    std::unique_lock lock(mutex_);
    return flush_impl(false, name, -1);
}

MergeReport Database::flush_page(const std::string& name, uint64_t owner) {
    std::unique_lock lock(mutex_);
    return flush_impl(false, name, static_cast<int64_t>(owner));
}

} // namespace quiver
