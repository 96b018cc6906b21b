#include "quiver/optimizer.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <functional>
#include <cmath>

namespace quiver {

// --- cost model ---

CostModel CostModel::build(const PropertyGraph& graph, const IndexStore& store) {
    CostModel model;
    model.graph_ = &graph;
    model.vertex_label_counts_.assign(graph.catalog().vertex_labels().size(), 0);
    for (VertexId v = 0; v < graph.vertex_count(); ++v)
        ++model.vertex_label_counts_[graph.vertex_label(v)];

    for (const IndexDescriptor& desc : store.descriptors()) {
        IndexStats s;
        s.layout = LevelLayout(graph, desc.config.partitioning);
        const uint32_t k1 =
            s.layout.depth() > 0 ? s.layout.levels()[0].keyspace : 1;
        s.level1_counts.assign(k1, 0);
        if (desc.kind == IndexKind::EdgePartitioned) {
            s.owners = graph.edge_ids_end();
            s.entries = desc.ep->total_indexed_edges();
            for (EdgeId e = 0; e < graph.edge_ids_end(); ++e) {
                if (!graph.edge_alive(e)) continue;
                std::vector<ListEntry> entries;
                desc.ep->collect_edge(e, {}, ListOrder::Physical, entries);
                for (const ListEntry& le : entries) {
                    if (s.layout.depth() == 0) break;
                    const EvalContext ctx =
                        make_2hop_context(graph, e, le.edge, desc.ep_kind);
                    ++s.level1_counts[s.layout.entry_slot(0, ctx)];
                }
            }
        } else {
            s.owners = graph.vertex_count();
            s.entries = 0;
            for (EdgeId e = 0; e < graph.edge_ids_end(); ++e) {
                if (!graph.edge_alive(e)) continue;
                const Direction dir = desc.direction;
                const EvalContext ctx = make_1hop_context(graph, e, dir);
                if (desc.kind == IndexKind::VertexPartitioned &&
                    !desc.config.predicate.empty() &&
                    !eval_predicate(ctx, desc.config.predicate))
                    continue;
                ++s.entries;
                if (s.layout.depth() > 0)
                    ++s.level1_counts[s.layout.entry_slot(0, ctx)];
            }
        }
        model.stats_.emplace(&desc, std::move(s));
    }
    return model;
}

double CostModel::avg_list_length(const IndexDescriptor& desc,
                                  std::span<const PropertyValue> key_path) const {
    const auto it = stats_.find(&desc);
    if (it == stats_.end()) return 0.0;
    const IndexStats& s = it->second;
    const double owners = static_cast<double>(std::max<uint64_t>(1, s.owners));
    double entries = static_cast<double>(s.entries);
    if (!key_path.empty() && s.layout.depth() > 0) {
        const auto slot = s.layout.slot_of_value(0, key_path[0]);
        entries = slot ? static_cast<double>(s.level1_counts[*slot]) : 0.0;
        for (size_t j = 1; j < key_path.size(); ++j)
            entries /= static_cast<double>(s.layout.levels()[j].keyspace);
    }
    return entries / owners;
}

double CostModel::scan_estimate(const QueryGraph& q, const PlanStep& scan) const {
    if (scan.kind == StepKind::ScanEdge) return 1.0;
    const double n = static_cast<double>(graph_->vertex_count());
    double est = n;
    if (scan.selector.fixed_id) est = std::min(est, 1.0);
    for (const QueryAtom& atom : scan.selector.atoms) {
        if (atom.rhs_is_ref || n == 0) continue;
        double frac = 0.5;
        if (atom.lhs.prop == kIdProp && !atom.rhs_const.is_null()) {
            const double c = atom.rhs_const.as_number();
            switch (atom.op) {
            case CmpOp::Eq: frac = 1.0 / n; break;
            case CmpOp::Lt: frac = std::clamp(c / n, 0.0, 1.0); break;
            case CmpOp::Le: frac = std::clamp((c + 1) / n, 0.0, 1.0); break;
            case CmpOp::Gt: frac = std::clamp((n - c - 1) / n, 0.0, 1.0); break;
            case CmpOp::Ge: frac = std::clamp((n - c) / n, 0.0, 1.0); break;
            case CmpOp::Ne: frac = (n - 1) / n; break;
            }
        } else if (atom.lhs.prop == kLabelProp && atom.op == CmpOp::Eq &&
                   atom.rhs_const.tag() == PropertyValue::Tag::Categorical) {
            const uint32_t code = atom.rhs_const.as_categorical();
            const double cnt = code < vertex_label_counts_.size()
                                   ? static_cast<double>(vertex_label_counts_[code])
                                   : 0.0;
            frac = cnt / n;
        } else if (atom.op == CmpOp::Eq) {
            const PropertyDef* def =
                graph_->catalog().find(atom.lhs.prop, Attachment::Vertex);
            frac = def && def->kind == PropertyKind::Categorical && def->codes.size() > 0
                       ? 1.0 / def->codes.size()
                       : 0.1;
        } else if (atom.op == CmpOp::Ne) {
            frac = 0.9;
        }
        est *= frac;
    }
    return est;
}

// --- optimizer ---

Optimizer::Optimizer(const PropertyGraph& graph, const IndexStore& store,
                     const CostModel& model)
    : graph_(&graph), store_(&store), model_(&model) {}

namespace {

bool atom_covered(const QueryGraph& q, const QueryAtom& atom, uint64_t mask) {
    for (const auto& [is_edge, var] : q.atom_vars(atom)) {
        if (is_edge) {
            const QueryEdge& e = q.edges[var];
            if (!((mask >> e.src) & 1) || !((mask >> e.dst) & 1)) return false;
        } else if (!((mask >> var) & 1)) {
            return false;
        }
    }
    return true;
}

bool edge_bound(const QueryGraph& q, int qe, uint64_t mask) {
    return ((mask >> q.edges[qe].src) & 1) && ((mask >> q.edges[qe].dst) & 1);
}

// Subject of a query ref under a vertex-extension accessor, or nullopt when
// the ref is not expressible in that accessor's vocabulary.
std::optional<Subject> map_vertex_ref(const QueryGraph& q, const QueryRef& ref,
                                      int target, int bound_vertex, int qedge,
                                      uint64_t mask) {
    if (ref.is_edge) {
        if (ref.var == qedge) return Subject::AdjEdge;
        if (edge_bound(q, ref.var, mask)) return Subject::BoundEdge;
        return std::nullopt;
    }
    if (ref.var == target) return Subject::NbrVertex;
    if (ref.var == bound_vertex) return Subject::BoundVertex;
    return std::nullopt;
}

// Subject mapping for an edge-partitioned accessor bound to query edge `b`.
std::optional<Subject> map_ep_ref(const QueryGraph& q, const QueryRef& ref, int target,
                                  int qedge, int b, EdgeAdjacencyKind kind) {
    const Subject owner =
        ep_owner_is_dst(kind) ? Subject::DstVertex : Subject::SrcVertex;
    const Subject other =
        ep_owner_is_dst(kind) ? Subject::SrcVertex : Subject::DstVertex;
    const int owner_var = ep_owner_is_dst(kind) ? q.edges[b].dst : q.edges[b].src;
    const int other_var = ep_owner_is_dst(kind) ? q.edges[b].src : q.edges[b].dst;
    if (ref.is_edge) {
        if (ref.var == qedge) return Subject::AdjEdge;
        if (ref.var == b) return Subject::BoundEdge;
        return std::nullopt; // a different bound edge must stay a residual
    }
    if (ref.var == target) return Subject::NbrVertex;
    if (ref.var == owner_var) return owner;
    if (ref.var == other_var) return other;
    return std::nullopt;
}

template <typename MapFn>
std::optional<PredAtom> canonicalize_atom(const QueryAtom& atom, MapFn&& map_ref) {
    PredAtom out;
    const auto lhs = map_ref(atom.lhs);
    if (!lhs) return std::nullopt;
    out.lhs = PropRef{*lhs, atom.lhs.prop};
    out.op = atom.op;
    out.rhs_offset = atom.rhs_offset;
    if (atom.rhs_is_ref) {
        const auto rhs = map_ref(atom.rhs_ref);
        if (!rhs) return std::nullopt;
        out.rhs_is_ref = true;
        out.rhs_ref = PropRef{*rhs, atom.rhs_ref.prop};
    } else {
        out.rhs_const = atom.rhs_const;
    }
    return normalize_atom(out);
}

} // namespace

std::vector<Optimizer::AccessorChoice>
Optimizer::edge_candidates(const QueryGraph& q, uint64_t mask, int qedge, int target,
                           const std::optional<SortKey>& sort) const {
    std::vector<AccessorChoice> choices;
    const QueryEdge& edge = q.edges[qedge];
    const int bound_vertex = edge.src == target ? edge.dst : edge.src;
    const Direction dir = edge.src == bound_vertex ? Direction::FW : Direction::BW;

    // Atoms that become evaluable with this extension.
    std::vector<size_t> new_atoms;
    for (size_t i = 0; i < q.atoms.size(); ++i) {
        if (atom_covered(q, q.atoms[i], mask)) continue;
        if (atom_covered(q, q.atoms[i], mask | (1ull << target))) new_atoms.push_back(i);
    }
    // Context: constant atoms already guaranteed on bound vars.
    std::vector<size_t> context_atoms;
    for (size_t i = 0; i < q.atoms.size(); ++i)
        if (atom_covered(q, q.atoms[i], mask) && !q.atoms[i].rhs_is_ref)
            context_atoms.push_back(i);

    auto run_query = [&](ExtensionQuery& ext, const std::vector<size_t>& pq_idx,
                         bool from_edge, int bound_edge, EdgeAdjacencyKind kind) {
        const auto matches = store_->find_indexes(ext);
        for (const IndexMatch& m : matches) {
            AccessorChoice choice;
            choice.accessor.index = m.descriptor;
            choice.accessor.query_edge = qedge;
            choice.accessor.from_edge = from_edge;
            choice.accessor.bound_vertex = bound_vertex;
            choice.accessor.bound_edge = bound_edge;
            choice.accessor.dir = dir;
            choice.accessor.key_path = m.key_path;
            std::vector<bool> residual(pq_idx.size(), false);
            for (const size_t r : m.residual_idx) residual[r] = true;
            for (size_t i = 0; i < pq_idx.size(); ++i)
                if (!residual[i]) choice.consumed.push_back(pq_idx[i]);
            choice.est_len = model_->avg_list_length(*m.descriptor, m.key_path);
            choices.push_back(std::move(choice));
        }
    };

    {
        ExtensionQuery ext;
        ext.edge_partitioned = false;
        ext.direction = dir;
        ext.required_sort = sort;
        std::vector<size_t> pq_idx;
        auto map_ref = [&](const QueryRef& ref) {
            return map_vertex_ref(q, ref, target, bound_vertex, qedge, mask);
        };
        for (const size_t i : new_atoms) {
            if (auto atom = canonicalize_atom(q.atoms[i], map_ref)) {
                ext.p_q.atoms.push_back(*atom);
                pq_idx.push_back(i);
            }
        }
        for (const size_t i : context_atoms) {
            if (auto atom = canonicalize_atom(q.atoms[i], map_ref))
                ext.context.atoms.push_back(*atom);
        }
        run_query(ext, pq_idx, false, -1, EdgeAdjacencyKind::DestinationFW);
    }

    // Edge-partitioned candidates, one per bound edge adjacent at the bound
    // endpoint. The bound edge's position fixes the adjacency kind.
    for (size_t b = 0; b < q.edges.size(); ++b) {
        if (static_cast<int>(b) == qedge || !edge_bound(q, static_cast<int>(b), mask))
            continue;
        EdgeAdjacencyKind kind;
        if (dir == Direction::FW) {
            if (q.edges[b].dst == bound_vertex) kind = EdgeAdjacencyKind::DestinationFW;
            else if (q.edges[b].src == bound_vertex) kind = EdgeAdjacencyKind::SourceBW;
            else continue;
        } else {
            if (q.edges[b].dst == bound_vertex) kind = EdgeAdjacencyKind::DestinationBW;
            else if (q.edges[b].src == bound_vertex) kind = EdgeAdjacencyKind::SourceFW;
            else continue;
        }
        ExtensionQuery ext;
        ext.edge_partitioned = true;
        ext.ep_kind = kind;
        ext.required_sort = sort;
        std::vector<size_t> pq_idx;
        auto map_ref = [&](const QueryRef& ref) {
            return map_ep_ref(q, ref, target, qedge, static_cast<int>(b), kind);
        };
        for (const size_t i : new_atoms) {
            if (auto atom = canonicalize_atom(q.atoms[i], map_ref)) {
                ext.p_q.atoms.push_back(*atom);
                pq_idx.push_back(i);
            }
        }
        for (const size_t i : context_atoms) {
            if (auto atom = canonicalize_atom(q.atoms[i], map_ref))
                ext.context.atoms.push_back(*atom);
        }
        run_query(ext, pq_idx, true, static_cast<int>(b), kind);
    }
    return choices;
}

std::vector<SeedOption> Optimizer::seeds(const QueryGraph& q) const {
    std::vector<SeedOption> out;
    for (size_t v = 0; v < q.vertices.size(); ++v) {
        PlanStep scan;
        scan.kind = StepKind::ScanVertex;
        scan.var = static_cast<int>(v);
        for (const QueryAtom& atom : q.atoms) {
            if (atom.rhs_is_ref) continue;
            if (atom.lhs.is_edge || atom.lhs.var != static_cast<int>(v)) continue;
            if (atom.lhs.prop == kIdProp && atom.op == CmpOp::Eq &&
                !scan.selector.fixed_id && !atom.rhs_const.is_null()) {
                scan.selector.fixed_id =
                    static_cast<uint64_t>(atom.rhs_const.as_int());
            }
            scan.selector.atoms.push_back(atom);
        }
        SeedOption seed;
        seed.mask = 1ull << v;
        seed.est = model_->scan_estimate(q, scan);
        scan.est_out = seed.est;
        seed.scan = std::move(scan);
        out.push_back(std::move(seed));
    }
    for (size_t e = 0; e < q.edges.size(); ++e) {
        std::optional<uint64_t> fixed;
        for (const QueryAtom& atom : q.atoms) {
            if (atom.rhs_is_ref || !atom.lhs.is_edge) continue;
            if (atom.lhs.var != static_cast<int>(e)) continue;
            if (atom.lhs.prop == "eID" && atom.op == CmpOp::Eq &&
                !atom.rhs_const.is_null())
                fixed = static_cast<uint64_t>(atom.rhs_const.as_int());
        }
        if (!fixed) continue;
        PlanStep scan;
        scan.kind = StepKind::ScanEdge;
        scan.var = static_cast<int>(e);
        scan.selector.fixed_id = fixed;
        const uint64_t mask = (1ull << q.edges[e].src) | (1ull << q.edges[e].dst);
        for (const QueryAtom& atom : q.atoms) {
            if (!atom_covered(q, atom, mask)) continue;
            if (atom.lhs.is_edge && atom.lhs.var == static_cast<int>(e) &&
                atom.lhs.prop == "eID" && !atom.rhs_is_ref && atom.op == CmpOp::Eq)
                continue; // consumed by the scan itself
            scan.selector.atoms.push_back(atom);
        }
        SeedOption seed;
        seed.mask = mask;
        seed.est = 1.0;
        scan.est_out = 1.0;
        seed.scan = std::move(scan);
        out.push_back(std::move(seed));
    }
    return out;
}

void Optimizer::ei_options(const QueryGraph& q, uint64_t mask, double est_in,
                           std::vector<ExtensionOption>& out) const {
    for (size_t t = 0; t < q.vertices.size(); ++t) {
        if ((mask >> t) & 1) continue;
        std::vector<int> edges_to_bind;
        for (size_t e = 0; e < q.edges.size(); ++e) {
            const QueryEdge& qe = q.edges[e];
            const int other = qe.src == static_cast<int>(t)
                                  ? qe.dst
                                  : (qe.dst == static_cast<int>(t) ? qe.src : -1);
            if (other >= 0 && ((mask >> other) & 1))
                edges_to_bind.push_back(static_cast<int>(e));
        }
        if (edges_to_bind.empty()) continue;
        const size_t z = edges_to_bind.size();
        std::optional<SortKey> sort;
        if (z >= 2) {
            SortKey nbr;
            nbr.is_nbr_id = true;
            sort = nbr;
        }
        std::vector<std::vector<AccessorChoice>> per_edge;
        bool feasible = true;
        double min_len = INFINITY;
        for (const int e : edges_to_bind) {
            per_edge.push_back(edge_candidates(q, mask, e, static_cast<int>(t), sort));
            if (per_edge.back().empty()) {
                feasible = false;
                break;
            }
            for (const AccessorChoice& c : per_edge.back())
                min_len = std::min(min_len, c.est_len);
        }
        if (!feasible) continue;
        const double factor = min_len * std::pow(kIntersectionDamping,
                                                 static_cast<double>(z - 1));

        // New atoms of this extension (for the residual filter).
        std::vector<size_t> new_atoms;
        const uint64_t to_mask = mask | (1ull << t);
        for (size_t i = 0; i < q.atoms.size(); ++i)
            if (!atom_covered(q, q.atoms[i], mask) &&
                atom_covered(q, q.atoms[i], to_mask))
                new_atoms.push_back(i);

        // Cross product of per-edge accessor choices, capped.
        std::vector<size_t> idx(z, 0);
        int combos = 0;
        while (combos < kMaxCombos) {
            ++combos;
            ExtensionOption option;
            option.step.kind = StepKind::Extend;
            option.step.target = static_cast<int>(t);
            std::vector<bool> consumed(q.atoms.size(), false);
            double icost_lists = 0;
            for (size_t i = 0; i < z; ++i) {
                const AccessorChoice& c = per_edge[i][idx[i]];
                option.step.accessors.push_back(c.accessor);
                for (const size_t a : c.consumed) consumed[a] = true;
                icost_lists += c.est_len;
            }
            for (const size_t a : new_atoms)
                if (!consumed[a]) option.filter.push_back(q.atoms[a]);
            option.from_mask = mask;
            option.to_mask = to_mask;
            option.icost = est_in * icost_lists;
            option.factor = factor;
            option.step.icost = option.icost;
            option.step.est_out = est_in * factor;
            out.push_back(std::move(option));

            size_t i = z;
            bool carried = true;
            while (i > 0 && carried) {
                --i;
                carried = ++idx[i] >= per_edge[i].size();
                if (carried) idx[i] = 0;
            }
            if (carried) break;
        }
    }
}

void Optimizer::me_options(const QueryGraph& q, uint64_t mask, double est_in,
                           std::vector<ExtensionOption>& out) const {
    // Multi-Extend is triggered by equality atoms joining distinct query
    // vertices on a common property.
    std::vector<std::pair<std::string, std::pair<int, int>>> eq_atoms;
    for (const QueryAtom& atom : q.atoms) {
        if (atom.op != CmpOp::Eq || !atom.rhs_is_ref || atom.rhs_offset != 0.0) continue;
        if (atom.lhs.is_edge || atom.rhs_ref.is_edge) continue;
        if (atom.lhs.prop != atom.rhs_ref.prop) continue;
        if (atom.lhs.prop == kIdProp || atom.lhs.prop == kLabelProp) continue;
        if (atom.lhs.var == atom.rhs_ref.var) continue;
        eq_atoms.emplace_back(atom.lhs.prop,
                              std::make_pair(atom.lhs.var, atom.rhs_ref.var));
    }
    if (eq_atoms.empty()) return;

    std::vector<std::string> props;
    for (const auto& [p, _] : eq_atoms)
        if (std::find(props.begin(), props.end(), p) == props.end()) props.push_back(p);

    for (const std::string& prop : props) {
        // Connected components of the equality graph on `prop`.
        std::vector<int> comp(q.vertices.size(), -1);
        int n_comp = 0;
        for (size_t v = 0; v < q.vertices.size(); ++v) {
            if (comp[v] >= 0) continue;
            bool mentioned = false;
            for (const auto& [p, pair] : eq_atoms)
                if (p == prop &&
                    (pair.first == static_cast<int>(v) || pair.second == static_cast<int>(v)))
                    mentioned = true;
            if (!mentioned) continue;
            const int c = n_comp++;
            std::vector<int> stack{static_cast<int>(v)};
            comp[v] = c;
            while (!stack.empty()) {
                const int x = stack.back();
                stack.pop_back();
                for (const auto& [p, pair] : eq_atoms) {
                    if (p != prop) continue;
                    int other = -1;
                    if (pair.first == x) other = pair.second;
                    if (pair.second == x) other = pair.first;
                    if (other >= 0 && comp[other] < 0) {
                        comp[other] = c;
                        stack.push_back(other);
                    }
                }
            }
        }
        for (int c = 0; c < n_comp; ++c) {
            std::vector<int> unbound;
            for (size_t v = 0; v < q.vertices.size(); ++v)
                if (comp[v] == c && !((mask >> v) & 1)) unbound.push_back(static_cast<int>(v));
            if (unbound.size() < 2) continue;
            const uint32_t n_sub = 1u << unbound.size();
            for (uint32_t sub = 0; sub < n_sub; ++sub) {
                if (std::popcount(sub) < 2) continue;
                std::vector<int> targets;
                for (size_t i = 0; i < unbound.size(); ++i)
                    if ((sub >> i) & 1) targets.push_back(unbound[i]);

                uint64_t target_mask = 0;
                for (const int t : targets) target_mask |= 1ull << t;
                // The joint extension is driven by equality atoms among the
                // targets themselves: they must form a connected equality
                // subgraph (not merely share a component through bound or
                // later vertices).
                {
                    std::vector<int> root(targets.size());
                    for (size_t i = 0; i < targets.size(); ++i)
                        root[i] = static_cast<int>(i);
                    std::function<int(int)> find = [&](int x) {
                        while (root[x] != x) x = root[x] = root[root[x]];
                        return x;
                    };
                    for (const auto& [p, pair] : eq_atoms) {
                        if (p != prop) continue;
                        int a = -1, b = -1;
                        for (size_t i = 0; i < targets.size(); ++i) {
                            if (targets[i] == pair.first) a = static_cast<int>(i);
                            if (targets[i] == pair.second) b = static_cast<int>(i);
                        }
                        if (a >= 0 && b >= 0) root[find(a)] = find(b);
                    }
                    bool connected_eq = true;
                    for (size_t i = 0; i < targets.size(); ++i)
                        if (find(static_cast<int>(i)) != find(0)) connected_eq = false;
                    if (!connected_eq) continue;
                }
                // Each target connects to the bound set; no edges inside T.
                bool valid = true;
                std::vector<std::pair<int, int>> edges_to_bind; // (edge, target)
                std::vector<bool> connected(targets.size(), false);
                for (size_t e = 0; e < q.edges.size() && valid; ++e) {
                    const QueryEdge& qe = q.edges[e];
                    const bool src_t = (target_mask >> qe.src) & 1;
                    const bool dst_t = (target_mask >> qe.dst) & 1;
                    if (src_t && dst_t) {
                        valid = false;
                        break;
                    }
                    if (!src_t && !dst_t) continue;
                    const int t = src_t ? qe.src : qe.dst;
                    const int o = src_t ? qe.dst : qe.src;
                    if (!((mask >> o) & 1)) continue;
                    edges_to_bind.emplace_back(static_cast<int>(e), t);
                    for (size_t i = 0; i < targets.size(); ++i)
                        if (targets[i] == t) connected[i] = true;
                }
                if (!valid ||
                    !std::all_of(connected.begin(), connected.end(),
                                 [](bool b) { return b; }))
                    continue;
                // Every query edge at a target must reach the bound set.
                for (const auto& [e, t] : edges_to_bind) (void)e, (void)t;

                SortKey sort;
                sort.is_nbr_id = false;
                sort.subject = Subject::NbrVertex;
                sort.property = prop;
                const std::optional<SortKey> required(sort);

                std::vector<std::vector<AccessorChoice>> per_edge;
                bool feasible = true;
                std::vector<double> min_len_per_target(targets.size(), INFINITY);
                for (const auto& [e, t] : edges_to_bind) {
                    per_edge.push_back(edge_candidates(q, mask, e, t, required));
                    if (per_edge.back().empty()) {
                        feasible = false;
                        break;
                    }
                    for (size_t i = 0; i < targets.size(); ++i) {
                        if (targets[i] != t) continue;
                        for (const AccessorChoice& ch : per_edge.back())
                            min_len_per_target[i] =
                                std::min(min_len_per_target[i], ch.est_len);
                    }
                }
                if (!feasible) continue;
                const size_t z = edges_to_bind.size();
                double factor = std::pow(kIntersectionDamping,
                                         static_cast<double>(z - targets.size()));
                for (const double len : min_len_per_target) factor *= len;

                const uint64_t to_mask = mask | target_mask;
                std::vector<size_t> new_atoms;
                for (size_t i = 0; i < q.atoms.size(); ++i)
                    if (!atom_covered(q, q.atoms[i], mask) &&
                        atom_covered(q, q.atoms[i], to_mask))
                        new_atoms.push_back(i);
                // Equality atoms fully inside T are enforced by the join.
                std::vector<bool> enforced(q.atoms.size(), false);
                for (size_t i = 0; i < q.atoms.size(); ++i) {
                    const QueryAtom& a = q.atoms[i];
                    if (a.op != CmpOp::Eq || !a.rhs_is_ref || a.lhs.is_edge ||
                        a.rhs_ref.is_edge || a.lhs.prop != prop ||
                        a.rhs_ref.prop != prop || a.rhs_offset != 0.0)
                        continue;
                    if (((target_mask >> a.lhs.var) & 1) &&
                        ((target_mask >> a.rhs_ref.var) & 1))
                        enforced[i] = true;
                }

                std::vector<size_t> idx(z, 0);
                int combos = 0;
                while (combos < kMaxCombos) {
                    ++combos;
                    ExtensionOption option;
                    option.step.kind = StepKind::MultiExtend;
                    std::vector<bool> consumed = enforced;
                    double icost_lists = 0;
                    for (size_t i = 0; i < z; ++i) {
                        const AccessorChoice& ch = per_edge[i][idx[i]];
                        option.step.accessors.push_back(ch.accessor);
                        option.step.accessor_target.push_back(edges_to_bind[i].second);
                        for (const size_t a : ch.consumed) consumed[a] = true;
                        icost_lists += ch.est_len;
                    }
                    for (const size_t a : new_atoms)
                        if (!consumed[a]) option.filter.push_back(q.atoms[a]);
                    option.from_mask = mask;
                    option.to_mask = to_mask;
                    option.icost = est_in * icost_lists;
                    option.factor = factor;
                    option.step.icost = option.icost;
                    option.step.est_out = est_in * factor;
                    out.push_back(std::move(option));

                    size_t i = z;
                    bool carried = true;
                    while (i > 0 && carried) {
                        --i;
                        carried = ++idx[i] >= per_edge[i].size();
                        if (carried) idx[i] = 0;
                    }
                    if (carried) break;
                }
            }
        }
    }
}

std::vector<ExtensionOption> Optimizer::extensions(const QueryGraph& q, uint64_t mask,
                                                   double est_in) const {
    std::vector<ExtensionOption> out;
    ei_options(q, mask, est_in, out);
    me_options(q, mask, est_in, out);
    return out;
}

namespace {

struct DpState {
    bool valid = false;
    double icost = 0;
    std::vector<PlanStep> steps;
    std::string signature;
};

std::string steps_signature(const QueryGraph& q, const std::vector<PlanStep>& steps) {
    Plan p;
    p.query = q;
    p.steps = steps;
    return p.signature();
}

bool better(const DpState& a, double icost, size_t n_steps, const std::string& sig) {
    if (!a.valid) return true;
    if (icost != a.icost) return icost < a.icost;
    if (n_steps != a.steps.size()) return n_steps < a.steps.size();
    return sig < a.signature;
}

} // namespace

Optimizer::Result Optimizer::run(const QueryGraph& query) const {
    const int n = static_cast<int>(query.vertices.size());
    Result result;

    if (n > kFullDpLimit) {
        // Greedy bottom-up fallback: start from the cheapest seed, repeatedly
        // apply the cheapest extension.
        const auto all_seeds = seeds(query);
        const SeedOption* best = nullptr;
        for (const SeedOption& s : all_seeds)
            if (!best || s.est < best->est) best = &s;
        if (!best) fail(ErrorCode::NoPlan, "no seed");
        uint64_t mask = best->mask;
        double est = best->est;
        std::vector<PlanStep> steps{best->scan};
        if (!best->filter.empty()) {
            PlanStep f;
            f.kind = StepKind::Filter;
            f.filter_atoms = best->filter;
            steps.push_back(std::move(f));
        }
        double icost = 0;
        const uint64_t full = (n == 64) ? ~0ull : ((1ull << n) - 1);
        while (mask != full) {
            auto options = extensions(query, mask, est);
            if (options.empty()) fail(ErrorCode::NoPlan, "stuck during greedy planning");
            const ExtensionOption* pick = nullptr;
            for (const ExtensionOption& o : options)
                if (!pick || o.icost < pick->icost) pick = &o;
            steps.push_back(pick->step);
            if (!pick->filter.empty()) {
                PlanStep f;
                f.kind = StepKind::Filter;
                f.filter_atoms = pick->filter;
                steps.push_back(std::move(f));
            }
            icost += pick->icost;
            est *= pick->factor;
            mask = pick->to_mask;
        }
        result.plan.query = query;
        result.plan.steps = std::move(steps);
        result.plan.total_icost = icost;
        return result;
    }

    const uint64_t full = (1ull << n) - 1;
    std::vector<DpState> states(1ull << n);
    std::map<uint64_t, double>& est = result.estimates;

    for (const SeedOption& seed : seeds(query)) {
        std::vector<PlanStep> steps{seed.scan};
        if (!seed.filter.empty()) {
            PlanStep f;
            f.kind = StepKind::Filter;
            f.filter_atoms = seed.filter;
            steps.push_back(std::move(f));
        }
        const std::string sig = steps_signature(query, steps);
        DpState& s = states[seed.mask];
        if (better(s, 0.0, steps.size(), sig)) {
            s.valid = true;
            s.icost = 0.0;
            s.steps = std::move(steps);
            s.signature = sig;
        }
        auto it = est.find(seed.mask);
        if (it == est.end() || seed.est < it->second) est[seed.mask] = seed.est;
    }

    // Masks by increasing popcount; estimates of a mask are final before any
    // transition out of it is costed.
    std::vector<uint64_t> order;
    for (uint64_t m = 1; m <= full; ++m)
        if (states[m].valid || est.count(m)) order.push_back(m);
    std::sort(order.begin(), order.end(), [](uint64_t a, uint64_t b) {
        const int pa = std::popcount(a), pb = std::popcount(b);
        return pa != pb ? pa < pb : a < b;
    });

    for (int level = 1; level < n; ++level) {
        std::vector<uint64_t> masks;
        for (uint64_t m = 1; m <= full; ++m)
            if (states[m].valid && std::popcount(m) == level) masks.push_back(m);
        for (const uint64_t mask : masks) {
            const DpState& from = states[mask];
            const double est_in = est.at(mask);
            for (const ExtensionOption& option : extensions(query, mask, est_in)) {
                std::vector<PlanStep> steps = from.steps;
                steps.push_back(option.step);
                if (!option.filter.empty()) {
                    PlanStep f;
                    f.kind = StepKind::Filter;
                    f.filter_atoms = option.filter;
                    steps.push_back(std::move(f));
                }
                const double icost = from.icost + option.icost;
                const std::string sig = steps_signature(query, steps);
                DpState& to = states[option.to_mask];
                if (better(to, icost, steps.size(), sig)) {
                    to.valid = true;
                    to.icost = icost;
                    to.steps = std::move(steps);
                    to.signature = sig;
                }
                const double est_out = est_in * option.factor;
                auto it = est.find(option.to_mask);
                if (it == est.end() || est_out < it->second)
                    est[option.to_mask] = est_out;
            }
        }
    }

    if (!states[full].valid)
        fail(ErrorCode::NoPlan, "no complete plan found");
    result.plan.query = query;
    result.plan.steps = states[full].steps;
    result.plan.total_icost = states[full].icost;
    return result;
}

// --- explain ---

std::string explain_plan(const Plan& plan, bool pretty) {
    nlohmann::json ops = nlohmann::json::array();
    for (const PlanStep& step : plan.steps) {
        nlohmann::json op;
        switch (step.kind) {
        case StepKind::ScanVertex:
        case StepKind::ScanEdge: {
            op["op"] = step.kind == StepKind::ScanVertex ? "Scan" : "ScanEdge";
            op["var"] = step.kind == StepKind::ScanVertex
                            ? plan.query.vertices[step.var].name
                            : plan.query.edges[step.var].name;
            if (step.selector.fixed_id) op["fixed_id"] = *step.selector.fixed_id;
            op["predicates"] = step.selector.atoms.size();
            break;
        }
        case StepKind::Extend:
        case StepKind::MultiExtend: {
            op["op"] = step.kind == StepKind::Extend ? "ExtendIntersect" : "MultiExtend";
            nlohmann::json accs = nlohmann::json::array();
            for (size_t i = 0; i < step.accessors.size(); ++i) {
                const PlanAccessor& acc = step.accessors[i];
                nlohmann::json a;
                a["index"] = acc.index->name;
                switch (acc.index->kind) {
                case IndexKind::Primary: a["kind"] = "primary"; break;
                case IndexKind::VertexPartitioned: a["kind"] = "vertex-partitioned"; break;
                case IndexKind::EdgePartitioned: a["kind"] = "edge-partitioned"; break;
                }
                a["bound"] = acc.from_edge ? plan.query.edges[acc.bound_edge].name
                                           : plan.query.vertices[acc.bound_vertex].name;
                a["edge"] = plan.query.edges[acc.query_edge].name;
                nlohmann::json kp = nlohmann::json::array();
                for (const PropertyValue& k : acc.key_path) kp.push_back(k.to_string());
                a["key_path"] = kp;
                if (step.kind == StepKind::MultiExtend)
                    a["target"] = plan.query.vertices[step.accessor_target[i]].name;
                accs.push_back(std::move(a));
            }
            op["accessors"] = std::move(accs);
            if (step.kind == StepKind::Extend)
                op["target"] = plan.query.vertices[step.target].name;
            op["icost"] = step.icost;
            break;
        }
        case StepKind::Filter: {
            op["op"] = "Filter";
            op["predicates"] = step.filter_atoms.size();
            break;
        }
        }
        ops.push_back(std::move(op));
    }
    nlohmann::json j;
    j["operators"] = std::move(ops);
    j["icost_total"] = plan.total_icost;
    return pretty ? j.dump(2) : j.dump();
}

} // namespace quiver
