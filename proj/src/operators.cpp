#include "quiver/operators.hpp"

#include <algorithm>

namespace quiver {

std::string PlanAccessor::describe(const QueryGraph& q) const {
    std::string out = index ? index->name : "?";
    out += "(";
    out += from_edge ? q.edges[bound_edge].name : q.vertices[bound_vertex].name;
    if (!from_edge) out += dir == Direction::FW ? "->" : "<-";
    out += ":" + q.edges[query_edge].name;
    for (const PropertyValue& key : key_path) out += "," + key.to_string();
    out += ")";
    return out;
}

std::vector<int> PlanStep::distinct_targets() const {
    std::vector<int> t = accessor_target;
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
}

std::string Plan::signature() const {
    std::string sig;
    for (const PlanStep& step : steps) {
        switch (step.kind) {
        case StepKind::ScanVertex:
            sig += "Scan(" + query.vertices[step.var].name + ")";
            break;
        case StepKind::ScanEdge:
            sig += "ScanEdge(" + query.edges[step.var].name + ")";
            break;
        case StepKind::Extend: {
            sig += "EI[" + query.vertices[step.target].name + "<-";
            for (const PlanAccessor& acc : step.accessors) sig += acc.describe(query);
            sig += "]";
            break;
        }
        case StepKind::MultiExtend: {
            sig += "ME[";
            for (size_t i = 0; i < step.accessors.size(); ++i) {
                sig += query.vertices[step.accessor_target[i]].name + "<-" +
                       step.accessors[i].describe(query);
            }
            sig += "]";
            break;
        }
        case StepKind::Filter:
            sig += "Filter(" + std::to_string(step.filter_atoms.size()) + ")";
            break;
        }
        sig += ";";
    }
    return sig;
}

void collect_accessor(const PropertyGraph& graph, const PlanAccessor& acc,
                      const MatchRow& row, std::vector<ListEntry>& out) {
    (void)graph;
    if (acc.from_edge) {
        acc.index->ep->collect_edge(row.e[acc.bound_edge], acc.key_path,
                                    ListOrder::BySortKey, out);
        return;
    }
    const VertexId owner = row.v[acc.bound_vertex];
    if (acc.index->kind == IndexKind::Primary)
        acc.index->primary->collect(owner, acc.key_path, ListOrder::BySortKey, out);
    else
        acc.index->vp->collect(owner, acc.key_path, ListOrder::BySortKey, out);
}

PropertyValue accessor_sort_value(const PropertyGraph& graph, const PlanAccessor& acc,
                                  const MatchRow& row, const ListEntry& entry) {
    const SortKey key = acc.index->leading_sort();
    if (key.is_nbr_id) return PropertyValue::of_int(static_cast<int64_t>(entry.nbr));
    EvalContext ctx =
        acc.from_edge
            ? make_2hop_context(graph, row.e[acc.bound_edge], entry.edge,
                                acc.index->ep_kind)
            : make_1hop_context(graph, entry.edge, acc.dir);
    return resolve_ref(ctx, PropRef{key.subject, key.property});
}

namespace {

bool edge_already_bound(const MatchRow& row, EdgeId e) {
    for (const EdgeId bound : row.e)
        if (bound == e) return true;
    return false;
}

} // namespace

// --- operator implementations ---

struct Executor::OpBase {
    virtual ~OpBase() = default;
    virtual bool next(MatchRow& out) = 0;
};

struct Executor::ScanVertexOp final : Executor::OpBase {
    const PropertyGraph* g;
    const Plan* plan;
    const PlanStep* step;
    VertexId cursor = 0;

    ScanVertexOp(const PropertyGraph& graph, const Plan& p, const PlanStep& s)
        : g(&graph), plan(&p), step(&s) {}

    bool next(MatchRow& out) override {
        MatchRow row;
        row.v.assign(plan->query.vertices.size(), kNoVertex);
        row.e.assign(plan->query.edges.size(), kNoEdge);
        while (cursor < g->vertex_count()) {
            const VertexId v = cursor++;
            if (step->selector.fixed_id && *step->selector.fixed_id != v) continue;
            row.v[step->var] = v;
            bool ok = true;
            for (const QueryAtom& atom : step->selector.atoms)
                if (!eval_query_atom(*g, plan->query, atom, row)) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            out = row;
            return true;
        }
        return false;
    }
};

struct Executor::ScanEdgeOp final : Executor::OpBase {
    const PropertyGraph* g;
    const Plan* plan;
    const PlanStep* step;
    bool done = false;

    ScanEdgeOp(const PropertyGraph& graph, const Plan& p, const PlanStep& s)
        : g(&graph), plan(&p), step(&s) {}

    bool next(MatchRow& out) override {
        if (done) return false;
        done = true;
        if (!step->selector.fixed_id) return false;
        const EdgeId e = *step->selector.fixed_id;
        if (!g->edge_alive(e)) return false;
        MatchRow row;
        row.v.assign(plan->query.vertices.size(), kNoVertex);
        row.e.assign(plan->query.edges.size(), kNoEdge);
        const QueryEdge& qe = plan->query.edges[step->var];
        const EdgeRecord& rec = g->edge(e);
        row.e[step->var] = e;
        row.v[qe.src] = rec.src;
        row.v[qe.dst] = rec.dst;
        for (const QueryAtom& atom : step->selector.atoms)
            if (!eval_query_atom(*g, plan->query, atom, row)) return false;
        out = row;
        return true;
    }
};

struct Executor::ExtendOp final : Executor::OpBase {
    const PropertyGraph* g;
    const Plan* plan;
    const PlanStep* step;
    OpBase* child;
    ExecStats* stats;
    std::vector<MatchRow> pending;
    size_t cursor = 0;

    ExtendOp(const PropertyGraph& graph, const Plan& p, const PlanStep& s, OpBase* c,
             ExecStats* st)
        : g(&graph), plan(&p), step(&s), child(c), stats(st) {}

    void emit(const MatchRow& in, VertexId target,
              const std::vector<const ListEntry*>& picks) {
        // Each query edge binds a distinct data edge within one match.
        for (size_t i = 0; i < picks.size(); ++i) {
            if (edge_already_bound(in, picks[i]->edge)) return;
            for (size_t j = i + 1; j < picks.size(); ++j)
                if (picks[i]->edge == picks[j]->edge) return;
        }
        MatchRow row = in;
        row.v[step->target] = target;
        for (size_t i = 0; i < picks.size(); ++i)
            row.e[step->accessors[i].query_edge] = picks[i]->edge;
        pending.push_back(std::move(row));
    }

    void extend(const MatchRow& in) {
        const size_t z = step->accessors.size();
        std::vector<std::vector<ListEntry>> lists(z);
        for (size_t i = 0; i < z; ++i) {
            collect_accessor(*g, step->accessors[i], in, lists[i]);
            stats->edges_scanned += lists[i].size();
        }
        if (z == 1) {
            std::vector<const ListEntry*> picks(1);
            for (const ListEntry& entry : lists[0]) {
                picks[0] = &entry;
                emit(in, entry.nbr, picks);
            }
            return;
        }
        // z-way sorted intersection on neighbour ids; every accessor of an
        // intersection is neighbour-id ordered (planner contract). The merge
        // touches each list element at most once.
        std::vector<size_t> pos(z, 0);
        std::vector<std::pair<size_t, size_t>> runs(z);
        while (true) {
            // Align all heads on a common neighbour.
            uint32_t nbr = 0;
            bool aligned = false;
            while (!aligned) {
                nbr = 0;
                for (size_t i = 0; i < z; ++i) {
                    if (pos[i] >= lists[i].size()) return;
                    nbr = std::max(nbr, lists[i][pos[i]].nbr);
                }
                aligned = true;
                for (size_t i = 0; i < z; ++i) {
                    while (pos[i] < lists[i].size() && lists[i][pos[i]].nbr < nbr)
                        ++pos[i];
                    if (pos[i] >= lists[i].size()) return;
                    if (lists[i][pos[i]].nbr != nbr) aligned = false;
                }
            }
            for (size_t i = 0; i < z; ++i) {
                const size_t begin = pos[i];
                while (pos[i] < lists[i].size() && lists[i][pos[i]].nbr == nbr) ++pos[i];
                runs[i] = {begin, pos[i]};
            }
            // Cross product over parallel edges within the runs.
            std::vector<const ListEntry*> picks(z);
            std::vector<size_t> idx(z);
            for (size_t i = 0; i < z; ++i) idx[i] = runs[i].first;
            bool more = true;
            while (more) {
                for (size_t i = 0; i < z; ++i) picks[i] = &lists[i][idx[i]];
                emit(in, nbr, picks);
                size_t i = z;
                bool carried = true;
                while (i > 0 && carried) {
                    --i;
                    carried = ++idx[i] >= runs[i].second;
                    if (carried) idx[i] = runs[i].first;
                }
                more = !carried;
            }
        }
    }

    bool next(MatchRow& out) override {
        while (cursor >= pending.size()) {
            pending.clear();
            cursor = 0;
            MatchRow in;
            if (!child->next(in)) return false;
            extend(in);
        }
        out = pending[cursor++];
        return true;
    }
};

struct Executor::MultiExtendOp final : Executor::OpBase {
    const PropertyGraph* g;
    const Plan* plan;
    const PlanStep* step;
    OpBase* child;
    ExecStats* stats;
    std::vector<MatchRow> pending;
    size_t cursor = 0;

    MultiExtendOp(const PropertyGraph& graph, const Plan& p, const PlanStep& s, OpBase* c,
                  ExecStats* st)
        : g(&graph), plan(&p), step(&s), child(c), stats(st) {}

    struct Candidate {
        VertexId vertex;
        std::vector<std::pair<int, EdgeId>> edges; // (query edge, data edge)
    };

    // Candidates of one target at one sort-key value: the cross product of
    // its accessors' run entries, neighbour-id intersected when the target is
    // fed by several accessors.
    static void target_candidates(const std::vector<std::vector<ListEntry>>& runs,
                                  const std::vector<int>& query_edges,
                                  std::vector<Candidate>& out) {
        out.clear();
        // Entries per accessor grouped by neighbour.
        std::vector<std::vector<ListEntry>> sorted = runs;
        for (auto& run : sorted)
            std::sort(run.begin(), run.end(), [](const ListEntry& a, const ListEntry& b) {
                if (a.nbr != b.nbr) return a.nbr < b.nbr;
                return a.edge < b.edge;
            });
        std::vector<size_t> pos(sorted.size(), 0);
        while (true) {
            uint32_t nbr = 0;
            bool ok = true;
            for (size_t i = 0; i < sorted.size(); ++i) {
                if (pos[i] >= sorted[i].size()) return;
                nbr = std::max(nbr, sorted[i][pos[i]].nbr);
            }
            for (size_t i = 0; i < sorted.size() && ok; ++i) {
                while (pos[i] < sorted[i].size() && sorted[i][pos[i]].nbr < nbr) ++pos[i];
                if (pos[i] >= sorted[i].size()) return;
                if (sorted[i][pos[i]].nbr != nbr) ok = false;
            }
            if (!ok) continue;
            std::vector<std::pair<size_t, size_t>> bounds(sorted.size());
            for (size_t i = 0; i < sorted.size(); ++i) {
                const size_t begin = pos[i];
                while (pos[i] < sorted[i].size() && sorted[i][pos[i]].nbr == nbr) ++pos[i];
                bounds[i] = {begin, pos[i]};
            }
            std::vector<size_t> idx(sorted.size());
            for (size_t i = 0; i < sorted.size(); ++i) idx[i] = bounds[i].first;
            while (true) {
                Candidate c;
                c.vertex = nbr;
                for (size_t i = 0; i < sorted.size(); ++i)
                    c.edges.emplace_back(query_edges[i], sorted[i][idx[i]].edge);
                out.push_back(std::move(c));
                size_t i = sorted.size();
                bool carried = true;
                while (i > 0 && carried) {
                    --i;
                    carried = ++idx[i] >= bounds[i].second;
                    if (carried) idx[i] = bounds[i].first;
                }
                if (carried) break;
            }
        }
    }

    void emit_products(const MatchRow& in,
                       const std::vector<std::vector<Candidate>>& per_target,
                       const std::vector<int>& target_vars) {
        std::vector<size_t> idx(per_target.size(), 0);
        while (true) {
            MatchRow row = in;
            bool ok = true;
            std::vector<EdgeId> new_edges;
            for (size_t t = 0; t < per_target.size() && ok; ++t) {
                const Candidate& c = per_target[t][idx[t]];
                row.v[target_vars[t]] = c.vertex;
                for (const auto& [qe, de] : c.edges) {
                    if (edge_already_bound(in, de) ||
                        std::find(new_edges.begin(), new_edges.end(), de) !=
                            new_edges.end()) {
                        ok = false;
                        break;
                    }
                    new_edges.push_back(de);
                    row.e[qe] = de;
                }
            }
            if (ok) pending.push_back(std::move(row));
            size_t t = per_target.size();
            bool carried = true;
            while (t > 0 && carried) {
                --t;
                carried = ++idx[t] >= per_target[t].size();
                if (carried) idx[t] = 0;
            }
            if (carried) break;
        }
    }

    void extend(const MatchRow& in) {
        const size_t z = step->accessors.size();
        std::vector<std::vector<ListEntry>> lists(z);
        std::vector<std::vector<PropertyValue>> keys(z);
        for (size_t i = 0; i < z; ++i) {
            collect_accessor(*g, step->accessors[i], in, lists[i]);
            stats->edges_scanned += lists[i].size();
            keys[i].reserve(lists[i].size());
            for (const ListEntry& entry : lists[i])
                keys[i].push_back(accessor_sort_value(*g, step->accessors[i], in, entry));
        }
        const std::vector<int> target_vars = step->distinct_targets();

        // Sort-merge on the shared sort property across all z lists. Null
        // keys sort last and never join.
        std::vector<size_t> pos(z, 0);
        while (true) {
            const PropertyValue* current = nullptr;
            bool aligned = true;
            for (size_t i = 0; i < z; ++i) {
                if (pos[i] >= lists[i].size()) return;
                if (keys[i][pos[i]].is_null()) return;
                if (!current || order_compare(keys[i][pos[i]], *current) > 0)
                    current = &keys[i][pos[i]];
            }
            const PropertyValue value = *current;
            for (size_t i = 0; i < z; ++i) {
                while (pos[i] < lists[i].size() &&
                       order_compare(keys[i][pos[i]], value) < 0)
                    ++pos[i];
                if (pos[i] >= lists[i].size()) return;
                if (keys[i][pos[i]].is_null()) return;
                if (order_compare(keys[i][pos[i]], value) != 0) aligned = false;
            }
            if (!aligned) continue;

            // Slice out the per-accessor runs at this value.
            std::vector<std::vector<ListEntry>> runs(z);
            for (size_t i = 0; i < z; ++i) {
                while (pos[i] < lists[i].size() &&
                       order_compare(keys[i][pos[i]], value) == 0) {
                    runs[i].push_back(lists[i][pos[i]]);
                    ++pos[i];
                }
            }
            std::vector<std::vector<Candidate>> per_target(target_vars.size());
            bool all_nonempty = true;
            for (size_t t = 0; t < target_vars.size(); ++t) {
                std::vector<std::vector<ListEntry>> target_runs;
                std::vector<int> target_edges;
                for (size_t i = 0; i < z; ++i) {
                    if (step->accessor_target[i] != target_vars[t]) continue;
                    target_runs.push_back(runs[i]);
                    target_edges.push_back(step->accessors[i].query_edge);
                }
                target_candidates(target_runs, target_edges, per_target[t]);
                if (per_target[t].empty()) {
                    all_nonempty = false;
                    break;
                }
            }
            if (all_nonempty) emit_products(in, per_target, target_vars);
        }
    }

    bool next(MatchRow& out) override {
        while (cursor >= pending.size()) {
            pending.clear();
            cursor = 0;
            MatchRow in;
            if (!child->next(in)) return false;
            extend(in);
        }
        out = pending[cursor++];
        return true;
    }
};

struct Executor::FilterOp final : Executor::OpBase {
    const PropertyGraph* g;
    const Plan* plan;
    const PlanStep* step;
    OpBase* child;

    FilterOp(const PropertyGraph& graph, const Plan& p, const PlanStep& s, OpBase* c)
        : g(&graph), plan(&p), step(&s), child(c) {}

    bool next(MatchRow& out) override {
        MatchRow row;
        while (child->next(row)) {
            bool ok = true;
            for (const QueryAtom& atom : step->filter_atoms)
                if (!eval_query_atom(*g, plan->query, atom, row)) {
                    ok = false;
                    break;
                }
            if (ok) {
                out = row;
                return true;
            }
        }
        return false;
    }
};

Executor::Executor(const PropertyGraph& graph, const Plan& plan)
    : graph_(&graph), plan_(&plan) {
    OpBase* prev = nullptr;
    for (const PlanStep& step : plan.steps) {
        switch (step.kind) {
        case StepKind::ScanVertex:
            ops_.push_back(std::make_unique<ScanVertexOp>(graph, plan, step));
            break;
        case StepKind::ScanEdge:
            ops_.push_back(std::make_unique<ScanEdgeOp>(graph, plan, step));
            break;
        case StepKind::Extend:
            ops_.push_back(std::make_unique<ExtendOp>(graph, plan, step, prev, &stats_));
            break;
        case StepKind::MultiExtend:
            ops_.push_back(
                std::make_unique<MultiExtendOp>(graph, plan, step, prev, &stats_));
            break;
        case StepKind::Filter:
            ops_.push_back(std::make_unique<FilterOp>(graph, plan, step, prev));
            break;
        }
        prev = ops_.back().get();
    }
}

Executor::~Executor() = default;

bool Executor::next(MatchRow& out) {
    if (ops_.empty()) return false;
    if (!ops_.back()->next(out)) return false;
    ++stats_.matches;
    return true;
}

std::vector<MatchRow> Executor::all() {
    std::vector<MatchRow> rows;
    MatchRow row;
    while (next(row)) rows.push_back(row);
    return rows;
}

} // namespace quiver
