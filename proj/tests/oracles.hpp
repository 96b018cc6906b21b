#pragma once

#include "quiver/database.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <vector>

namespace quiver::testing {

// Deterministic random property graphs: Account/Customer vertex labels, W/DD
// (+optional extra) edge labels, categorical city/acc and curr, numeric
// score/amt/date.
struct RandomGraphSpec {
    uint32_t min_vertices = 5;
    uint32_t max_vertices = 50;
    uint32_t max_edges = 400;
    uint32_t edge_labels = 2; // 2..4
    uint32_t cities = 4;
    uint32_t currencies = 3;
};

inline void register_test_schema(PropertyCatalog& catalog, const RandomGraphSpec& spec) {
    catalog.register_property("city", PropertyKind::Categorical, Attachment::Vertex);
    catalog.register_property("acc", PropertyKind::Categorical, Attachment::Vertex);
    catalog.register_property("score", PropertyKind::Int64, Attachment::Vertex);
    catalog.register_property("amt", PropertyKind::Int64, Attachment::Edge);
    catalog.register_property("curr", PropertyKind::Categorical, Attachment::Edge);
    catalog.register_property("date", PropertyKind::Int64, Attachment::Edge);
    auto& vl = catalog.vertex_labels();
    vl.intern("Account");
    vl.intern("Customer");
    auto& el = catalog.edge_labels();
    const char* names[] = {"W", "DD", "X", "Y"};
    for (uint32_t i = 0; i < spec.edge_labels; ++i) el.intern(names[i]);
    auto& city = catalog.find("city", Attachment::Vertex)->codes;
    const char* cities[] = {"Waterloo", "Toronto", "NYC", "London", "Berlin"};
    for (uint32_t i = 0; i < spec.cities; ++i) city.intern(cities[i]);
    auto& acc = catalog.find("acc", Attachment::Vertex)->codes;
    acc.intern("CQ");
    acc.intern("SV");
    auto& curr = catalog.find("curr", Attachment::Edge)->codes;
    const char* currs[] = {"USD", "EUR", "CAD"};
    for (uint32_t i = 0; i < spec.currencies; ++i) curr.intern(currs[i]);
}

inline void populate_random_graph(Database& db, std::mt19937& rng,
                                  const RandomGraphSpec& spec) {
    std::uniform_int_distribution<uint32_t> nv(spec.min_vertices, spec.max_vertices);
    const uint32_t n = nv(rng);
    std::uniform_int_distribution<uint32_t> city(0, spec.cities - 1);
    std::uniform_int_distribution<uint32_t> acc(0, 1);
    std::uniform_int_distribution<int64_t> score(0, 100);
    for (uint32_t v = 0; v < n; ++v) {
        PropertyList props;
        props.emplace_back("city", PropertyValue::categorical(city(rng)));
        props.emplace_back("acc", PropertyValue::categorical(acc(rng)));
        if (score(rng) < 90) // leave some nulls
            props.emplace_back("score", PropertyValue::of_int(score(rng)));
        db.add_vertex(0, props);
    }
    std::uniform_int_distribution<uint32_t> ne(n / 2, spec.max_edges);
    const uint32_t m = std::min(ne(rng), spec.max_edges);
    std::uniform_int_distribution<uint32_t> vd(0, n - 1);
    std::uniform_int_distribution<uint32_t> label(0, spec.edge_labels - 1);
    std::uniform_int_distribution<uint32_t> curr(0, spec.currencies - 1);
    std::uniform_int_distribution<int64_t> amt(1, 1000);
    std::uniform_int_distribution<int64_t> date(0, 365 * 5);
    for (uint32_t e = 0; e < m; ++e) {
        PropertyList props;
        props.emplace_back("amt", PropertyValue::of_int(amt(rng)));
        if (amt(rng) > 50) // occasional null currency
            props.emplace_back("curr", PropertyValue::categorical(curr(rng)));
        props.emplace_back("date", PropertyValue::of_int(date(rng)));
        db.insert_edge(vd(rng), vd(rng), label(rng), props);
    }
}

// --- brute-force oracles ---

// Edges incident to v in the given direction that pass a 1-hop predicate.
inline std::vector<EdgeId> filter_oracle_1hop(const PropertyGraph& g, VertexId v,
                                              Direction dir, const PredicateExpr& pred) {
    std::vector<EdgeId> out;
    for (EdgeId e = 0; e < g.edge_ids_end(); ++e) {
        if (!g.edge_alive(e)) continue;
        const EdgeRecord& rec = g.edge(e);
        const VertexId owner = dir == Direction::FW ? rec.src : rec.dst;
        if (owner != v) continue;
        if (eval_predicate(make_1hop_context(g, e, dir), pred)) out.push_back(e);
    }
    return out;
}

// Nested-loop 2-path join: the e_adj set of a bound edge per adjacency kind.
inline std::vector<EdgeId> join_oracle_2hop(const PropertyGraph& g, EdgeId bound,
                                            EdgeAdjacencyKind kind,
                                            const PredicateExpr& pred) {
    std::vector<EdgeId> out;
    const VertexId owner = ep_owner(g, bound, kind);
    const Direction dir = ep_resolution_direction(kind);
    for (EdgeId adj = 0; adj < g.edge_ids_end(); ++adj) {
        if (!g.edge_alive(adj)) continue;
        const EdgeRecord& rec = g.edge(adj);
        const VertexId hinge = dir == Direction::FW ? rec.src : rec.dst;
        if (hinge != owner) continue;
        if (eval_predicate(make_2hop_context(g, bound, adj, kind), pred))
            out.push_back(adj);
    }
    return out;
}

// Exhaustive backtracking enumeration of homomorphic matches with distinct
// data edges per query edge. Independent of any index machinery.
class EmbeddingOracle {
public:
    EmbeddingOracle(const PropertyGraph& g, const QueryGraph& q) : g_(&g), q_(&q) {
        // Order query edges so each one touches an already-bound vertex.
        std::vector<bool> used(q.edges.size(), false);
        std::vector<bool> bound(q.vertices.size(), false);
        if (!q.edges.empty()) {
            bound[q.edges[0].src] = true;
            for (size_t step = 0; step < q.edges.size(); ++step) {
                int pick = -1;
                for (size_t e = 0; e < q.edges.size(); ++e) {
                    if (used[e]) continue;
                    if (bound[q.edges[e].src] || bound[q.edges[e].dst]) {
                        pick = static_cast<int>(e);
                        break;
                    }
                }
                if (pick < 0) {
                    for (size_t e = 0; e < q.edges.size(); ++e)
                        if (!used[e]) pick = static_cast<int>(e);
                }
                used[pick] = true;
                order_.push_back(pick);
                bound[q.edges[pick].src] = true;
                bound[q.edges[pick].dst] = true;
            }
        }
    }

    std::vector<MatchRow> run() {
        std::vector<MatchRow> out;
        MatchRow row;
        row.v.assign(q_->vertices.size(), kNoVertex);
        row.e.assign(q_->edges.size(), kNoEdge);
        if (q_->edges.empty()) {
            for (VertexId v = 0; v < g_->vertex_count(); ++v) {
                row.v[0] = v;
                if (atoms_hold(row)) out.push_back(row);
            }
            return out;
        }
        recurse(0, row, out);
        return out;
    }

private:
    bool atoms_hold(const MatchRow& row) const {
        for (const QueryAtom& atom : q_->atoms) {
            bool ready = true;
            for (const auto& [is_edge, var] : q_->atom_vars(atom)) {
                if (is_edge ? row.e[var] == kNoEdge : row.v[var] == kNoVertex)
                    ready = false;
            }
            if (ready && !eval_query_atom(*g_, *q_, atom, row)) return false;
        }
        return true;
    }

    void recurse(size_t depth, MatchRow& row, std::vector<MatchRow>& out) {
        if (depth == order_.size()) {
            out.push_back(row);
            return;
        }
        const int qe = order_[depth];
        const QueryEdge& edge = q_->edges[qe];
        for (EdgeId e = 0; e < g_->edge_ids_end(); ++e) {
            if (!g_->edge_alive(e)) continue;
            bool dup = false;
            for (const EdgeId b : row.e)
                if (b == e) dup = true;
            if (dup) continue;
            const EdgeRecord& rec = g_->edge(e);
            if (row.v[edge.src] != kNoVertex && row.v[edge.src] != rec.src) continue;
            if (row.v[edge.dst] != kNoVertex && row.v[edge.dst] != rec.dst) continue;
            const VertexId old_s = row.v[edge.src];
            const VertexId old_d = row.v[edge.dst];
            row.v[edge.src] = rec.src;
            row.v[edge.dst] = rec.dst;
            row.e[qe] = e;
            if (atoms_hold(row)) recurse(depth + 1, row, out);
            row.v[edge.src] = old_s;
            row.v[edge.dst] = old_d;
            row.e[qe] = kNoEdge;
        }
    }

    const PropertyGraph* g_;
    const QueryGraph* q_;
    std::vector<int> order_;
};

inline std::set<std::vector<uint64_t>> row_set(const std::vector<MatchRow>& rows) {
    std::set<std::vector<uint64_t>> out;
    for (const MatchRow& row : rows) {
        std::vector<uint64_t> key;
        for (const VertexId v : row.v) key.push_back(v);
        for (const EdgeId e : row.e) key.push_back(e);
        out.insert(std::move(key));
    }
    return out;
}

inline std::set<uint64_t> edge_set(const std::vector<ListEntry>& entries) {
    std::set<uint64_t> out;
    for (const ListEntry& e : entries) out.insert(e.edge);
    return out;
}

inline std::set<uint64_t> edge_set(const std::vector<EdgeId>& edges) {
    return {edges.begin(), edges.end()};
}

// Fixture helpers: the bundled financial graph. t<k> is edge id k-1.
inline constexpr EdgeId t(int k) { return static_cast<EdgeId>(k - 1); }

inline std::string fixture_path(const char* name) {
    return std::string(QUIVER_FIXTURE_DIR) + "/" + name;
}

inline LoadReport load_fixture(Database& db) {
    PropertyCatalog& c = db.catalog();
    c.register_property("city", PropertyKind::Categorical, Attachment::Vertex);
    c.register_property("acc", PropertyKind::Categorical, Attachment::Vertex);
    c.register_property("amt", PropertyKind::Int64, Attachment::Edge);
    c.register_property("currency", PropertyKind::Categorical, Attachment::Edge);
    c.register_property("date", PropertyKind::Int64, Attachment::Edge);
    return db.load_csv(fixture_path("financial_vertices.csv"),
                       fixture_path("financial_edges.csv"));
}

// The paper-style MoneyFlow view: destination-forward adjacency of each edge,
// later date, smaller amount.
inline IndexConfig money_flow_config() {
    IndexConfig cfg;
    cfg.kind = IndexKind::EdgePartitioned;
    cfg.ep_kind = EdgeAdjacencyKind::DestinationFW;
    cfg.partitioning.push_back(PartitioningCriterion{Subject::AdjEdge, kLabelProp});
    SortKey city;
    city.subject = Subject::NbrVertex;
    city.property = "city";
    cfg.sorting.keys.push_back(city);
    PredAtom date;
    date.lhs = PropRef{Subject::BoundEdge, "date"};
    date.op = CmpOp::Lt;
    date.rhs_is_ref = true;
    date.rhs_ref = PropRef{Subject::AdjEdge, "date"};
    cfg.predicate.atoms.push_back(normalize_atom(date));
    PredAtom amt;
    amt.lhs = PropRef{Subject::AdjEdge, "amt"};
    amt.op = CmpOp::Lt;
    amt.rhs_is_ref = true;
    amt.rhs_ref = PropRef{Subject::BoundEdge, "amt"};
    cfg.predicate.atoms.push_back(normalize_atom(amt));
    return cfg;
}

} // namespace quiver::testing
