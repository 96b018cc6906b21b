#include "quiver/query_graph.hpp"

#include <algorithm>

namespace quiver {

int QueryGraph::vertex_var(const std::string& name) const {
    for (size_t i = 0; i < vertices.size(); ++i)
        if (vertices[i].name == name) return static_cast<int>(i);
    return -1;
}

int QueryGraph::edge_var(const std::string& name) const {
    for (size_t i = 0; i < edges.size(); ++i)
        if (edges[i].name == name) return static_cast<int>(i);
    return -1;
}

int QueryGraph::add_vertex(const std::string& name) {
    const int existing = vertex_var(name);
    if (existing >= 0) return existing;
    vertices.push_back(QueryVertex{name, std::nullopt});
    return static_cast<int>(vertices.size()) - 1;
}

int QueryGraph::add_edge(const std::string& name, int src, int dst) {
    edges.push_back(QueryEdge{name, src, dst, std::nullopt});
    return static_cast<int>(edges.size()) - 1;
}

void QueryGraph::finalize() {
    if (vertices.empty())
        fail(ErrorCode::NoPlan, "query has no vertices");
    for (size_t i = 0; i < edges.size(); ++i) {
        QueryEdge& e = edges[i];
        if (e.src < 0 || e.dst < 0 || e.src >= static_cast<int>(vertices.size()) ||
            e.dst >= static_cast<int>(vertices.size()))
            fail(ErrorCode::NoPlan, "query edge endpoints out of range");
        if (e.src == e.dst)
            fail(ErrorCode::NoPlan, "self-loop query edges are not supported");
        if (e.label) {
            QueryAtom atom;
            atom.lhs = QueryRef{true, static_cast<int>(i), kLabelProp};
            atom.op = CmpOp::Eq;
            atom.rhs_const = PropertyValue::categorical(*e.label);
            atoms.push_back(atom);
            e.label.reset();
        }
    }
    for (size_t i = 0; i < vertices.size(); ++i) {
        QueryVertex& v = vertices[i];
        if (v.label) {
            QueryAtom atom;
            atom.lhs = QueryRef{false, static_cast<int>(i), kLabelProp};
            atom.op = CmpOp::Eq;
            atom.rhs_const = PropertyValue::categorical(*v.label);
            atoms.push_back(atom);
            v.label.reset();
        }
    }
    // Connectivity over query vertices.
    if (vertices.size() > 1) {
        std::vector<bool> seen(vertices.size(), false);
        std::vector<int> stack{0};
        seen[0] = true;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (const QueryEdge& e : edges) {
                const int other = e.src == v ? e.dst : (e.dst == v ? e.src : -1);
                if (other >= 0 && !seen[other]) {
                    seen[other] = true;
                    stack.push_back(other);
                }
            }
        }
        if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
            fail(ErrorCode::NoPlan, "query pattern is disconnected");
    }
}

std::vector<std::pair<bool, int>> QueryGraph::atom_vars(const QueryAtom& atom) const {
    std::vector<std::pair<bool, int>> vars{{atom.lhs.is_edge, atom.lhs.var}};
    if (atom.rhs_is_ref) {
        const std::pair<bool, int> r{atom.rhs_ref.is_edge, atom.rhs_ref.var};
        if (vars[0] != r) vars.push_back(r);
    }
    return vars;
}

PropertyValue resolve_query_ref(const PropertyGraph& g, const QueryRef& ref,
                                const MatchRow& row) {
    if (ref.is_edge) {
        const EdgeId e = row.e[ref.var];
        if (e == kNoEdge) fail(ErrorCode::UnboundVariable, "edge var");
        if (ref.prop == "eID") return PropertyValue::of_int(static_cast<int64_t>(e));
        if (ref.prop == kLabelProp) return PropertyValue::categorical(g.edge(e).label);
        return g.edge_property(e, ref.prop);
    }
    const VertexId v = row.v[ref.var];
    if (v == kNoVertex) fail(ErrorCode::UnboundVariable, "vertex var");
    if (ref.prop == kIdProp) return PropertyValue::of_int(static_cast<int64_t>(v));
    if (ref.prop == kLabelProp) return PropertyValue::categorical(g.vertex_label(v));
    return g.vertex_property(v, ref.prop);
}

bool eval_query_atom(const PropertyGraph& g, const QueryGraph& q, const QueryAtom& atom,
                     const MatchRow& row) {
    (void)q;
    const PropertyValue lhs = resolve_query_ref(g, atom.lhs, row);
    const PropertyValue rhs =
        atom.rhs_is_ref ? resolve_query_ref(g, atom.rhs_ref, row) : atom.rhs_const;
    return compare_values(lhs, atom.op, rhs, atom.rhs_offset);
}

} // namespace quiver
