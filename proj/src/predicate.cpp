#include "quiver/predicate.hpp"

namespace quiver {

EvalContext make_1hop_context(const PropertyGraph& g, EdgeId e, Direction dir) {
    const EdgeRecord& rec = g.edge(e);
    EvalContext ctx;
    ctx.graph = &g;
    ctx.adj = e;
    ctx.src = rec.src;
    ctx.dst = rec.dst;
    ctx.nbr = dir == Direction::FW ? rec.dst : rec.src;
    ctx.bound_vertex = dir == Direction::FW ? rec.src : rec.dst;
    return ctx;
}

VertexId ep_neighbour(const PropertyGraph& g, EdgeId adj, EdgeAdjacencyKind kind) {
    const EdgeRecord& rec = g.edge(adj);
    switch (kind) {
    case EdgeAdjacencyKind::DestinationFW: return rec.dst;
    case EdgeAdjacencyKind::DestinationBW: return rec.src;
    case EdgeAdjacencyKind::SourceFW: return rec.src;
    case EdgeAdjacencyKind::SourceBW: return rec.dst;
    }
    return kNoVertex;
}

VertexId ep_owner(const PropertyGraph& g, EdgeId bound, EdgeAdjacencyKind kind) {
    const EdgeRecord& rec = g.edge(bound);
    return ep_owner_is_dst(kind) ? rec.dst : rec.src;
}

EvalContext make_2hop_context(const PropertyGraph& g, EdgeId bound, EdgeId adj,
                              EdgeAdjacencyKind kind) {
    const EdgeRecord& brec = g.edge(bound);
    EvalContext ctx;
    ctx.graph = &g;
    ctx.bound = bound;
    ctx.adj = adj;
    ctx.src = brec.src;
    ctx.dst = brec.dst;
    ctx.nbr = ep_neighbour(g, adj, kind);
    ctx.bound_vertex = ep_owner(g, bound, kind);
    return ctx;
}

PropertyValue resolve_ref(const EvalContext& ctx, const PropRef& ref) {
    const PropertyGraph& g = *ctx.graph;
    switch (ref.subject) {
    case Subject::AdjEdge:
    case Subject::BoundEdge: {
        const EdgeId e = ref.subject == Subject::AdjEdge ? ctx.adj : ctx.bound;
        if (e == kNoEdge) return PropertyValue::null();
        if (ref.property == kLabelProp)
            return PropertyValue::categorical(g.edge(e).label);
        if (ref.property == "eID")
            return PropertyValue::of_int(static_cast<int64_t>(e));
        return g.edge_property(e, ref.property);
    }
    case Subject::NbrVertex:
    case Subject::SrcVertex:
    case Subject::DstVertex:
    case Subject::BoundVertex: {
        VertexId v = kNoVertex;
        switch (ref.subject) {
        case Subject::NbrVertex: v = ctx.nbr; break;
        case Subject::SrcVertex: v = ctx.src; break;
        case Subject::DstVertex: v = ctx.dst; break;
        default: v = ctx.bound_vertex; break;
        }
        if (v == kNoVertex) return PropertyValue::null();
        if (ref.property == kLabelProp)
            return PropertyValue::categorical(g.vertex_label(v));
        if (ref.property == kIdProp)
            return PropertyValue::of_int(static_cast<int64_t>(v));
        return g.vertex_property(v, ref.property);
    }
    }
    return PropertyValue::null();
}

bool eval_atom(const EvalContext& ctx, const PredAtom& atom) {
    const PropertyValue lhs = resolve_ref(ctx, atom.lhs);
    const PropertyValue rhs =
        atom.rhs_is_ref ? resolve_ref(ctx, atom.rhs_ref) : atom.rhs_const;
    return compare_values(lhs, atom.op, rhs, atom.rhs_offset);
}

bool eval_predicate(const EvalContext& ctx, const PredicateExpr& pred) {
    for (const PredAtom& atom : pred.atoms)
        if (!eval_atom(ctx, atom)) return false;
    return true;
}

} // namespace quiver
