#pragma once

#include "quiver/index_config.hpp"

namespace quiver {

// Concrete bindings for the subjects a view predicate can mention. For 1-hop
// views src/dst are the adjacent edge's endpoints; for 2-hop views they are
// the bound edge's endpoints and `bound` is set.
struct EvalContext {
    const PropertyGraph* graph = nullptr;
    EdgeId adj = kNoEdge;
    VertexId nbr = kNoVertex;
    EdgeId bound = kNoEdge;
    VertexId src = kNoVertex;
    VertexId dst = kNoVertex;
    VertexId bound_vertex = kNoVertex;
};

EvalContext make_1hop_context(const PropertyGraph& g, EdgeId e, Direction dir);
EvalContext make_2hop_context(const PropertyGraph& g, EdgeId bound, EdgeId adj,
                              EdgeAdjacencyKind kind);

PropertyValue resolve_ref(const EvalContext& ctx, const PropRef& ref);
bool eval_atom(const EvalContext& ctx, const PredAtom& atom);
bool eval_predicate(const EvalContext& ctx, const PredicateExpr& pred);

// Neighbour vertex of `adj` as seen from a bound edge, per adjacency kind.
VertexId ep_neighbour(const PropertyGraph& g, EdgeId adj, EdgeAdjacencyKind kind);
// Owner vertex of the bound edge's adjacency per kind (v_d or v_s).
VertexId ep_owner(const PropertyGraph& g, EdgeId bound, EdgeAdjacencyKind kind);

} // namespace quiver
