#pragma once

#include "quiver/index_config.hpp"

#include <optional>
#include <string>
#include <vector>

namespace quiver {

// Reference to a property of a query variable. Pseudo-properties: "ID" on
// vertices, "eID" on edges, "label" on both.
struct QueryRef {
    bool is_edge = false;
    int var = -1;
    std::string prop;

    bool operator==(const QueryRef& other) const {
        return is_edge == other.is_edge && var == other.var && prop == other.prop;
    }
};

struct QueryAtom {
    QueryRef lhs;
    CmpOp op = CmpOp::Eq;
    bool rhs_is_ref = false;
    QueryRef rhs_ref;
    PropertyValue rhs_const;
    double rhs_offset = 0.0;

    bool references(const QueryRef& ref) const {
        return lhs == ref || (rhs_is_ref && rhs_ref == ref);
    }
};

struct QueryVertex {
    std::string name;
    std::optional<uint32_t> label;
};

struct QueryEdge {
    std::string name;
    int src = -1;
    int dst = -1;
    std::optional<uint32_t> label;
};

// A conjunctive subgraph pattern: query vertices, directed query edges and
// predicate atoms. Matching is homomorphic on vertices; each query edge binds
// a distinct data edge within one match.
struct QueryGraph {
    std::vector<QueryVertex> vertices;
    std::vector<QueryEdge> edges;
    std::vector<QueryAtom> atoms;

    int vertex_var(const std::string& name) const;
    int edge_var(const std::string& name) const;
    int add_vertex(const std::string& name);
    int add_edge(const std::string& name, int src, int dst);

    // Connected, non-empty, no self-loop query edges; label fields are
    // desugared into atoms. Throws on violation.
    void finalize();

    // All vars of an atom as (is_edge, var) pairs.
    std::vector<std::pair<bool, int>> atom_vars(const QueryAtom& atom) const;
};

// A (possibly partial) assignment of query vars to graph elements.
struct MatchRow {
    std::vector<VertexId> v;
    std::vector<EdgeId> e;

    bool vertex_bound(int var) const { return v[var] != kNoVertex; }
    bool edge_bound(int var) const { return e[var] != kNoEdge; }
};

// Evaluates an atom on a match whose referenced vars are all bound.
bool eval_query_atom(const PropertyGraph& g, const QueryGraph& q, const QueryAtom& atom,
                     const MatchRow& row);
PropertyValue resolve_query_ref(const PropertyGraph& g, const QueryRef& ref,
                                const MatchRow& row);

} // namespace quiver
