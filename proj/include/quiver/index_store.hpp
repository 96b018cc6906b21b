#pragma once

#include "quiver/edge_index.hpp"
#include "quiver/vertex_index.hpp"

#include <memory>

namespace quiver {

// Metadata (plus handle) of one built index.
struct IndexDescriptor {
    std::string name;
    IndexKind kind = IndexKind::Primary;
    Direction direction = Direction::FW;                          // primary / VP
    EdgeAdjacencyKind ep_kind = EdgeAdjacencyKind::DestinationFW; // EP
    IndexConfig config;
    PrimaryIndex* primary = nullptr;
    VertexPartitionedIndex* vp = nullptr;
    EdgePartitionedIndex* ep = nullptr;

    // Index predicate rewritten into the matching vocabulary (v_s/v_d of a
    // 1-hop view become the bound endpoint / the neighbour).
    PredicateExpr canonical_predicate() const;
    // Leading sort key; an index without explicit keys is neighbour-id
    // ordered by the tie-break.
    SortKey leading_sort() const;
    // True when every leaf list is in plain neighbour-id order.
    bool nbr_id_sorted() const;
};

// What a join operator needs from one adjacency access: the extension's
// predicate (canonical vocabulary), the atoms already guaranteed on the bound
// side, and an optional sort requirement for intersections.
struct ExtensionQuery {
    bool edge_partitioned = false;
    Direction direction = Direction::FW;                          // vertex extensions
    EdgeAdjacencyKind ep_kind = EdgeAdjacencyKind::DestinationFW; // edge extensions
    PredicateExpr p_q;
    PredicateExpr context;
    std::optional<SortKey> required_sort;
};

struct IndexMatch {
    const IndexDescriptor* descriptor = nullptr;
    std::vector<PropertyValue> key_path; // partition keys fixed by p_q equalities
    PredicateExpr residual;              // p_q atoms not guaranteed by the index
    std::vector<size_t> residual_idx;    // their indices within p_q
};

struct SubsumeResult {
    bool subsumed = false;
    PredicateExpr residual;
};

// True when satisfying `query` guarantees `index` (exact atom match, or a
// constant-range atom on the same property that is at least as selective).
bool atom_implies(const PredAtom& query, const PredAtom& index);

// Conjunctive + range predicate subsumption: every index atom must be implied
// by some query atom; the residual keeps the query atoms not exactly matched.
SubsumeResult subsumes(const PredicateExpr& index_pred, const PredicateExpr& query_pred);

// Registry of index metadata.
class IndexStore {
public:
    void register_descriptor(IndexDescriptor descriptor);
    void unregister_descriptor(const std::string& name);
    const IndexDescriptor* find(const std::string& name) const;
    const std::vector<IndexDescriptor>& descriptors() const { return descriptors_; }
    std::vector<IndexDescriptor>& descriptors_mutable() { return descriptors_; }

    // All indexes usable for one extension, primary first. Every returned
    // match's view at its key path is a superset of the extension's
    // selection, with `residual` restoring exact semantics.
    std::vector<IndexMatch> find_indexes(const ExtensionQuery& ext) const;

private:
    std::vector<IndexDescriptor> descriptors_;
};

} // namespace quiver
