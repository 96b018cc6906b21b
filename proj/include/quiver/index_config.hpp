#pragma once

#include "quiver/graph.hpp"

#include <optional>
#include <string>
#include <vector>

namespace quiver {

enum class Direction { FW, BW, FWBW };

const char* direction_name(Direction d);

// Subjects a partitioning/sort/predicate term can reference. For 1-hop views
// SrcVertex/DstVertex are the endpoints of the adjacent edge itself; for
// 2-hop views they are the endpoints of the bound edge. BoundVertex is the
// canonical "already matched endpoint" used when matching extensions against
// indexes (never written by users).
enum class Subject { AdjEdge, NbrVertex, BoundEdge, SrcVertex, DstVertex, BoundVertex };

const char* subject_name(Subject s);

// "label" and "ID" are pseudo-properties (label code / vertex id, edge id).
inline constexpr const char* kLabelProp = "label";
inline constexpr const char* kIdProp = "ID";

struct PropRef {
    Subject subject = Subject::AdjEdge;
    std::string property;

    bool operator==(const PropRef& other) const {
        return subject == other.subject && property == other.property;
    }
    std::string to_string() const;
};

struct PartitioningCriterion {
    Subject subject = Subject::AdjEdge; // AdjEdge or NbrVertex
    std::string property;

    bool operator==(const PartitioningCriterion& other) const {
        return subject == other.subject && property == other.property;
    }
};

struct SortKey {
    bool is_nbr_id = false; // v_nbr.ID, always the final key when present
    Subject subject = Subject::NbrVertex;
    std::string property;

    bool operator==(const SortKey& other) const {
        if (is_nbr_id != other.is_nbr_id) return false;
        if (is_nbr_id) return true;
        return subject == other.subject && property == other.property;
    }
    std::string to_string() const;
};

struct SortCriterion {
    std::vector<SortKey> keys;

    bool operator==(const SortCriterion& other) const { return keys == other.keys; }
};

// One atom of a flat conjunction: <lhs> <op> <constant | rhs_ref [+ offset]>.
struct PredAtom {
    PropRef lhs;
    CmpOp op = CmpOp::Eq;
    bool rhs_is_ref = false;
    PropRef rhs_ref;
    PropertyValue rhs_const;
    double rhs_offset = 0.0; // added to rhs; paper-style "x < y + a"

    bool operator==(const PredAtom& other) const;
    bool references(Subject s) const;
    std::string to_string() const;
};

struct PredicateExpr {
    std::vector<PredAtom> atoms;

    bool empty() const { return atoms.empty(); }
    bool references(Subject s) const;
    std::string to_string() const;
};

// Canonical orientation for ref-vs-ref atoms: the side with the smaller
// (subject, property) key goes left, mirroring the operator and negating the
// offset. Makes "e_b.amt > e_adj.amt" and "e_adj.amt < e_b.amt" compare equal.
PredAtom normalize_atom(PredAtom atom);

enum class IndexKind { Primary, VertexPartitioned, EdgePartitioned };

// The four bound patterns of an edge's adjacency. The kind fixes both which
// endpoint of the bound edge owns the adjacency and which primary direction
// the offsets resolve into:
//   DestinationFW: vs-[eb]->vd-[eadj]->vnbr   -> vd's FW list
//   DestinationBW: vs-[eb]->vd<-[eadj]-vnbr   -> vd's BW list
//   SourceFW:      vnbr-[eadj]->vs-[eb]->vd   -> vs's BW list
//   SourceBW:      vnbr<-[eadj]-vs-[eb]->vd   -> vs's FW list
enum class EdgeAdjacencyKind { DestinationFW, DestinationBW, SourceFW, SourceBW };

const char* edge_adjacency_kind_name(EdgeAdjacencyKind k);
// Direction of the primary index the kind's offsets point into.
Direction ep_resolution_direction(EdgeAdjacencyKind k);
// True when the designated owner vertex is the bound edge's destination.
bool ep_owner_is_dst(EdgeAdjacencyKind k);

struct IndexConfig {
    IndexKind kind = IndexKind::Primary;
    EdgeAdjacencyKind ep_kind = EdgeAdjacencyKind::DestinationFW;
    Direction direction = Direction::FW;
    std::vector<PartitioningCriterion> partitioning;
    SortCriterion sorting;
    PredicateExpr predicate;

    std::string describe() const;
};

// Partition by adjacent-edge label, sort leaf lists by neighbour id.
IndexConfig default_primary_config(Direction direction = Direction::FW);

// Checks a config against the graph's catalog; throws on violation.
// Partition keys must be categorical (or a label); nested levels are capped
// at 3; edge-partitioned predicates must touch both e_b and e_adj.
void validate_config(const IndexConfig& config, const PropertyCatalog& catalog);

} // namespace quiver
