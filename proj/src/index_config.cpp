#include "quiver/index_config.hpp"

namespace quiver {

const char* direction_name(Direction d) {
    switch (d) {
    case Direction::FW: return "FW";
    case Direction::BW: return "BW";
    case Direction::FWBW: return "FW-BW";
    }
    return "?";
}

const char* subject_name(Subject s) {
    switch (s) {
    case Subject::AdjEdge: return "e_adj";
    case Subject::NbrVertex: return "v_nbr";
    case Subject::BoundEdge: return "e_b";
    case Subject::SrcVertex: return "v_s";
    case Subject::DstVertex: return "v_d";
    case Subject::BoundVertex: return "v_bound";
    }
    return "?";
}

std::string PropRef::to_string() const {
    return std::string(subject_name(subject)) + "." + property;
}

std::string SortKey::to_string() const {
    if (is_nbr_id) return "v_nbr.ID";
    return std::string(subject_name(subject)) + "." + property;
}

bool PredAtom::operator==(const PredAtom& other) const {
    if (!(lhs == other.lhs) || op != other.op || rhs_is_ref != other.rhs_is_ref ||
        rhs_offset != other.rhs_offset)
        return false;
    return rhs_is_ref ? rhs_ref == other.rhs_ref : rhs_const == other.rhs_const;
}

bool PredAtom::references(Subject s) const {
    return lhs.subject == s || (rhs_is_ref && rhs_ref.subject == s);
}

std::string PredAtom::to_string() const {
    std::string out = lhs.to_string() + cmp_op_symbol(op);
    out += rhs_is_ref ? rhs_ref.to_string() : rhs_const.to_string();
    if (rhs_offset != 0.0) out += "+" + std::to_string(rhs_offset);
    return out;
}

bool PredicateExpr::references(Subject s) const {
    for (const PredAtom& a : atoms)
        if (a.references(s)) return true;
    return false;
}

std::string PredicateExpr::to_string() const {
    std::string out;
    for (const PredAtom& a : atoms) {
        if (!out.empty()) out += " & ";
        out += a.to_string();
    }
    return out.empty() ? "true" : out;
}

PredAtom normalize_atom(PredAtom atom) {
    if (!atom.rhs_is_ref) return atom;
    const auto key = [](const PropRef& r) {
        return std::make_pair(static_cast<int>(r.subject), r.property);
    };
    if (key(atom.rhs_ref) < key(atom.lhs)) {
        std::swap(atom.lhs, atom.rhs_ref);
        switch (atom.op) {
        case CmpOp::Lt: atom.op = CmpOp::Gt; break;
        case CmpOp::Le: atom.op = CmpOp::Ge; break;
        case CmpOp::Gt: atom.op = CmpOp::Lt; break;
        case CmpOp::Ge: atom.op = CmpOp::Le; break;
        default: break;
        }
        atom.rhs_offset = -atom.rhs_offset;
    }
    return atom;
}

const char* edge_adjacency_kind_name(EdgeAdjacencyKind k) {
    switch (k) {
    case EdgeAdjacencyKind::DestinationFW: return "dest-fw";
    case EdgeAdjacencyKind::DestinationBW: return "dest-bw";
    case EdgeAdjacencyKind::SourceFW: return "src-fw";
    case EdgeAdjacencyKind::SourceBW: return "src-bw";
    }
    return "?";
}

Direction ep_resolution_direction(EdgeAdjacencyKind k) {
    switch (k) {
    case EdgeAdjacencyKind::DestinationFW: return Direction::FW;
    case EdgeAdjacencyKind::DestinationBW: return Direction::BW;
    case EdgeAdjacencyKind::SourceFW: return Direction::BW;
    case EdgeAdjacencyKind::SourceBW: return Direction::FW;
    }
    return Direction::FW;
}

bool ep_owner_is_dst(EdgeAdjacencyKind k) {
    return k == EdgeAdjacencyKind::DestinationFW || k == EdgeAdjacencyKind::DestinationBW;
}

std::string IndexConfig::describe() const {
    std::string out;
    switch (kind) {
    case IndexKind::Primary: out = "primary "; break;
    case IndexKind::VertexPartitioned: out = "vertex-partitioned "; break;
    case IndexKind::EdgePartitioned:
        out = std::string("edge-partitioned(") + edge_adjacency_kind_name(ep_kind) + ") ";
        break;
    }
    if (kind != IndexKind::EdgePartitioned) out += direction_name(direction);
    if (!partitioning.empty()) {
        out += " PARTITION BY ";
        for (size_t i = 0; i < partitioning.size(); ++i) {
            if (i) out += ", ";
            out += std::string(subject_name(partitioning[i].subject)) + "." +
                   partitioning[i].property;
        }
    }
    if (!sorting.keys.empty()) {
        out += " SORT BY ";
        for (size_t i = 0; i < sorting.keys.size(); ++i) {
            if (i) out += ", ";
            out += sorting.keys[i].to_string();
        }
    }
    if (!predicate.empty()) out += " WHERE " + predicate.to_string();
    return out;
}

IndexConfig default_primary_config(Direction direction) {
    IndexConfig config;
    config.kind = IndexKind::Primary;
    config.direction = direction;
    config.partitioning.push_back(PartitioningCriterion{Subject::AdjEdge, kLabelProp});
    SortKey nbr;
    nbr.is_nbr_id = true;
    config.sorting.keys.push_back(nbr);
    return config;
}

namespace {

void validate_ref(const PropRef& ref, const PropertyCatalog& catalog, IndexKind kind) {
    switch (ref.subject) {
    case Subject::AdjEdge:
        if (ref.property != kLabelProp && ref.property != "eID")
            catalog.require(ref.property, Attachment::Edge);
        return;
    case Subject::BoundEdge:
        if (kind != IndexKind::EdgePartitioned)
            fail(ErrorCode::InvalidOperation, "e_b only valid in 2-hop views");
        if (ref.property != kLabelProp && ref.property != "eID")
            catalog.require(ref.property, Attachment::Edge);
        return;
    case Subject::SrcVertex:
    case Subject::DstVertex:
    case Subject::NbrVertex:
        if (ref.property != kLabelProp && ref.property != kIdProp)
            catalog.require(ref.property, Attachment::Vertex);
        return;
    case Subject::BoundVertex:
        fail(ErrorCode::InvalidOperation, "internal subject in user config");
    }
}

} // namespace

void validate_config(const IndexConfig& config, const PropertyCatalog& catalog) {
    if (config.partitioning.size() > 3)
        fail(ErrorCode::InvalidOperation,
             "at most 3 nested partitioning levels are supported");
    for (const PartitioningCriterion& crit : config.partitioning) {
        if (crit.subject != Subject::AdjEdge && crit.subject != Subject::NbrVertex)
            fail(ErrorCode::InvalidOperation,
                 "partition keys must reference e_adj or v_nbr");
        if (crit.property == kLabelProp) continue;
        const Attachment attach =
            crit.subject == Subject::AdjEdge ? Attachment::Edge : Attachment::Vertex;
        const PropertyDef& def = catalog.require(crit.property, attach);
        if (def.kind != PropertyKind::Categorical)
            fail(ErrorCode::NonCategoricalPartitionKey,
                 "partition key '" + crit.property + "' has kind " +
                     property_kind_name(def.kind));
    }
    for (size_t i = 0; i < config.sorting.keys.size(); ++i) {
        const SortKey& key = config.sorting.keys[i];
        if (key.is_nbr_id) {
            if (i + 1 != config.sorting.keys.size())
                fail(ErrorCode::InvalidOperation, "v_nbr.ID must be the final sort key");
            continue;
        }
        if (key.subject != Subject::AdjEdge && key.subject != Subject::NbrVertex)
            fail(ErrorCode::InvalidOperation, "sort keys must reference e_adj or v_nbr");
        const Attachment attach =
            key.subject == Subject::AdjEdge ? Attachment::Edge : Attachment::Vertex;
        if (key.property != kLabelProp) catalog.require(key.property, attach);
    }
    for (const PredAtom& atom : config.predicate.atoms) {
        validate_ref(atom.lhs, catalog, config.kind);
        if (atom.rhs_is_ref) validate_ref(atom.rhs_ref, catalog, config.kind);
    }
    switch (config.kind) {
    case IndexKind::Primary:
        if (!config.predicate.empty())
            fail(ErrorCode::InvalidOperation, "primary indexes take no predicate");
        break;
    case IndexKind::VertexPartitioned:
        if (config.predicate.references(Subject::BoundEdge))
            fail(ErrorCode::InvalidOperation, "e_b only valid in 2-hop views");
        break;
    case IndexKind::EdgePartitioned:
        if (!config.predicate.references(Subject::BoundEdge) ||
            !config.predicate.references(Subject::AdjEdge))
            fail(ErrorCode::SingleEdgePredicate,
                 "2-hop view predicates must access both e_b and e_adj");
        break;
    }
}

} // namespace quiver
