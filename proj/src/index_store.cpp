#include "quiver/index_store.hpp"

#include <algorithm>
#include <cmath>

namespace quiver {

namespace {

Subject canonical_subject(Subject s, Direction dir, IndexKind kind) {
    if (kind == IndexKind::EdgePartitioned) return s; // already canonical
    if (s == Subject::SrcVertex)
        return dir == Direction::FW ? Subject::BoundVertex : Subject::NbrVertex;
    if (s == Subject::DstVertex)
        return dir == Direction::FW ? Subject::NbrVertex : Subject::BoundVertex;
    return s;
}

} // namespace

PredicateExpr IndexDescriptor::canonical_predicate() const {
    PredicateExpr out = config.predicate;
    for (PredAtom& atom : out.atoms) {
        atom.lhs.subject = canonical_subject(atom.lhs.subject, direction, kind);
        if (atom.rhs_is_ref)
            atom.rhs_ref.subject = canonical_subject(atom.rhs_ref.subject, direction, kind);
        atom = normalize_atom(atom);
    }
    return out;
}

SortKey IndexDescriptor::leading_sort() const {
    if (config.sorting.keys.empty()) {
        SortKey key;
        key.is_nbr_id = true;
        return key;
    }
    return config.sorting.keys.front();
}

bool IndexDescriptor::nbr_id_sorted() const {
    for (const SortKey& key : config.sorting.keys)
        if (!key.is_nbr_id) return false;
    return true;
}

namespace {

bool range_interval(const PredAtom& atom, double& lo, double& hi, bool& lo_open,
                    bool& hi_open) {
    if (atom.rhs_is_ref || atom.rhs_offset != 0.0) return false;
    const PropertyValue& c = atom.rhs_const;
    if (c.is_null() || c.tag() == PropertyValue::Tag::Categorical) return false;
    const double v = c.as_number();
    lo = -INFINITY;
    hi = INFINITY;
    lo_open = hi_open = false;
    switch (atom.op) {
    case CmpOp::Eq: lo = hi = v; return true;
    case CmpOp::Lt: hi = v; hi_open = true; return true;
    case CmpOp::Le: hi = v; return true;
    case CmpOp::Gt: lo = v; lo_open = true; return true;
    case CmpOp::Ge: lo = v; return true;
    case CmpOp::Ne: return false;
    }
    return false;
}

} // namespace

bool atom_implies(const PredAtom& query, const PredAtom& index) {
    if (query == index) return true;
    if (!(query.lhs == index.lhs)) return false;
    // Range subsumption on constants: the query interval must lie inside the
    // index interval.
    double qlo, qhi, ilo, ihi;
    bool qlo_open, qhi_open, ilo_open, ihi_open;
    if (!range_interval(query, qlo, qhi, qlo_open, qhi_open)) return false;
    if (!range_interval(index, ilo, ihi, ilo_open, ihi_open)) return false;
    const bool lo_ok = ilo < qlo || (ilo == qlo && (!ilo_open || qlo_open));
    const bool hi_ok = ihi > qhi || (ihi == qhi && (!ihi_open || qhi_open));
    return lo_ok && hi_ok;
}

SubsumeResult subsumes(const PredicateExpr& index_pred, const PredicateExpr& query_pred) {
    SubsumeResult result;
    std::vector<bool> exact(query_pred.atoms.size(), false);
    for (const PredAtom& ia : index_pred.atoms) {
        bool matched = false;
        for (size_t i = 0; i < query_pred.atoms.size(); ++i) {
            if (query_pred.atoms[i] == ia) {
                exact[i] = true;
                matched = true;
                break;
            }
        }
        if (!matched) {
            for (const PredAtom& qa : query_pred.atoms) {
                if (atom_implies(qa, ia)) {
                    matched = true;
                    break;
                }
            }
        }
        if (!matched) return result; // the index misses rows the query needs
    }
    result.subsumed = true;
    for (size_t i = 0; i < query_pred.atoms.size(); ++i)
        if (!exact[i]) result.residual.atoms.push_back(query_pred.atoms[i]);
    return result;
}

void IndexStore::register_descriptor(IndexDescriptor descriptor) {
    for (const IndexDescriptor& d : descriptors_)
        if (d.name == descriptor.name)
            fail(ErrorCode::DuplicateName, descriptor.name);
    descriptors_.push_back(std::move(descriptor));
}

void IndexStore::unregister_descriptor(const std::string& name) {
    for (size_t i = 0; i < descriptors_.size(); ++i) {
        if (descriptors_[i].name == name) {
            descriptors_.erase(descriptors_.begin() + static_cast<ptrdiff_t>(i));
            return;
        }
    }
    fail(ErrorCode::UnknownIndex, name);
}

const IndexDescriptor* IndexStore::find(const std::string& name) const {
    for (const IndexDescriptor& d : descriptors_)
        if (d.name == name) return &d;
    return nullptr;
}

std::vector<IndexMatch> IndexStore::find_indexes(const ExtensionQuery& ext) const {
    std::vector<IndexMatch> matches;
    for (const IndexDescriptor& desc : descriptors_) {
        if (ext.edge_partitioned) {
            if (desc.kind != IndexKind::EdgePartitioned || desc.ep_kind != ext.ep_kind)
                continue;
        } else {
            if (desc.kind == IndexKind::EdgePartitioned) continue;
            if (desc.direction != ext.direction) continue;
        }
        if (ext.required_sort) {
            const SortKey leading = desc.leading_sort();
            if (ext.required_sort->is_nbr_id) {
                if (!desc.nbr_id_sorted()) continue;
            } else if (!(leading == *ext.required_sort)) {
                continue;
            }
        }

        // Fix a prefix of partition levels from equality atoms of p_q.
        IndexMatch match;
        match.descriptor = &desc;
        std::vector<bool> consumed(ext.p_q.atoms.size(), false);
        for (const PartitioningCriterion& crit : desc.config.partitioning) {
            const PropRef want{crit.subject, crit.property};
            bool found = false;
            for (size_t i = 0; i < ext.p_q.atoms.size(); ++i) {
                const PredAtom& atom = ext.p_q.atoms[i];
                if (atom.op != CmpOp::Eq || atom.rhs_is_ref || atom.rhs_offset != 0.0)
                    continue;
                if (!(atom.lhs == want)) continue;
                match.key_path.push_back(atom.rhs_const);
                consumed[i] = true;
                found = true;
                break;
            }
            if (!found) break; // shorter key paths read coarser slices
        }

        PredicateExpr available = ext.p_q;
        available.atoms.insert(available.atoms.end(), ext.context.atoms.begin(),
                               ext.context.atoms.end());
        const PredicateExpr canonical = desc.canonical_predicate();
        const SubsumeResult sub = subsumes(canonical, available);
        if (!sub.subsumed) continue;

        for (size_t i = 0; i < ext.p_q.atoms.size(); ++i) {
            if (consumed[i]) continue;
            bool guaranteed = false;
            for (const PredAtom& ia : canonical.atoms) {
                if (ext.p_q.atoms[i] == ia) {
                    guaranteed = true;
                    break;
                }
            }
            if (!guaranteed) {
                match.residual.atoms.push_back(ext.p_q.atoms[i]);
                match.residual_idx.push_back(i);
            }
        }
        matches.push_back(std::move(match));
    }
    std::stable_sort(matches.begin(), matches.end(),
                     [](const IndexMatch& a, const IndexMatch& b) {
                         return (a.descriptor->kind == IndexKind::Primary) >
                                (b.descriptor->kind == IndexKind::Primary);
                     });
    return matches;
}

} // namespace quiver
