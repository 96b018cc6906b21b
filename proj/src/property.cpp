#include "quiver/property.hpp"

#include "quiver/errors.hpp"

#include <cmath>

namespace quiver {

const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::UnknownEdge: return "UnknownEdge";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::UnknownProperty: return "UnknownProperty";
    case ErrorCode::PropertyKindMismatch: return "PropertyKindMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::NonCategoricalPartitionKey: return "NonCategoricalPartitionKey";
    case ErrorCode::SingleEdgePredicate: return "SingleEdgePredicate";
    case ErrorCode::MissingPrimaryDirection: return "MissingPrimaryDirection";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::UnknownIndex: return "UnknownIndex";
    case ErrorCode::IndexTooLarge: return "IndexTooLarge";
    case ErrorCode::SortMismatch: return "SortMismatch";
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::NoPlan: return "NoPlan";
    case ErrorCode::InvalidOperation: return "InvalidOperation";
    }
    return "Error";
}

const char* property_kind_name(PropertyKind kind) {
    switch (kind) {
    case PropertyKind::Categorical: return "categorical";
    case PropertyKind::Int64: return "int64";
    case PropertyKind::Float64: return "float64";
    }
    return "?";
}

double PropertyValue::as_number() const {
    switch (tag_) {
    case Tag::Categorical: return static_cast<double>(u32_);
    case Tag::Int64: return static_cast<double>(i64_);
    case Tag::Float64: return f64_;
    case Tag::Null: return std::nan("");
    }
    return std::nan("");
}

bool PropertyValue::operator==(const PropertyValue& other) const {
    if (tag_ != other.tag_) {
        // Int64/Float64 of equal numeric value count as equal.
        if ((tag_ == Tag::Int64 && other.tag_ == Tag::Float64) ||
            (tag_ == Tag::Float64 && other.tag_ == Tag::Int64)) {
            return as_number() == other.as_number();
        }
        return false;
    }
    switch (tag_) {
    case Tag::Null: return true;
    case Tag::Categorical: return u32_ == other.u32_;
    case Tag::Int64: return i64_ == other.i64_;
    case Tag::Float64: return f64_ == other.f64_;
    }
    return false;
}

std::string PropertyValue::to_string() const {
    switch (tag_) {
    case Tag::Null: return "null";
    case Tag::Categorical: return "#" + std::to_string(u32_);
    case Tag::Int64: return std::to_string(i64_);
    case Tag::Float64: {
        std::string s = std::to_string(f64_);
        return s;
    }
    }
    return "?";
}

int order_compare(const PropertyValue& a, const PropertyValue& b) {
    const bool an = a.is_null();
    const bool bn = b.is_null();
    if (an && bn) return 0;
    if (an) return 1;  // nulls last
    if (bn) return -1;
    if (a.tag() == PropertyValue::Tag::Categorical &&
        b.tag() == PropertyValue::Tag::Categorical) {
        const uint32_t x = a.as_categorical(), y = b.as_categorical();
        return x < y ? -1 : (x > y ? 1 : 0);
    }
    if (a.tag() == PropertyValue::Tag::Int64 && b.tag() == PropertyValue::Tag::Int64) {
        const int64_t x = a.as_int(), y = b.as_int();
        return x < y ? -1 : (x > y ? 1 : 0);
    }
    const double x = a.as_number(), y = b.as_number();
    return x < y ? -1 : (x > y ? 1 : 0);
}

const char* cmp_op_symbol(CmpOp op) {
    switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "<>";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    }
    return "?";
}

bool compare_values(const PropertyValue& lhs, CmpOp op, const PropertyValue& rhs,
                    double rhs_offset) {
    if (lhs.is_null() || rhs.is_null()) return false;
    int cmp;
    if (rhs_offset != 0.0) {
        const double l = lhs.as_number();
        const double r = rhs.as_number() + rhs_offset;
        cmp = l < r ? -1 : (l > r ? 1 : 0);
    } else {
        cmp = order_compare(lhs, rhs);
    }
    switch (op) {
    case CmpOp::Eq: return cmp == 0;
    case CmpOp::Ne: return cmp != 0;
    case CmpOp::Lt: return cmp < 0;
    case CmpOp::Le: return cmp <= 0;
    case CmpOp::Gt: return cmp > 0;
    case CmpOp::Ge: return cmp >= 0;
    }
    return false;
}

} // namespace quiver
