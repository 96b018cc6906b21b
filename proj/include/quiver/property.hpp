#pragma once

#include <cstdint>
#include <string>

namespace quiver {

using VertexId = uint32_t;
using EdgeId = uint64_t;

inline constexpr VertexId kNoVertex = UINT32_MAX;
inline constexpr EdgeId kNoEdge = UINT64_MAX;

enum class PropertyKind { Categorical, Int64, Float64 };

const char* property_kind_name(PropertyKind kind);

// A single typed property value. Categorical values are dense per-property
// integer codes; Null is distinct from every code and number and orders last.
class PropertyValue {
public:
    enum class Tag : uint8_t { Null, Categorical, Int64, Float64 };

    PropertyValue() : tag_(Tag::Null), i64_(0) {}

    static PropertyValue null() { return PropertyValue(); }
    static PropertyValue categorical(uint32_t code) {
        PropertyValue v;
        v.tag_ = Tag::Categorical;
        v.u32_ = code;
        return v;
    }
    static PropertyValue of_int(int64_t value) {
        PropertyValue v;
        v.tag_ = Tag::Int64;
        v.i64_ = value;
        return v;
    }
    static PropertyValue of_float(double value) {
        PropertyValue v;
        v.tag_ = Tag::Float64;
        v.f64_ = value;
        return v;
    }

    Tag tag() const { return tag_; }
    bool is_null() const { return tag_ == Tag::Null; }
    uint32_t as_categorical() const { return u32_; }
    int64_t as_int() const { return i64_; }
    double as_float() const { return f64_; }

    // Numeric view used for cross-kind comparisons and "+ constant" offsets.
    double as_number() const;

    bool operator==(const PropertyValue& other) const;
    bool operator!=(const PropertyValue& other) const { return !(*this == other); }

    std::string to_string() const;

private:
    Tag tag_;
    union {
        uint32_t u32_;
        int64_t i64_;
        double f64_;
    };
};

// Total order used by sort criteria: Null sorts last; otherwise values of the
// same kind compare naturally. Mixed Int64/Float64 compare numerically.
// Returns <0, 0 or >0.
int order_compare(const PropertyValue& a, const PropertyValue& b);

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

const char* cmp_op_symbol(CmpOp op);

// Predicate comparison semantics: any comparison involving Null is false
// (including Null = Null). `rhs_offset` is added to the right-hand side,
// forcing a numeric comparison when nonzero.
bool compare_values(const PropertyValue& lhs, CmpOp op, const PropertyValue& rhs,
                    double rhs_offset = 0.0);

} // namespace quiver
