#include "quiver/catalog.hpp"

#include <charconv>
#include <memory>

namespace quiver {

uint32_t Dictionary::intern(const std::string& text) {
    auto it = codes_.find(text);
    if (it != codes_.end()) return it->second;
    const uint32_t code = static_cast<uint32_t>(names_.size());
    names_.push_back(text);
    codes_.emplace(text, code);
    return code;
}

std::optional<uint32_t> Dictionary::find(const std::string& text) const {
    auto it = codes_.find(text);
    if (it == codes_.end()) return std::nullopt;
    return it->second;
}

const std::string& Dictionary::name(uint32_t code) const {
    static const std::string unknown = "?";
    if (code >= names_.size()) return unknown;
    return names_[code];
}

PropertyDef& PropertyCatalog::register_property(const std::string& name,
                                                PropertyKind kind, Attachment attach) {
    if (const PropertyDef* existing = find(name, attach)) {
        if (existing->kind != kind)
            fail(ErrorCode::SchemaMismatch,
                 "property '" + name + "' already registered with a different kind");
        return *find(name, attach);
    }
    defs_.push_back(std::make_unique<PropertyDef>());
    PropertyDef& def = *defs_.back();
    def.name = name;
    def.kind = kind;
    def.attach = attach;
    (attach == Attachment::Vertex ? vertex_props_ : edge_props_).push_back(&def);
    return def;
}

const PropertyDef* PropertyCatalog::find(const std::string& name, Attachment attach) const {
    for (const PropertyDef* def : properties(attach))
        if (def->name == name) return def;
    return nullptr;
}

PropertyDef* PropertyCatalog::find(const std::string& name, Attachment attach) {
    for (PropertyDef* def : attach == Attachment::Vertex ? vertex_props_ : edge_props_)
        if (def->name == name) return def;
    return nullptr;
}

const PropertyDef& PropertyCatalog::require(const std::string& name,
                                            Attachment attach) const {
    const PropertyDef* def = find(name, attach);
    if (!def)
        fail(ErrorCode::UnknownProperty,
             std::string(attach == Attachment::Vertex ? "vertex" : "edge") +
                 " property '" + name + "' is not registered");
    return *def;
}

PropertyValue PropertyCatalog::parse_value(const PropertyDef& def, const std::string& text,
                                           bool intern) {
    if (text.empty()) return PropertyValue::null();
    switch (def.kind) {
    case PropertyKind::Categorical: {
        PropertyDef* mut = find(def.name, def.attach);
        if (intern) return PropertyValue::categorical(mut->codes.intern(text));
        if (auto code = def.codes.find(text))
            return PropertyValue::categorical(*code);
        return PropertyValue::categorical(UINT32_MAX); // matches nothing
    }
    case PropertyKind::Int64: {
        int64_t value = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size())
            fail(ErrorCode::ParseError, "bad int64 literal '" + text + "'");
        return PropertyValue::of_int(value);
    }
    case PropertyKind::Float64: {
        try {
            size_t used = 0;
            const double value = std::stod(text, &used);
            if (used != text.size())
                fail(ErrorCode::ParseError, "bad float literal '" + text + "'");
            return PropertyValue::of_float(value);
        } catch (const std::invalid_argument&) {
            fail(ErrorCode::ParseError, "bad float literal '" + text + "'");
        } catch (const std::out_of_range&) {
            fail(ErrorCode::ParseError, "float literal out of range '" + text + "'");
        }
    }
    }
    fail(ErrorCode::ParseError, "unreachable");
}

} // namespace quiver
