#pragma once

#include "quiver/errors.hpp"
#include "quiver/property.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace quiver {

enum class Attachment { Vertex, Edge };

// Dense string -> code dictionary (labels, categorical property values).
class Dictionary {
public:
    uint32_t intern(const std::string& text);
    std::optional<uint32_t> find(const std::string& text) const;
    const std::string& name(uint32_t code) const;
    uint32_t size() const { return static_cast<uint32_t>(names_.size()); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, uint32_t> codes_;
};

struct PropertyDef {
    std::string name;
    PropertyKind kind = PropertyKind::Int64;
    Attachment attach = Attachment::Vertex;
    Dictionary codes; // categorical only
};

// Catalog of registered properties plus the vertex/edge label dictionaries.
// A property name has exactly one kind and attachment.
class PropertyCatalog {
public:
    PropertyDef& register_property(const std::string& name, PropertyKind kind,
                                   Attachment attach);

    const PropertyDef* find(const std::string& name, Attachment attach) const;
    PropertyDef* find(const std::string& name, Attachment attach);
    const PropertyDef& require(const std::string& name, Attachment attach) const;

    const std::vector<PropertyDef*>& properties(Attachment attach) const {
        return attach == Attachment::Vertex ? vertex_props_ : edge_props_;
    }

    Dictionary& vertex_labels() { return vertex_labels_; }
    const Dictionary& vertex_labels() const { return vertex_labels_; }
    Dictionary& edge_labels() { return edge_labels_; }
    const Dictionary& edge_labels() const { return edge_labels_; }

    // Parses a raw CSV/DDL scalar into a typed value, interning categorical
    // strings when `intern` is set (loading) and using a never-matching
    // sentinel code otherwise (querying an unknown categorical constant).
    PropertyValue parse_value(const PropertyDef& def, const std::string& text,
                              bool intern);

private:
    std::vector<std::unique_ptr<PropertyDef>> defs_;
    std::vector<PropertyDef*> vertex_props_;
    std::vector<PropertyDef*> edge_props_;
    Dictionary vertex_labels_;
    Dictionary edge_labels_;
};

} // namespace quiver
