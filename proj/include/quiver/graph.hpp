#pragma once

#include "quiver/catalog.hpp"
#include "quiver/property.hpp"

#include <string>
#include <utility>
#include <vector>

namespace quiver {

struct EdgeRecord {
    EdgeId id = kNoEdge;
    VertexId src = kNoVertex;
    VertexId dst = kNoVertex;
    uint32_t label = 0;
};

struct LoadReport {
    uint64_t vertices = 0;
    uint64_t edges = 0;
    uint64_t rejected = 0;
};

using PropertyList = std::vector<std::pair<std::string, PropertyValue>>;

// In-memory property graph. Vertex IDs are dense and assigned consecutively
// from 0; edge IDs are dense in insertion order and never reused. Edge
// deletion tombstones the record (vertex deletion is rejected).
class PropertyGraph {
public:
    PropertyCatalog& catalog() { return catalog_; }
    const PropertyCatalog& catalog() const { return catalog_; }

    VertexId add_vertex(uint32_t label, const PropertyList& props = {});
    EdgeId add_edge(VertexId src, VertexId dst, uint32_t label,
                    const PropertyList& props = {});
    void remove_edge(EdgeId e);

    uint32_t vertex_count() const { return static_cast<uint32_t>(vertex_labels_.size()); }
    // Total assigned edge IDs, including tombstoned ones.
    uint64_t edge_ids_end() const { return static_cast<uint64_t>(edges_.size()); }
    uint64_t live_edge_count() const { return live_edges_; }

    bool vertex_exists(VertexId v) const { return v < vertex_labels_.size(); }
    bool edge_alive(EdgeId e) const { return e < edges_.size() && alive_[e]; }

    uint32_t vertex_label(VertexId v) const { return vertex_labels_[v]; }
    const EdgeRecord& edge(EdgeId e) const { return edges_[e]; }

    PropertyValue vertex_property(VertexId v, const std::string& name) const;
    PropertyValue edge_property(EdgeId e, const std::string& name) const;
    // Spec surface: kind selects vertex vs edge attachment.
    PropertyValue get_property(Attachment kind, uint64_t id, const std::string& name) const;

    void set_vertex_property(VertexId v, const std::string& name, PropertyValue value);
    void set_edge_property(EdgeId e, const std::string& name, PropertyValue value);

    // Live edges with src == v / dst == v, in edge-id order. Brute-force scans
    // used by loaders and maintenance, not by query processing.
    std::vector<EdgeId> out_edges(VertexId v) const;
    std::vector<EdgeId> in_edges(VertexId v) const;

private:
    friend class CsvIo;

    struct Column {
        const PropertyDef* def = nullptr;
        std::vector<PropertyValue> values;
    };

    Column& column(const PropertyDef& def, Attachment attach);
    const Column* column(const std::string& name, Attachment attach) const;
    void check_props(const PropertyList& props, Attachment attach) const;

    PropertyCatalog catalog_;
    std::vector<uint32_t> vertex_labels_;
    std::vector<EdgeRecord> edges_;
    std::vector<bool> alive_;
    uint64_t live_edges_ = 0;
    std::vector<Column> vertex_columns_;
    std::vector<Column> edge_columns_;
};

// CSV import/export. Vertex file header: id,label,prop1,...; edge file
// header: src,dst,label,prop1,.... Empty cell = Null. Categorical cells are
// interned. Vertex ids must be exactly 0..N-1 in order.
class CsvIo {
public:
    static LoadReport load(PropertyGraph& graph, const std::string& vertex_file,
                           const std::string& edge_file);
    static void export_graph(const PropertyGraph& graph, const std::string& vertex_file,
                             const std::string& edge_file);
};

} // namespace quiver
