#include "quiver/graph.hpp"

namespace quiver {

void PropertyGraph::check_props(const PropertyList& props, Attachment attach) const {
    for (const auto& [name, value] : props) {
        const PropertyDef& def = catalog_.require(name, attach);
        if (value.is_null()) continue;
        const bool ok =
            (def.kind == PropertyKind::Categorical &&
             value.tag() == PropertyValue::Tag::Categorical) ||
            (def.kind == PropertyKind::Int64 && value.tag() == PropertyValue::Tag::Int64) ||
            (def.kind == PropertyKind::Float64 &&
             value.tag() == PropertyValue::Tag::Float64);
        if (!ok)
            fail(ErrorCode::PropertyKindMismatch,
                 "value for property '" + name + "' does not match kind " +
                     property_kind_name(def.kind));
    }
}

PropertyGraph::Column& PropertyGraph::column(const PropertyDef& def, Attachment attach) {
    auto& cols = attach == Attachment::Vertex ? vertex_columns_ : edge_columns_;
    for (Column& c : cols)
        if (c.def == &def) return c;
    cols.push_back(Column{&def, {}});
    return cols.back();
}

const PropertyGraph::Column* PropertyGraph::column(const std::string& name,
                                                   Attachment attach) const {
    const auto& cols = attach == Attachment::Vertex ? vertex_columns_ : edge_columns_;
    for (const Column& c : cols)
        if (c.def->name == name) return &c;
    return nullptr;
}

VertexId PropertyGraph::add_vertex(uint32_t label, const PropertyList& props) {
    if (label >= catalog_.vertex_labels().size())
        fail(ErrorCode::UnknownLabel, "vertex label code " + std::to_string(label));
    check_props(props, Attachment::Vertex);
    const VertexId id = static_cast<VertexId>(vertex_labels_.size());
    vertex_labels_.push_back(label);
    for (const auto& [name, value] : props)
        set_vertex_property(id, name, value);
    return id;
}

EdgeId PropertyGraph::add_edge(VertexId src, VertexId dst, uint32_t label,
                               const PropertyList& props) {
    if (!vertex_exists(src))
        fail(ErrorCode::UnknownVertex, "src " + std::to_string(src));
    if (!vertex_exists(dst))
        fail(ErrorCode::UnknownVertex, "dst " + std::to_string(dst));
    if (label >= catalog_.edge_labels().size())
        fail(ErrorCode::UnknownLabel, "edge label code " + std::to_string(label));
    check_props(props, Attachment::Edge);
    const EdgeId id = static_cast<EdgeId>(edges_.size());
    edges_.push_back(EdgeRecord{id, src, dst, label});
    alive_.push_back(true);
    ++live_edges_;
    for (const auto& [name, value] : props)
        set_edge_property(id, name, value);
    return id;
}

void PropertyGraph::remove_edge(EdgeId e) {
    if (!edge_alive(e))
        fail(ErrorCode::UnknownEdge, std::to_string(e));
    alive_[e] = false;
    --live_edges_;
}

PropertyValue PropertyGraph::vertex_property(VertexId v, const std::string& name) const {
    if (!vertex_exists(v))
        fail(ErrorCode::UnknownId, "vertex " + std::to_string(v));
    const Column* col = column(name, Attachment::Vertex);
    if (!col) {
        catalog_.require(name, Attachment::Vertex); // throws UnknownProperty if absent
        return PropertyValue::null();
    }
    if (v >= col->values.size()) return PropertyValue::null();
    return col->values[v];
}

PropertyValue PropertyGraph::edge_property(EdgeId e, const std::string& name) const {
    if (e >= edges_.size())
        fail(ErrorCode::UnknownId, "edge " + std::to_string(e));
    const Column* col = column(name, Attachment::Edge);
    if (!col) {
        catalog_.require(name, Attachment::Edge);
        return PropertyValue::null();
    }
    if (e >= col->values.size()) return PropertyValue::null();
    return col->values[e];
}

PropertyValue PropertyGraph::get_property(Attachment kind, uint64_t id,
                                          const std::string& name) const {
    if (kind == Attachment::Vertex)
        return vertex_property(static_cast<VertexId>(id), name);
    return edge_property(id, name);
}

void PropertyGraph::set_vertex_property(VertexId v, const std::string& name,
                                        PropertyValue value) {
    const PropertyDef& def = catalog_.require(name, Attachment::Vertex);
    Column& col = column(def, Attachment::Vertex);
    if (col.values.size() <= v) col.values.resize(v + 1);
    col.values[v] = value;
}

void PropertyGraph::set_edge_property(EdgeId e, const std::string& name,
                                      PropertyValue value) {
    const PropertyDef& def = catalog_.require(name, Attachment::Edge);
    Column& col = column(def, Attachment::Edge);
    if (col.values.size() <= e) col.values.resize(e + 1);
    col.values[e] = value;
}

std::vector<EdgeId> PropertyGraph::out_edges(VertexId v) const {
    std::vector<EdgeId> result;
    for (EdgeId e = 0; e < edges_.size(); ++e)
        if (alive_[e] && edges_[e].src == v) result.push_back(e);
    return result;
}

std::vector<EdgeId> PropertyGraph::in_edges(VertexId v) const {
    std::vector<EdgeId> result;
    for (EdgeId e = 0; e < edges_.size(); ++e)
        if (alive_[e] && edges_[e].dst == v) result.push_back(e);
    return result;
}

} // namespace quiver
