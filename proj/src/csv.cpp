#include "quiver/graph.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace quiver {

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell += c;
        }
    }
    cells.push_back(cell);
    return cells;
}

uint64_t parse_u64(const std::string& text, uint64_t line_no, const char* what) {
    uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        fail(ErrorCode::ParseError,
             "line " + std::to_string(line_no) + ": bad " + what + " '" + text + "'");
    return value;
}

std::string cell_text(const PropertyGraph& graph, const PropertyDef& def,
                      const PropertyValue& value) {
    if (value.is_null()) return "";
    switch (def.kind) {
    case PropertyKind::Categorical: return def.codes.name(value.as_categorical());
    case PropertyKind::Int64: return std::to_string(value.as_int());
    case PropertyKind::Float64: {
        std::ostringstream os;
        os.precision(17);
        os << value.as_float();
        return os.str();
    }
    }
    (void)graph;
    return "";
}

} // namespace

LoadReport CsvIo::load(PropertyGraph& graph, const std::string& vertex_file,
                       const std::string& edge_file) {
    LoadReport report;
    PropertyCatalog& catalog = graph.catalog();

    std::ifstream vf(vertex_file);
    if (!vf) fail(ErrorCode::ParseError, "cannot open vertex file " + vertex_file);
    std::string line;
    uint64_t line_no = 0;
    std::vector<const PropertyDef*> vcols;
    while (std::getline(vf, line)) {
        ++line_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        auto cells = split_row(line);
        if (line_no == 1) {
            if (cells.size() < 2 || cells[0] != "id" || cells[1] != "label")
                fail(ErrorCode::SchemaMismatch, "vertex header must start with id,label");
            for (size_t i = 2; i < cells.size(); ++i) {
                const PropertyDef* def = catalog.find(cells[i], Attachment::Vertex);
                if (!def)
                    fail(ErrorCode::SchemaMismatch,
                         "vertex property '" + cells[i] + "' not in schema");
                vcols.push_back(def);
            }
            continue;
        }
        if (cells.size() != vcols.size() + 2)
            fail(ErrorCode::ParseError,
                 "line " + std::to_string(line_no) + ": expected " +
                     std::to_string(vcols.size() + 2) + " cells");
        const uint64_t id = parse_u64(cells[0], line_no, "vertex id");
        if (id != graph.vertex_count())
            fail(ErrorCode::SchemaMismatch,
                 "line " + std::to_string(line_no) + ": vertex ids must be consecutive, "
                 "expected " + std::to_string(graph.vertex_count()));
        const uint32_t label = catalog.vertex_labels().intern(cells[1]);
        PropertyList props;
        for (size_t i = 0; i < vcols.size(); ++i) {
            if (cells[i + 2].empty()) continue;
            props.emplace_back(vcols[i]->name,
                               catalog.parse_value(*vcols[i], cells[i + 2], true));
        }
        graph.add_vertex(label, props);
        ++report.vertices;
    }

    std::ifstream ef(edge_file);
    if (!ef) fail(ErrorCode::ParseError, "cannot open edge file " + edge_file);
    line_no = 0;
    std::vector<const PropertyDef*> ecols;
    while (std::getline(ef, line)) {
        ++line_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        auto cells = split_row(line);
        if (line_no == 1) {
            if (cells.size() < 3 || cells[0] != "src" || cells[1] != "dst" ||
                cells[2] != "label")
                fail(ErrorCode::SchemaMismatch, "edge header must start with src,dst,label");
            for (size_t i = 3; i < cells.size(); ++i) {
                const PropertyDef* def = catalog.find(cells[i], Attachment::Edge);
                if (!def)
                    fail(ErrorCode::SchemaMismatch,
                         "edge property '" + cells[i] + "' not in schema");
                ecols.push_back(def);
            }
            continue;
        }
        if (cells.size() != ecols.size() + 3)
            fail(ErrorCode::ParseError,
                 "line " + std::to_string(line_no) + ": expected " +
                     std::to_string(ecols.size() + 3) + " cells");
        const uint64_t src = parse_u64(cells[0], line_no, "src id");
        const uint64_t dst = parse_u64(cells[1], line_no, "dst id");
        if (!graph.vertex_exists(static_cast<VertexId>(src)) ||
            !graph.vertex_exists(static_cast<VertexId>(dst)) || src > UINT32_MAX ||
            dst > UINT32_MAX) {
            ++report.rejected;
            continue;
        }
        const uint32_t label = catalog.edge_labels().intern(cells[2]);
        PropertyList props;
        for (size_t i = 0; i < ecols.size(); ++i) {
            if (cells[i + 3].empty()) continue;
            props.emplace_back(ecols[i]->name,
                               catalog.parse_value(*ecols[i], cells[i + 3], true));
        }
        graph.add_edge(static_cast<VertexId>(src), static_cast<VertexId>(dst), label,
                       props);
        ++report.edges;
    }
    return report;
}

void CsvIo::export_graph(const PropertyGraph& graph, const std::string& vertex_file,
                         const std::string& edge_file) {
    const PropertyCatalog& catalog = graph.catalog();

    std::ofstream vf(vertex_file);
    if (!vf) fail(ErrorCode::InvalidOperation, "cannot write " + vertex_file);
    vf << "id,label";
    for (const PropertyDef* def : catalog.properties(Attachment::Vertex))
        vf << ',' << def->name;
    vf << '\n';
    for (VertexId v = 0; v < graph.vertex_count(); ++v) {
        vf << v << ',' << catalog.vertex_labels().name(graph.vertex_label(v));
        for (const PropertyDef* def : catalog.properties(Attachment::Vertex))
            vf << ',' << cell_text(graph, *def, graph.vertex_property(v, def->name));
        vf << '\n';
    }

    std::ofstream ef(edge_file);
    if (!ef) fail(ErrorCode::InvalidOperation, "cannot write " + edge_file);
    ef << "src,dst,label";
    for (const PropertyDef* def : catalog.properties(Attachment::Edge))
        ef << ',' << def->name;
    ef << '\n';
    for (EdgeId e = 0; e < graph.edge_ids_end(); ++e) {
        if (!graph.edge_alive(e)) continue;
        const EdgeRecord& rec = graph.edge(e);
        ef << rec.src << ',' << rec.dst << ',' << catalog.edge_labels().name(rec.label);
        for (const PropertyDef* def : catalog.properties(Attachment::Edge))
            ef << ',' << cell_text(graph, *def, graph.edge_property(e, def->name));
        ef << '\n';
    }
}

} // namespace quiver
