#include "quiver/session.hpp"

#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace quiver {

namespace {

// v<k> names vertex id k; t<k> names the k-th loaded edge (1-based), i.e.
// edge id k-1 under dense insertion-order ids.
std::optional<int64_t> entity_literal(const std::string& word, bool edge) {
    if (word.size() < 2) return std::nullopt;
    const char prefix = edge ? 't' : 'v';
    if (word[0] != prefix) return std::nullopt;
    int64_t value = 0;
    for (size_t i = 1; i < word.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(word[i]))) return std::nullopt;
        value = value * 10 + (word[i] - '0');
    }
    return edge ? value - 1 : value;
}

CmpOp mirror(CmpOp op) {
    switch (op) {
    case CmpOp::Lt: return CmpOp::Gt;
    case CmpOp::Le: return CmpOp::Ge;
    case CmpOp::Gt: return CmpOp::Lt;
    case CmpOp::Ge: return CmpOp::Le;
    default: return op;
    }
}

Subject subject_of(const std::string& word) {
    if (word == "e_adj") return Subject::AdjEdge;
    if (word == "v_nbr") return Subject::NbrVertex;
    if (word == "e_b") return Subject::BoundEdge;
    if (word == "v_s") return Subject::SrcVertex;
    if (word == "v_d") return Subject::DstVertex;
    fail(ErrorCode::ParseError, "unknown subject '" + word + "'");
}

bool subject_is_edge(Subject s) {
    return s == Subject::AdjEdge || s == Subject::BoundEdge;
}

} // namespace

void Session::load_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ParseError, "cannot open schema file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, std::string("schema: ") + e.what());
    }
    auto register_side = [&](const char* key, Attachment attach) {
        if (!j.contains(key)) return;
        for (const auto& [name, kind] : j[key].items()) {
            const std::string k = kind.get<std::string>();
            PropertyKind pk;
            if (k == "categorical") pk = PropertyKind::Categorical;
            else if (k == "int64") pk = PropertyKind::Int64;
            else if (k == "float64") pk = PropertyKind::Float64;
            else fail(ErrorCode::SchemaMismatch, "unknown property kind '" + k + "'");
            db_->catalog().register_property(name, pk, attach);
        }
    };
    register_side("vertex", Attachment::Vertex);
    register_side("edge", Attachment::Edge);
}

double Session::offset_value(const ddl::Operand& operand) const {
    if (!operand.has_offset) return 0.0;
    if (!operand.offset_word.empty()) {
        if (operand.offset_word == "alpha") return alpha;
        fail(ErrorCode::ParseError, "unknown parameter '" + operand.offset_word + "'");
    }
    return operand.offset;
}

PropertyValue Session::bind_scalar(const QueryRef& ref, const ddl::Operand& operand) const {
    const PropertyCatalog& catalog = db_->graph().catalog();
    if (operand.kind == ddl::Operand::Kind::Number) {
        if (ref.prop == kIdProp || ref.prop == "eID")
            return PropertyValue::of_int(operand.inum);
        return operand.is_int ? PropertyValue::of_int(operand.inum)
                              : PropertyValue::of_float(operand.num);
    }
    const std::string& word = operand.text;
    if (operand.kind == ddl::Operand::Kind::Word && word == "alpha")
        return PropertyValue::of_float(alpha);
    if (ref.prop == kIdProp || ref.prop == "eID") {
        if (auto lit = entity_literal(word, ref.prop == "eID"))
            return PropertyValue::of_int(*lit);
        fail(ErrorCode::ParseError, "expected an id literal, got '" + word + "'");
    }
    if (ref.prop == kLabelProp) {
        const Dictionary& dict =
            ref.is_edge ? catalog.edge_labels() : catalog.vertex_labels();
        if (auto code = dict.find(word)) return PropertyValue::categorical(*code);
        return PropertyValue::categorical(UINT32_MAX); // matches nothing
    }
    const PropertyDef* def =
        catalog.find(ref.prop, ref.is_edge ? Attachment::Edge : Attachment::Vertex);
    if (!def) fail(ErrorCode::UnknownProperty, ref.prop);
    if (def->kind != PropertyKind::Categorical)
        fail(ErrorCode::ParseError,
             "property '" + ref.prop + "' is numeric, got '" + word + "'");
    if (auto code = def->codes.find(word)) return PropertyValue::categorical(*code);
    return PropertyValue::categorical(UINT32_MAX);
}

QueryAtom Session::bind_atom(const QueryGraph& q, const ddl::TextAtom& atom) const {
    auto bind_ref = [&](const ddl::Operand& op) -> std::optional<QueryRef> {
        if (op.kind != ddl::Operand::Kind::Ref) return std::nullopt;
        QueryRef ref;
        const int v = q.vertex_var(op.var);
        if (v >= 0) {
            ref.is_edge = false;
            ref.var = v;
        } else {
            const int e = q.edge_var(op.var);
            if (e < 0)
                fail(ErrorCode::ParseError,
                     "line " + std::to_string(atom.line) + ": unknown variable '" +
                         op.var + "'");
            ref.is_edge = true;
            ref.var = e;
        }
        ref.prop = op.prop;
        return ref;
    };

    ddl::Operand lhs = atom.lhs;
    ddl::Operand rhs = atom.rhs;
    CmpOp op = atom.op;
    // Normalize to <ref> <op> <operand>: flip when only the right side is a
    // reference, or when the left side carries the "+ c" offset.
    const bool lhs_ref = lhs.kind == ddl::Operand::Kind::Ref;
    const bool rhs_ref = rhs.kind == ddl::Operand::Kind::Ref;
    if (!lhs_ref && !rhs_ref)
        fail(ErrorCode::ParseError,
             "line " + std::to_string(atom.line) + ": comparison without a variable");
    if (!lhs_ref || (lhs.has_offset && rhs_ref)) {
        std::swap(lhs, rhs);
        op = mirror(op);
    }
    if (lhs.has_offset)
        fail(ErrorCode::ParseError, "offsets on both comparison sides are unsupported");

    QueryAtom out;
    out.lhs = *bind_ref(lhs);
    out.op = op;
    if (rhs.kind == ddl::Operand::Kind::Ref) {
        out.rhs_is_ref = true;
        out.rhs_ref = *bind_ref(rhs);
        out.rhs_offset = offset_value(rhs);
    } else {
        out.rhs_const = bind_scalar(out.lhs, rhs);
        out.rhs_offset = offset_value(rhs);
    }
    return out;
}

QueryGraph Session::bind_query(const ddl::MatchClause& clause) const {
    const PropertyCatalog& catalog = db_->graph().catalog();
    QueryGraph q;
    for (const ddl::PatternNode& node : clause.nodes) {
        const int var = q.add_vertex(node.name);
        if (!node.label.empty()) {
            const auto code = catalog.vertex_labels().find(node.label);
            q.vertices[var].label = code ? *code : UINT32_MAX;
        }
    }
    for (const ddl::PatternEdge& edge : clause.edges) {
        const int e = q.add_edge(edge.name, edge.from, edge.to);
        if (!edge.label.empty()) {
            const auto code = catalog.edge_labels().find(edge.label);
            q.edges[e].label = code ? *code : UINT32_MAX;
        }
    }
    q.finalize();
    for (const ddl::TextAtom& atom : clause.where) q.atoms.push_back(bind_atom(q, atom));
    return q;
}

PredAtom Session::bind_view_atom(const ddl::MatchClause& m, const ddl::TextAtom& atom,
                                 bool two_hop, EdgeAdjacencyKind kind) const {
    (void)m;
    (void)kind;
    auto bind_ref = [&](const ddl::Operand& op) -> std::optional<PropRef> {
        if (op.kind != ddl::Operand::Kind::Ref) return std::nullopt;
        const Subject s = subject_of(op.var);
        if (!two_hop && (s == Subject::BoundEdge))
            fail(ErrorCode::ParseError, "e_b is only valid in 2-hop views");
        return PropRef{s, op.prop};
    };

    ddl::Operand lhs = atom.lhs;
    ddl::Operand rhs = atom.rhs;
    CmpOp op = atom.op;
    const bool lhs_ref = lhs.kind == ddl::Operand::Kind::Ref;
    const bool rhs_ref = rhs.kind == ddl::Operand::Kind::Ref;
    if (!lhs_ref && !rhs_ref)
        fail(ErrorCode::ParseError, "view predicate without a subject");
    if (!lhs_ref || (lhs.has_offset && rhs_ref)) {
        std::swap(lhs, rhs);
        op = mirror(op);
    }
    if (lhs.has_offset)
        fail(ErrorCode::ParseError, "offsets on both comparison sides are unsupported");

    PredAtom out;
    out.lhs = *bind_ref(lhs);
    out.op = op;
    if (rhs.kind == ddl::Operand::Kind::Ref) {
        out.rhs_is_ref = true;
        out.rhs_ref = *bind_ref(rhs);
        out.rhs_offset = offset_value(rhs);
    } else {
        QueryRef fake;
        fake.is_edge = subject_is_edge(out.lhs.subject);
        fake.prop = out.lhs.property;
        out.rhs_const = bind_scalar(fake, rhs);
        out.rhs_offset = offset_value(rhs);
    }
    return normalize_atom(out);
}

IndexConfig Session::bind_view_common(const ddl::Command& cmd, bool two_hop) const {
    IndexConfig config;
    for (const ddl::CriterionText& crit : cmd.partition_by) {
        const Subject s = subject_of(crit.subject);
        if (s != Subject::AdjEdge && s != Subject::NbrVertex)
            fail(ErrorCode::ParseError, "PARTITION BY supports e_adj and v_nbr");
        config.partitioning.push_back(PartitioningCriterion{s, crit.prop});
    }
    for (const ddl::CriterionText& key : cmd.sort_by) {
        const Subject s = subject_of(key.subject);
        SortKey k;
        if (s == Subject::NbrVertex && key.prop == kIdProp) {
            k.is_nbr_id = true;
        } else {
            if (s != Subject::AdjEdge && s != Subject::NbrVertex)
                fail(ErrorCode::ParseError, "SORT BY supports e_adj and v_nbr");
            k.subject = s;
            k.property = key.prop;
        }
        config.sorting.keys.push_back(k);
    }
    (void)two_hop;
    return config;
}

int Session::dispatch(const ddl::Command& cmd) {
    using Type = ddl::Command::Type;
    std::ostream& out = *out_;
    switch (cmd.type) {
    case Type::Quit: {
        quit_requested = true;
        return 0;
    }
    case Type::Help: {
        out << "commands: LOAD, EXPORT, RECONFIGURE PRIMARY INDEXES, CREATE 1-HOP VIEW, "
               "CREATE 2-HOP VIEW, DROP INDEX, MATCH, EXPLAIN MATCH, STATS, SHOW "
               "INDEXES, FLUSH, SET, QUIT\n";
        return 0;
    }
    case Type::Load: {
        if (!cmd.schema_file.empty()) load_schema(cmd.schema_file);
        const LoadReport report = db_->load_csv(cmd.vertex_file, cmd.edge_file);
        nlohmann::json j{{"vertices", report.vertices},
                         {"edges", report.edges},
                         {"rejected", report.rejected}};
        out << j.dump() << "\n";
        return 0;
    }
    case Type::Export: {
        db_->export_csv(cmd.vertex_file, cmd.edge_file);
        out << R"({"ok":true})" << "\n";
        return 0;
    }
    case Type::ReconfigurePrimary: {
        ddl::Command shape = cmd;
        IndexConfig config = bind_view_common(shape, false);
        const double seconds =
            db_->reconfigure_primary(config.partitioning, config.sorting);
        nlohmann::json j{{"ok", true}, {"ir_seconds", seconds}};
        out << j.dump() << "\n";
        return 0;
    }
    case Type::Create1Hop: {
        const ddl::MatchClause& m = cmd.match;
        if (m.nodes.size() != 2 || m.edges.size() != 1 ||
            m.nodes[m.edges[0].from].name != "v_s" ||
            m.nodes[m.edges[0].to].name != "v_d" || m.edges[0].name != "e_adj")
            fail(ErrorCode::ParseError, "1-hop views match v_s-[e_adj]->v_d");
        IndexConfig config = bind_view_common(cmd, false);
        config.kind = IndexKind::VertexPartitioned;
        if (cmd.direction == "FW") config.direction = Direction::FW;
        else if (cmd.direction == "BW") config.direction = Direction::BW;
        else if (cmd.direction == "FW-BW") config.direction = Direction::FWBW;
        else fail(ErrorCode::ParseError, "1-hop views need INDEX AS FW, BW or FW-BW");
        for (const ddl::TextAtom& atom : m.where)
            config.predicate.atoms.push_back(
                bind_view_atom(m, atom, false, EdgeAdjacencyKind::DestinationFW));
        const double seconds = db_->create_vertex_view(cmd.view_name, config);
        nlohmann::json j{{"ok", true}, {"index", cmd.view_name}, {"ic_seconds", seconds}};
        out << j.dump() << "\n";
        return 0;
    }
    case Type::Create2Hop: {
        const ddl::MatchClause& m = cmd.match;
        if (m.nodes.size() != 3 || m.edges.size() != 2)
            fail(ErrorCode::ParseError, "2-hop views match a 2-path");
        const ddl::PatternEdge* eb = nullptr;
        const ddl::PatternEdge* eadj = nullptr;
        for (const ddl::PatternEdge& e : m.edges) {
            if (e.name == "e_b") eb = &e;
            if (e.name == "e_adj") eadj = &e;
        }
        auto node_is = [&](int idx, const char* name) {
            return m.nodes[idx].name == name;
        };
        if (!eb || !eadj || !node_is(eb->from, "v_s") || !node_is(eb->to, "v_d"))
            fail(ErrorCode::ParseError,
                 "2-hop views bind e_b from v_s to v_d and an adjacent e_adj");
        EdgeAdjacencyKind kind;
        if (node_is(eadj->from, "v_d") && node_is(eadj->to, "v_nbr"))
            kind = EdgeAdjacencyKind::DestinationFW;
        else if (node_is(eadj->from, "v_nbr") && node_is(eadj->to, "v_d"))
            kind = EdgeAdjacencyKind::DestinationBW;
        else if (node_is(eadj->from, "v_nbr") && node_is(eadj->to, "v_s"))
            kind = EdgeAdjacencyKind::SourceFW;
        else if (node_is(eadj->from, "v_s") && node_is(eadj->to, "v_nbr"))
            kind = EdgeAdjacencyKind::SourceBW;
        else
            fail(ErrorCode::ParseError, "e_adj must connect v_nbr to v_s or v_d");
        IndexConfig config = bind_view_common(cmd, true);
        config.kind = IndexKind::EdgePartitioned;
        config.ep_kind = kind;
        for (const ddl::TextAtom& atom : m.where)
            config.predicate.atoms.push_back(bind_view_atom(m, atom, true, kind));
        const double seconds = db_->create_edge_view(cmd.view_name, config);
        nlohmann::json j{{"ok", true}, {"index", cmd.view_name}, {"ic_seconds", seconds}};
        out << j.dump() << "\n";
        return 0;
    }
    case Type::DropIndex: {
        db_->drop_index(cmd.view_name);
        out << R"({"ok":true})" << "\n";
        return 0;
    }
    case Type::Match:
    case Type::Explain: {
        const QueryGraph q = bind_query(cmd.match);
        if (cmd.type == Type::Explain) {
            const Plan plan = db_->plan_query(q).plan;
            out << explain_plan(plan, true) << "\n";
            return 0;
        }
        const Database::QueryResult result = db_->execute(q);
        if (format == Format::Csv) {
            for (size_t i = 0; i < q.vertices.size(); ++i)
                out << (i ? "," : "") << q.vertices[i].name;
            for (size_t i = 0; i < q.edges.size(); ++i) out << "," << q.edges[i].name;
            out << "\n";
            for (const MatchRow& row : result.rows) {
                for (size_t i = 0; i < row.v.size(); ++i)
                    out << (i ? "," : "") << row.v[i];
                for (const EdgeId e : row.e) out << "," << e;
                out << "\n";
            }
        } else {
            for (const MatchRow& row : result.rows) {
                nlohmann::json j;
                for (size_t i = 0; i < row.v.size(); ++i)
                    j[q.vertices[i].name] = row.v[i];
                for (size_t i = 0; i < row.e.size(); ++i)
                    j[q.edges[i].name] = row.e[i];
                out << j.dump() << "\n";
            }
        }
        nlohmann::json stats{{"matches", result.stats.matches},
                             {"edges_scanned", result.stats.edges_scanned},
                             {"icost", result.plan.total_icost}};
        out << stats.dump() << "\n";
        return 0;
    }
    case Type::Stats: {
        out << db_->stats_json(true) << "\n";
        return 0;
    }
    case Type::ShowIndexes: {
        nlohmann::json arr = nlohmann::json::array();
        for (const IndexDescriptor& d : db_->store().descriptors()) {
            nlohmann::json j;
            j["name"] = d.name;
            switch (d.kind) {
            case IndexKind::Primary: j["kind"] = "primary"; break;
            case IndexKind::VertexPartitioned: j["kind"] = "vertex-partitioned"; break;
            case IndexKind::EdgePartitioned: j["kind"] = "edge-partitioned"; break;
            }
            if (d.kind == IndexKind::EdgePartitioned)
                j["adjacency"] = edge_adjacency_kind_name(d.ep_kind);
            else
                j["direction"] = direction_name(d.direction);
            j["config"] = d.config.describe();
            arr.push_back(std::move(j));
        }
        out << arr.dump(2) << "\n";
        return 0;
    }
    case Type::Flush: {
        MergeReport report;
        if (cmd.flush_index.empty())
            report = db_->flush_all();
        else if (cmd.flush_owner >= 0)
            report = db_->flush_page(cmd.flush_index, static_cast<uint64_t>(cmd.flush_owner));
        else
            report = db_->flush_index(cmd.flush_index);
        nlohmann::json j{{"pages_merged", report.pages_merged},
                         {"inserts_applied", report.inserts_applied},
                         {"tombstones_cleared", report.tombstones_cleared},
                         {"full_rebuild", report.full_rebuild}};
        out << j.dump() << "\n";
        return 0;
    }
    case Type::Set: {
        if (cmd.set_name != "alpha")
            fail(ErrorCode::ParseError, "unknown parameter '" + cmd.set_name + "'");
        alpha = cmd.set_value;
        out << R"({"ok":true})" << "\n";
        return 0;
    }
    }
    return 2;
}

int Session::run(const std::string& text) {
    try {
        const ddl::Command cmd = ddl::parse(text);
        return dispatch(cmd);
    } catch (const Error& e) {
        nlohmann::json j{{"error", error_code_name(e.code())}, {"message", e.what()}};
        *out_ << j.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        nlohmann::json j{{"error", "internal"}, {"message", e.what()}};
        *out_ << j.dump() << "\n";
        return 2;
    }
}

int Session::run_script(std::istream& in) {
    int worst = 0;
    std::string line, buffer;
    auto flush = [&]() {
        // Strip whitespace to detect empty commands.
        bool blank = true;
        for (const char c : buffer)
            if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
        if (!blank) worst = std::max(worst, run(buffer));
        buffer.clear();
    };
    while (std::getline(in, line)) {
        std::string trimmed = line;
        while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
            trimmed.pop_back();
        if (trimmed.empty()) {
            flush();
            continue;
        }
        // '#' and '//' start comment lines.
        size_t first = 0;
        while (first < trimmed.size() &&
               std::isspace(static_cast<unsigned char>(trimmed[first])))
            ++first;
        if (trimmed[first] == '#' ||
            (trimmed[first] == '/' && first + 1 < trimmed.size() &&
             trimmed[first + 1] == '/'))
            continue;
        buffer += line + "\n";
        if (trimmed.back() == ';') flush();
        if (quit_requested) break;
    }
    flush();
    return worst;
}

} // namespace quiver
