#include "oracles.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>

using namespace quiver;
using namespace quiver::testing;

namespace {

PropertyGraph make_graph() {
    PropertyGraph g;
    g.catalog().vertex_labels().intern("Account");
    g.catalog().edge_labels().intern("W");
    g.catalog().register_property("amt", PropertyKind::Int64, Attachment::Edge);
    g.catalog().register_property("rate", PropertyKind::Float64, Attachment::Edge);
    g.catalog().register_property("curr", PropertyKind::Categorical, Attachment::Edge);
    g.catalog().register_property("city", PropertyKind::Categorical, Attachment::Vertex);
    return g;
}

} // namespace

TEST_CASE("vertex ids are assigned consecutively from zero") {
    PropertyGraph g = make_graph();
    CHECK(g.add_vertex(0) == 0);
    CHECK(g.add_vertex(0) == 1);
    CHECK(g.add_vertex(0) == 2);
    CHECK(g.vertex_count() == 3);
}

TEST_CASE("property kind mismatches are rejected") {
    PropertyGraph g = make_graph();
    PropertyList bad{{"city", PropertyValue::of_float(1.5)}};
    try {
        g.add_vertex(0, bad);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PropertyKindMismatch);
    }
    CHECK_THROWS_AS(g.add_vertex(7), Error); // unknown label code
}

TEST_CASE("edge ids are dense in insertion order") {
    PropertyGraph g = make_graph();
    g.add_vertex(0);
    g.add_vertex(0);
    CHECK(g.add_edge(0, 1, 0) == 0);
    for (int i = 1; i < 19; ++i) CHECK(g.add_edge(0, 1, 0) == static_cast<EdgeId>(i));
    try {
        g.add_edge(0, 9, 0);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownVertex);
    }
}

TEST_CASE("property round-trip for every kind, unset reads as null") {
    PropertyGraph g = make_graph();
    const uint32_t code = g.catalog().find("curr", Attachment::Edge)->codes.intern("USD");
    g.add_vertex(0, {{"city", PropertyValue::categorical(
                                  g.catalog()
                                      .find("city", Attachment::Vertex)
                                      ->codes.intern("Waterloo"))}});
    g.add_vertex(0);
    g.add_edge(0, 1, 0,
               {{"amt", PropertyValue::of_int(42)},
                {"rate", PropertyValue::of_float(1.25)},
                {"curr", PropertyValue::categorical(code)}});
    CHECK(g.edge_property(0, "amt") == PropertyValue::of_int(42));
    CHECK(g.edge_property(0, "rate") == PropertyValue::of_float(1.25));
    CHECK(g.edge_property(0, "curr") == PropertyValue::categorical(code));
    CHECK(g.vertex_property(1, "city").is_null());
    CHECK(g.get_property(Attachment::Vertex, 0, "city") ==
          g.vertex_property(0, "city"));
    // vertex property asked through the edge side
    try {
        g.edge_property(0, "city");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownProperty);
    }
}

TEST_CASE("fixture loads with the constructed counts") {
    Database db;
    const LoadReport report = load_fixture(db);
    CHECK(report.vertices == 12);
    CHECK(report.edges == 19);
    CHECK(report.rejected == 0);
    // value read back from the fixture file
    CHECK(db.graph().edge_property(t(13), "amt") == PropertyValue::of_int(12000));
    CHECK(db.graph().edge(t(13)).src == 2);
    CHECK(db.graph().edge(t(13)).dst == 5);
}

TEST_CASE("empty edge file loads zero edges") {
    Database db;
    db.catalog().register_property("city", PropertyKind::Categorical, Attachment::Vertex);
    db.catalog().register_property("acc", PropertyKind::Categorical, Attachment::Vertex);
    const std::string ef = "/tmp/quiver_empty_edges.csv";
    std::ofstream(ef) << "src,dst,label\n";
    const LoadReport report = db.load_csv(fixture_path("financial_vertices.csv"), ef);
    CHECK(report.vertices == 12);
    CHECK(report.edges == 0);
    std::remove(ef.c_str());
}

TEST_CASE("malformed rows raise ParseError with a line number") {
    Database db;
    const std::string vf = "/tmp/quiver_bad_vertices.csv";
    std::ofstream(vf) << "id,label\n0,Account\nnope,Account\n";
    const std::string ef = "/tmp/quiver_bad_edges.csv";
    std::ofstream(ef) << "src,dst,label\n";
    try {
        db.load_csv(vf, ef);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    std::remove(vf.c_str());
    std::remove(ef.c_str());
}

TEST_CASE("edges referencing unknown vertices are counted as rejected") {
    Database db;
    const std::string vf = "/tmp/quiver_v.csv";
    std::ofstream(vf) << "id,label\n0,A\n1,A\n";
    const std::string ef = "/tmp/quiver_e.csv";
    std::ofstream(ef) << "src,dst,label\n0,1,W\n0,7,W\n";
    const LoadReport report = db.load_csv(vf, ef);
    CHECK(report.edges == 1);
    CHECK(report.rejected == 1);
    std::remove(vf.c_str());
    std::remove(ef.c_str());
}

TEST_CASE("export then reload reproduces an equivalent graph") {
    Database db;
    load_fixture(db);
    const std::string vf = "/tmp/quiver_export_v.csv";
    const std::string ef = "/tmp/quiver_export_e.csv";
    db.export_csv(vf, ef);

    Database db2;
    PropertyCatalog& c = db2.catalog();
    c.register_property("city", PropertyKind::Categorical, Attachment::Vertex);
    c.register_property("acc", PropertyKind::Categorical, Attachment::Vertex);
    c.register_property("amt", PropertyKind::Int64, Attachment::Edge);
    c.register_property("currency", PropertyKind::Categorical, Attachment::Edge);
    c.register_property("date", PropertyKind::Int64, Attachment::Edge);
    const LoadReport report = db2.load_csv(vf, ef);
    CHECK(report.vertices == 12);
    CHECK(report.edges == 19);

    auto vertex_key = [](const PropertyGraph& g, VertexId v) {
        const auto& cat = g.catalog();
        return cat.vertex_labels().name(g.vertex_label(v)) + "|" +
               g.vertex_property(v, "city").to_string() + "|" +
               g.vertex_property(v, "acc").to_string();
    };
    auto edge_key = [](const PropertyGraph& g, EdgeId e) {
        const EdgeRecord& r = g.edge(e);
        return std::to_string(r.src) + ">" + std::to_string(r.dst) + "|" +
               g.catalog().edge_labels().name(r.label) + "|" +
               g.edge_property(e, "amt").to_string() + "|" +
               g.edge_property(e, "date").to_string();
    };
    std::multiset<std::string> a, b;
    for (VertexId v = 0; v < 12; ++v) {
        a.insert(vertex_key(db.graph(), v));
        b.insert(vertex_key(db2.graph(), v));
    }
    for (EdgeId e = 0; e < 19; ++e) {
        a.insert(edge_key(db.graph(), e));
        b.insert(edge_key(db2.graph(), e));
    }
    CHECK(a == b);
    std::remove(vf.c_str());
    std::remove(ef.c_str());
}

TEST_CASE("fixture adjacency matches the worked example") {
    Database db;
    load_fixture(db);
    const PropertyGraph& g = db.graph();
    CHECK(edge_set(g.out_edges(2)) == std::set<uint64_t>{t(7), t(8), t(13)});
    CHECK(edge_set(g.in_edges(2)) == std::set<uint64_t>{t(5), t(6), t(15), t(17)});
    CHECK(g.out_edges(5).size() == 9);
    CHECK(g.out_edges(11).empty());
    // dates strictly increase with the transfer ordinal
    for (int k = 1; k < 19; ++k)
        CHECK(g.edge_property(t(k), "date").as_int() <
              g.edge_property(t(k + 1), "date").as_int());
}
