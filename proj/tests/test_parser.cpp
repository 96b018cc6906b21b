#include "quiver/ddl.hpp"
#include "quiver/errors.hpp"

#include <doctest.h>

using namespace quiver;
using namespace quiver::ddl;

TEST_CASE("the reconfiguration command from the index-tuning walkthrough parses") {
    const Command c = parse("RECONFIGURE PRIMARY INDEXES\n"
                            "PARTITION BY e_adj.label, e_adj.currency\n"
                            "SORT BY v_nbr.city");
    CHECK(c.type == Command::Type::ReconfigurePrimary);
    REQUIRE(c.partition_by.size() == 2);
    CHECK(c.partition_by[0].subject == "e_adj");
    CHECK(c.partition_by[0].prop == "label");
    CHECK(c.partition_by[1].prop == "currency");
    REQUIRE(c.sort_by.size() == 1);
    CHECK(c.sort_by[0].subject == "v_nbr");
    CHECK(c.sort_by[0].prop == "city");
}

TEST_CASE("the misspelled PARTITON keyword is rejected") {
    CHECK_THROWS_AS(parse("RECONFIGURE PRIMARY INDEXES PARTITON BY e_adj.label"), Error);
}

TEST_CASE("the 1-hop view command parses with predicate, direction and shape") {
    const Command c = parse("CREATE 1-HOP VIEW LargeUSDTrnx\n"
                            "MATCH v_s-[e_adj]->v_d\n"
                            "WHERE e_adj.currency=USD, e_adj.amt>10000\n"
                            "INDEX AS FW-BW\n"
                            "PARTITION BY e_adj.label SORT BY v_nbr.ID");
    CHECK(c.type == Command::Type::Create1Hop);
    CHECK(c.view_name == "LargeUSDTrnx");
    CHECK(c.direction == "FW-BW");
    REQUIRE(c.match.where.size() == 2);
    CHECK(c.match.where[0].lhs.var == "e_adj");
    CHECK(c.match.where[0].lhs.prop == "currency");
    CHECK(c.match.where[0].op == CmpOp::Eq);
    CHECK(c.match.where[0].rhs.text == "USD");
    CHECK(c.match.where[1].op == CmpOp::Gt);
    CHECK(c.match.where[1].rhs.inum == 10000);
    REQUIRE(c.partition_by.size() == 1);
    REQUIRE(c.sort_by.size() == 1);
    CHECK(c.sort_by[0].prop == "ID");
}

TEST_CASE("the 2-hop view command parses; e_b's position is recoverable") {
    const Command c = parse("CREATE 2-HOP VIEW MoneyFlow\n"
                            "MATCH v_s-[e_b]->v_d-[e_adj]->v_nbr\n"
                            "WHERE e_b.date<e_adj.date, e_adj.amt<e_b.amt\n"
                            "INDEX AS PARTITION BY e_adj.label SORT BY v_nbr.city");
    CHECK(c.type == Command::Type::Create2Hop);
    CHECK(c.view_name == "MoneyFlow");
    REQUIRE(c.match.edges.size() == 2);
    CHECK(c.match.edges[0].name == "e_b");
    CHECK(c.match.nodes[c.match.edges[0].from].name == "v_s");
    CHECK(c.match.nodes[c.match.edges[0].to].name == "v_d");
    CHECK(c.match.edges[1].name == "e_adj");
    CHECK(c.match.nodes[c.match.edges[1].from].name == "v_d");
    CHECK(c.match.nodes[c.match.edges[1].to].name == "v_nbr");
    CHECK(c.match.where.size() == 2);
}

TEST_CASE("all four 2-path orientations parse") {
    const char* bodies[] = {
        "v_s-[e_b]->v_d-[e_adj]->v_nbr",
        "v_s-[e_b]->v_d<-[e_adj]-v_nbr",
        "v_nbr-[e_adj]->v_s-[e_b]->v_d",
        "v_nbr<-[e_adj]-v_s-[e_b]->v_d",
    };
    for (const char* body : bodies) {
        const Command c = parse(std::string("CREATE 2-HOP VIEW X MATCH ") + body +
                                " WHERE e_b.date<e_adj.date");
        CHECK(c.match.edges.size() == 2);
    }
}

TEST_CASE("the redundant single-edge view still parses (rejection is semantic)") {
    const Command c = parse("CREATE 2-HOP VIEW Redundant\n"
                            "MATCH v_s-[e_b]->v_d-[e_adj]->v_nbr\n"
                            "WHERE e_adj.amt<10000");
    CHECK(c.type == Command::Type::Create2Hop);
    CHECK(!c.has_index_as);
}

TEST_CASE("the money-flow query parses with alpha, '&' and chained comparisons") {
    const Command c =
        parse("MATCH a1-[r1:]->a2-[r2:]->a3-[r3:]->a4\n"
              "WHERE r1.eID=t13,\n"
              "r1.date<r2.date & r2.amt<r1.amt<r2.amt+\xce\xb1 &\n"
              "r2.date<r3.date & r3.amt<r2.amt<r3.amt+\xce\xb1");
    CHECK(c.type == Command::Type::Match);
    CHECK(c.match.nodes.size() == 4);
    CHECK(c.match.edges.size() == 3);
    // eID atom + 2 + chained(2) + 2 + chained(2) = 1 + 3 + 3 = 7
    CHECK(c.match.where.size() == 7);
    const TextAtom& cut = c.match.where[3];
    CHECK(cut.rhs.has_offset);
    CHECK(cut.rhs.offset_word == "alpha");
    CHECK(c.match.where[0].rhs.text == "t13");
}

TEST_CASE("the three-branch tree query parses despite the missing comma") {
    const Command c = parse("MATCH a1-[:W]->a2-[:W]->a3, a1-[:W]->a4\n"
                            "      a1-[:DD]->a5-[:DD]->a6\n"
                            "WHERE a1.ID=v5, a3.city=a4.city=a6.city");
    CHECK(c.match.nodes.size() == 6);
    CHECK(c.match.edges.size() == 5);
    // anonymous edges get fresh names
    CHECK(c.match.edges[0].label == "W");
    CHECK(c.match.edges[3].label == "DD");
    // chained equality desugars into two atoms plus the id atom
    CHECK(c.match.where.size() == 3);
}

TEST_CASE("quoted strings and parenthesised nodes parse") {
    const Command c = parse("MATCH (c1)-[r1]->(a1:Account)-[r2]->a2\n"
                            "WHERE c1.name = 'Alice'");
    CHECK(c.match.nodes.size() == 3);
    CHECK(c.match.nodes[1].label == "Account");
    REQUIRE(c.match.where.size() == 1);
    CHECK(c.match.where[0].rhs.kind == Operand::Kind::Str);
    CHECK(c.match.where[0].rhs.text == "Alice");
}

TEST_CASE("the cyclic wire-transfer query parses") {
    const Command c = parse("MATCH a1-[r1:W]->a2-[r2:W]->a3, a3-[r3:W]->a1\n"
                            "WHERE a1.ID=v1");
    CHECK(c.match.nodes.size() == 3);
    CHECK(c.match.edges.size() == 3);
    CHECK(c.match.edges[0].label == "W");
    CHECK(c.match.where[0].rhs.text == "v1");
}

TEST_CASE("parse errors carry positions; bare MATCH is incomplete") {
    try {
        parse("MATCH");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
    CHECK_THROWS_AS(parse("FROBNICATE EVERYTHING"), Error);
    CHECK_THROWS_AS(parse("MATCH a1-[r1]->a2 WHERE a1.city"), Error);
}

TEST_CASE("other command surfaces parse") {
    CHECK(parse("STATS").type == Command::Type::Stats);
    CHECK(parse("SHOW INDEXES").type == Command::Type::ShowIndexes);
    CHECK(parse("FLUSH").type == Command::Type::Flush);
    const Command fi = parse("FLUSH INDEX MoneyFlow");
    CHECK(fi.flush_index == "MoneyFlow");
    const Command fp = parse("FLUSH PAGE MoneyFlow 128");
    CHECK(fp.flush_owner == 128);
    const Command load = parse("LOAD VERTICES 'v.csv' EDGES 'e.csv' SCHEMA 's.json'");
    CHECK(load.vertex_file == "v.csv");
    CHECK(load.schema_file == "s.json");
    const Command set = parse("SET alpha = 5000");
    CHECK(set.set_name == "alpha");
    CHECK(set.set_value == 5000.0);
    CHECK(parse("DROP INDEX MoneyFlow").view_name == "MoneyFlow");
    const Command exp = parse("EXPLAIN MATCH a1-[r1]->a2 WHERE r1.amt>10");
    CHECK(exp.type == Command::Type::Explain);
}
