#include "oracles.hpp"

#include <doctest.h>

using namespace quiver;
using namespace quiver::testing;

namespace {

QueryAtom qatom(QueryRef lhs, CmpOp op, PropertyValue v) {
    QueryAtom a;
    a.lhs = std::move(lhs);
    a.op = op;
    a.rhs_const = v;
    return a;
}

PlanAccessor vertex_accessor(const Database& db, const char* index, int bound, int qe,
                             Direction dir, std::vector<PropertyValue> key_path = {}) {
    PlanAccessor acc;
    acc.index = db.store().find(index);
    REQUIRE(acc.index != nullptr);
    acc.query_edge = qe;
    acc.bound_vertex = bound;
    acc.dir = dir;
    acc.key_path = std::move(key_path);
    return acc;
}

} // namespace

TEST_CASE("scan by fixed edge id binds the edge and both endpoints") {
    Database db;
    load_fixture(db);
    QueryGraph q;
    const int a1 = q.add_vertex("a1");
    const int a2 = q.add_vertex("a2");
    const int r1 = q.add_edge("r1", a1, a2);
    q.finalize();

    Plan plan;
    plan.query = q;
    PlanStep scan;
    scan.kind = StepKind::ScanEdge;
    scan.var = r1;
    scan.selector.fixed_id = t(13);
    plan.steps.push_back(scan);

    Executor exec(db.graph(), plan);
    MatchRow row;
    REQUIRE(exec.next(row));
    CHECK(row.e[r1] == t(13));
    CHECK(row.v[a1] == 2);
    CHECK(row.v[a2] == 5);
    CHECK(!exec.next(row));
}

TEST_CASE("vertex scans: empty graph, full scan, id range") {
    Database empty_db;
    QueryGraph q;
    q.add_vertex("a");
    q.finalize();
    Plan plan;
    plan.query = q;
    PlanStep scan;
    scan.kind = StepKind::ScanVertex;
    scan.var = 0;
    plan.steps.push_back(scan);
    Executor none(empty_db.graph(), plan);
    MatchRow row;
    CHECK(!none.next(row));

    Database db;
    load_fixture(db);
    Executor all(db.graph(), plan);
    CHECK(all.all().size() == 12);

    Plan ranged = plan;
    ranged.steps[0].selector.atoms.push_back(
        qatom(QueryRef{false, 0, kIdProp}, CmpOp::Lt, PropertyValue::of_int(5)));
    Executor some(db.graph(), ranged);
    CHECK(some.all().size() == 5);
}

TEST_CASE("z=1 extension output equals the sum of list lengths") {
    Database db;
    load_fixture(db);
    QueryGraph q;
    const int a1 = q.add_vertex("a1");
    const int a2 = q.add_vertex("a2");
    const int r1 = q.add_edge("r1", a1, a2);
    q.finalize();

    Plan plan;
    plan.query = q;
    PlanStep scan;
    scan.kind = StepKind::ScanVertex;
    scan.var = a1;
    plan.steps.push_back(scan);
    PlanStep ext;
    ext.kind = StepKind::Extend;
    ext.target = a2;
    ext.accessors.push_back(vertex_accessor(db, "primary-fw", a1, r1, Direction::FW));
    plan.steps.push_back(ext);

    Executor exec(db.graph(), plan);
    const auto rows = exec.all();
    CHECK(rows.size() == 19);
    CHECK(exec.stats().edges_scanned == 19);
}

TEST_CASE("triangle intersection matches the embedding oracle") {
    Database db;
    load_fixture(db);
    const auto w = db.graph().catalog().edge_labels().find("W");
    REQUIRE(w);
    QueryGraph q;
    const int a1 = q.add_vertex("a1");
    const int a2 = q.add_vertex("a2");
    const int a3 = q.add_vertex("a3");
    const int r1 = q.add_edge("r1", a1, a2);
    const int r2 = q.add_edge("r2", a2, a3);
    const int r3 = q.add_edge("r3", a3, a1);
    q.edges[r1].label = *w;
    q.edges[r2].label = *w;
    q.edges[r3].label = *w;
    q.finalize();

    // manual WCOJ plan: scan a1, extend a2, intersect into a3
    const std::vector<PropertyValue> wkey{PropertyValue::categorical(*w)};
    Plan plan;
    plan.query = q;
    PlanStep scan;
    scan.kind = StepKind::ScanVertex;
    scan.var = a1;
    plan.steps.push_back(scan);
    PlanStep e1;
    e1.kind = StepKind::Extend;
    e1.target = a2;
    e1.accessors.push_back(vertex_accessor(db, "primary-fw", a1, r1, Direction::FW, wkey));
    plan.steps.push_back(e1);
    PlanStep e2;
    e2.kind = StepKind::Extend;
    e2.target = a3;
    e2.accessors.push_back(vertex_accessor(db, "primary-fw", a2, r2, Direction::FW, wkey));
    e2.accessors.push_back(vertex_accessor(db, "primary-bw", a1, r3, Direction::BW, wkey));
    plan.steps.push_back(e2);

    Executor exec(db.graph(), plan);
    CHECK(row_set(exec.all()) == row_set(EmbeddingOracle(db.graph(), q).run()));
}

TEST_CASE("intersection of disjoint lists is empty") {
    Database db;
    RandomGraphSpec spec;
    register_test_schema(db.catalog(), spec);
    for (int i = 0; i < 5; ++i) db.add_vertex(0);
    db.insert_edge(0, 2, 0);
    db.insert_edge(1, 3, 0);
    db.flush_all();

    QueryGraph q;
    const int a = q.add_vertex("a");
    const int b = q.add_vertex("b");
    const int c = q.add_vertex("c");
    const int r1 = q.add_edge("r1", a, c);
    const int r2 = q.add_edge("r2", b, c);
    q.finalize();

    Plan plan;
    plan.query = q;
    PlanStep sa;
    sa.kind = StepKind::ScanVertex;
    sa.var = a;
    sa.selector.fixed_id = 0;
    plan.steps.push_back(sa);
    PlanStep sb;
    sb.kind = StepKind::Extend;
    sb.target = b;
    // bind b via a scan-like trick is unavailable; use an explicit two-step
    // plan instead: a->c first, then b by intersecting into c is the real
    // test, so extend c, then bind b backward from c.
    sb.target = c;
    sb.accessors.push_back(vertex_accessor(db, "primary-fw", a, r1, Direction::FW));
    plan.steps.push_back(sb);
    PlanStep sc;
    sc.kind = StepKind::Extend;
    sc.target = b;
    sc.accessors.push_back(vertex_accessor(db, "primary-bw", c, r2, Direction::BW));
    plan.steps.push_back(sc);
    Executor exec(db.graph(), plan);
    const auto rows = exec.all();
    CHECK(row_set(rows) == row_set(EmbeddingOracle(db.graph(), q).run()));

    // now the true disjoint intersection: vertices 0 and 1 share no neighbour
    // when intersecting out-lists
    QueryGraph q2;
    const int x = q2.add_vertex("x");
    const int y = q2.add_vertex("y");
    const int z = q2.add_vertex("z");
    const int e1 = q2.add_edge("e1", x, z);
    const int e2 = q2.add_edge("e2", y, z);
    q2.atoms.push_back(
        qatom(QueryRef{false, x, kIdProp}, CmpOp::Eq, PropertyValue::of_int(0)));
    q2.atoms.push_back(
        qatom(QueryRef{false, y, kIdProp}, CmpOp::Eq, PropertyValue::of_int(1)));
    q2.finalize();
    Plan p2;
    p2.query = q2;
    PlanStep s1;
    s1.kind = StepKind::ScanVertex;
    s1.var = x;
    s1.selector.fixed_id = 0;
    p2.steps.push_back(s1);
    PlanStep s2;
    s2.kind = StepKind::Extend;
    s2.target = y;
    // y reached by... no edge between x and y; emulate by scanning z first.
    s2.target = z;
    s2.accessors.push_back(vertex_accessor(db, "primary-fw", x, e1, Direction::FW));
    p2.steps.push_back(s2);
    PlanStep s3;
    s3.kind = StepKind::Extend;
    s3.target = y;
    s3.accessors.push_back(vertex_accessor(db, "primary-bw", z, e2, Direction::BW));
    p2.steps.push_back(s3);
    PlanStep f;
    f.kind = StepKind::Filter;
    f.filter_atoms = q2.atoms;
    p2.steps.push_back(f);
    Executor e2x(db.graph(), p2);
    CHECK(e2x.all().empty()); // 0 -> 2 but nothing from 1 -> 2
}

TEST_CASE("multi-extend equality-joins city-sorted lists (diamond shape)") {
    Database db;
    load_fixture(db);
    // city-sorted secondary views in both directions
    IndexConfig cfg;
    cfg.direction = Direction::FWBW;
    cfg.partitioning = db.primary(Direction::FW).config().partitioning;
    SortKey city;
    city.subject = Subject::NbrVertex;
    city.property = "city";
    cfg.sorting.keys.push_back(city);
    db.create_vertex_view("VPc", cfg);

    // a2 <- a1 -> ... wait: the 4-cycle a1->a2->a3->a4->a1 matched as
    // (a2, a4) pairs with equal city around a fixed a1
    QueryGraph q;
    const int a1 = q.add_vertex("a1");
    const int a2 = q.add_vertex("a2");
    const int a4 = q.add_vertex("a4");
    const int e1 = q.add_edge("e1", a1, a2);
    const int e4 = q.add_edge("e4", a4, a1);
    QueryAtom eq;
    eq.lhs = QueryRef{false, a2, "city"};
    eq.op = CmpOp::Eq;
    eq.rhs_is_ref = true;
    eq.rhs_ref = QueryRef{false, a4, "city"};
    q.atoms.push_back(eq);
    q.finalize();

    Plan plan;
    plan.query = q;
    PlanStep scan;
    scan.kind = StepKind::ScanVertex;
    scan.var = a1;
    plan.steps.push_back(scan);
    PlanStep me;
    me.kind = StepKind::MultiExtend;
    me.accessors.push_back(vertex_accessor(db, "VPc-fw", a1, e1, Direction::FW));
    me.accessors.push_back(vertex_accessor(db, "VPc-bw", a1, e4, Direction::BW));
    me.accessor_target = {a2, a4};
    plan.steps.push_back(me);

    Executor exec(db.graph(), plan);
    CHECK(row_set(exec.all()) == row_set(EmbeddingOracle(db.graph(), q).run()));
}

TEST_CASE("multi-extend corner cases: empty list, aligned singletons") {
    Database db;
    RandomGraphSpec spec;
    register_test_schema(db.catalog(), spec);
    for (int i = 0; i < 4; ++i)
        db.add_vertex(0, {{"city", PropertyValue::categorical(1)}});
    db.insert_edge(0, 1, 0);
    db.insert_edge(2, 0, 0);
    db.flush_all();
    IndexConfig cfg;
    cfg.direction = Direction::FWBW;
    cfg.partitioning = db.primary(Direction::FW).config().partitioning;
    SortKey city;
    city.subject = Subject::NbrVertex;
    city.property = "city";
    cfg.sorting.keys.push_back(city);
    db.create_vertex_view("VPc", cfg);

    QueryGraph q;
    const int a1 = q.add_vertex("a1");
    const int a2 = q.add_vertex("a2");
    const int a4 = q.add_vertex("a4");
    const int e1 = q.add_edge("e1", a1, a2);
    const int e4 = q.add_edge("e4", a4, a1);
    QueryAtom eq;
    eq.lhs = QueryRef{false, a2, "city"};
    eq.op = CmpOp::Eq;
    eq.rhs_is_ref = true;
    eq.rhs_ref = QueryRef{false, a4, "city"};
    q.atoms.push_back(eq);
    q.finalize();

    Plan plan;
    plan.query = q;
    PlanStep scan;
    scan.kind = StepKind::ScanVertex;
    scan.var = a1;
    plan.steps.push_back(scan);
    PlanStep me;
    me.kind = StepKind::MultiExtend;
    me.accessors.push_back(vertex_accessor(db, "VPc-fw", a1, e1, Direction::FW));
    me.accessors.push_back(vertex_accessor(db, "VPc-bw", a1, e4, Direction::BW));
    me.accessor_target = {a2, a4};
    plan.steps.push_back(me);

    Executor exec(db.graph(), plan);
    const auto rows = exec.all();
    // only vertex 0 has both an out- and an in-edge; cities all equal
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].v[a1] == 0);
    CHECK(rows[0].v[a2] == 1);
    CHECK(rows[0].v[a4] == 2);
}

TEST_CASE("filter: identity and contradiction") {
    Database db;
    load_fixture(db);
    QueryGraph q;
    q.add_vertex("a");
    q.finalize();
    Plan plan;
    plan.query = q;
    PlanStep scan;
    scan.kind = StepKind::ScanVertex;
    scan.var = 0;
    plan.steps.push_back(scan);
    PlanStep f;
    f.kind = StepKind::Filter;
    plan.steps.push_back(f); // no atoms = identity
    Executor id(db.graph(), plan);
    CHECK(id.all().size() == 12);

    plan.steps[1].filter_atoms.push_back(
        qatom(QueryRef{false, 0, kIdProp}, CmpOp::Lt, PropertyValue::of_int(0)));
    Executor none(db.graph(), plan);
    CHECK(none.all().empty());
}

TEST_CASE("single-vertex query yields one match per vertex") {
    Database db;
    load_fixture(db);
    QueryGraph q;
    q.add_vertex("a");
    q.finalize();
    const auto result = db.execute(q);
    CHECK(result.rows.size() == 12);
    CHECK(result.stats.matches == 12);
    CHECK(result.stats.edges_scanned == 0);
}

TEST_CASE("optimizer plans equal the embedding oracle on random graphs") {
    std::mt19937 rng(53);
    for (int round = 0; round < 12; ++round) {
        Database db;
        RandomGraphSpec spec;
        spec.max_vertices = 20;
        spec.max_edges = 60;
        register_test_schema(db.catalog(), spec);
        populate_random_graph(db, rng, spec);
        db.flush_all();

        QueryGraph q;
        const int a = q.add_vertex("a");
        const int b = q.add_vertex("b");
        const int c = q.add_vertex("c");
        q.add_edge("r1", a, b);
        q.add_edge("r2", b, c);
        if (round % 2) q.add_edge("r3", c, a); // triangle on odd rounds
        q.atoms.push_back(
            qatom(QueryRef{false, a, "city"}, CmpOp::Eq, PropertyValue::categorical(1)));
        q.finalize();

        const auto result = db.execute(q);
        CHECK(row_set(result.rows) == row_set(EmbeddingOracle(db.graph(), q).run()));
    }
}
