#include "doctest.h"
#include "testutil.hpp"

using namespace ettx;
using namespace tu;

namespace {

Valuation val(const char* x, const char* sx, const char* y, const char* sy) {
    return Valuation{{{x, image_of(d32(sx))}, {y, image_of(d32(sy))}}};
}

} // namespace

TEST_CASE("ropes concatenate in constant depth growth and flatten in order") {
    RopePtr r = rope_cat(rope_text(d32("ab")), rope_text(d32("cd")));
    r = rope_cat(r, rope_text(d32("e")));
    r = rope_cat(nullptr, r);
    Doc out;
    rope_flatten(r, out);
    CHECK(out == d32("abcde"));
}

TEST_CASE("leaf, extend, and unite materialize their bag semantics") {
    Ecsa e;
    NodeRef a = e.leaf(val("X", "a", "Y", "b"));
    Assignment s{{{"X", {Atom::r("X"), Atom::c(U'c')}}, {"Y", {Atom::r("Y")}}}};
    NodeRef b = e.extend(a, s);
    Bag<Valuation> mb = e.materialize(b);
    REQUIRE(mb.size() == 1);
    CHECK(mb.items[0] == val("X", "ac", "Y", "b"));

    NodeRef u = e.unite(b, b);
    CHECK(e.materialize(u).size() == 2);
    CHECK(e.check_safe(u));
}

TEST_CASE("dropping a register propagates to materialized valuations") {
    Ecsa e;
    NodeRef a = e.leaf(val("X", "a", "Y", "b"));
    Assignment s{{{"X", {Atom::r("X")}}}}; // Y forgotten
    Bag<Valuation> m = e.materialize(e.extend(a, s));
    REQUIRE(m.size() == 1);
    CHECK(m.items[0].m.count("Y") == 0);
    Assignment dead{{{"X", {Atom::r("Z")}}}}; // Z never set
    Bag<Valuation> m2 = e.materialize(e.extend(a, dead));
    REQUIRE(m2.size() == 1);
    CHECK(m2.items[0].m.empty());
}

TEST_CASE("relabels never stack") {
    Ecsa e;
    NodeRef a = e.leaf(val("X", "a", "Y", "b"));
    Assignment swap{{{"X", {Atom::r("Y")}}, {"Y", {Atom::r("X")}}}};
    NodeRef r1 = e.extend(a, swap);
    NodeRef r2 = e.extend(r1, swap);
    CHECK(e.node(r2).kind == NodeKind::Relabel);
    CHECK(e.node(e.node(r2).l).kind == NodeKind::Leaf);
    Bag<Valuation> m = e.materialize(r2);
    REQUIRE(m.size() == 1);
    CHECK(m.items[0] == val("X", "a", "Y", "b"));
    CHECK(e.check_safe(r2));
}

TEST_CASE("long union chains stay within the nesting bound") {
    Ecsa e;
    std::vector<NodeRef> leaves;
    NodeRef u = e.leaf(val("X", "", "Y", ""));
    Assignment swap{{{"X", {Atom::r("Y")}}, {"Y", {Atom::r("X")}}}};
    for (int i = 0; i < 32; ++i) {
        NodeRef l = e.leaf(val("X", std::string(1, 'a' + i % 3).c_str(), "Y", ""));
        u = e.unite(u, l);
        if (i % 3 == 0) u = e.extend(u, swap); // cap the union with a relabel
    }
    CHECK(e.check_safe(u));
    CHECK(ecsa_invariants_hold(e));
    CHECK(e.materialize(u).size() == 33);
}

TEST_CASE("preconditions are enforced") {
    Ecsa e;
    Assignment notval{{{"X", {Atom::r("Y")}}}};
    CHECK_THROWS_AS(e.leaf(notval), PreconditionViolation);
    NodeRef a = e.leaf(val("X", "a", "Y", "b"));
    Assignment copyfull{{{"X", {Atom::r("X")}}, {"Y", {Atom::r("X")}}}};
    CHECK_THROWS_AS(e.extend(a, copyfull), PreconditionViolation);
}

TEST_CASE("cursor enumeration equals materialization") {
    Ecsa e;
    NodeRef a = e.leaf(val("X", "a", "Y", "b"));
    NodeRef b = e.leaf(val("X", "c", "Y", "d"));
    Assignment mix{{{"X", {Atom::r("X"), Atom::c(U'z'), Atom::r("Y")}}}};
    NodeRef m = e.extend(e.unite(a, b), mix);
    CHECK(bag_eq(drain_cursor(e.cursor(m)), e.materialize(m)));
}

TEST_CASE("random DAGs keep their invariants and cursors match materialization") {
    Rng r(7);
    std::vector<Reg> regs{"A", "B"};
    std::vector<Char> omega{U'a', U'b'};
    Ecsa e;
    std::vector<NodeRef> nodes;
    for (int i = 0; i < 400; ++i) random_ecsa_op(r, e, nodes, regs, omega);
    CHECK(ecsa_invariants_hold(e));
    for (int i = 0; i < 60; ++i) {
        NodeRef n = nodes[r.below((int)nodes.size())];
        CHECK(bag_eq(drain_cursor(e.cursor(n)), e.materialize(n)));
    }
}

TEST_CASE("earlier nodes are unaffected by later operations") {
    Rng r(11);
    std::vector<Reg> regs{"A", "B"};
    std::vector<Char> omega{U'a'};
    Ecsa e;
    std::vector<NodeRef> nodes;
    for (int i = 0; i < 50; ++i) random_ecsa_op(r, e, nodes, regs, omega);
    NodeRef pin = nodes[r.below((int)nodes.size())];
    Bag<Valuation> before = e.materialize(pin);
    for (int i = 0; i < 100; ++i) random_ecsa_op(r, e, nodes, regs, omega);
    CHECK(bag_eq(e.materialize(pin), before));
    CHECK(bag_eq(drain_cursor(e.cursor(pin)), before));
}
