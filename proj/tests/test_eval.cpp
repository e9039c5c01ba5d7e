#include "doctest.h"
#include "testutil.hpp"

using namespace ettx;
using namespace tu;

TEST_CASE("evaluation refuses machines that are not garbage free") {
    CHECK_THROWS_AS(evaluate(hoarder_machine(), {}), NotGarbageFree);
}

TEST_CASE("streaming evaluation matches brute force on fixed machines") {
    for (const Nsst& raw : {hoarder_machine(), two_start_copier()}) {
        Nsst g = garbage_free_transform(raw);
        for (const Word& w : all_words(raw.input, 5))
            CHECK(bag_eq(evaluate(g, w), oracle::nsst_bag(raw, w)));
    }
}

TEST_CASE("both initial states contribute outputs") {
    Nsst t = garbage_free_transform(two_start_copier());
    Bag<Doc> out = evaluate(t, to_word(d32("ab")));
    CHECK(out.sorted() == std::vector<Doc>{d32("ab"), d32("ba")});
}

TEST_CASE("the output limit truncates enumeration") {
    Nsst t = garbage_free_transform(two_start_copier());
    EvalStats st;
    Bag<Doc> out = evaluate(t, to_word(d32("aaaa")), &st, 1);
    CHECK(out.size() == 1);
    CHECK(st.outputs <= 1);
}

TEST_CASE("statistics reflect the run") {
    Nsst t = garbage_free_transform(two_start_copier());
    EvalStats st;
    Word w = to_word(d32("abab"));
    Bag<Doc> out = evaluate(t, w, &st);
    CHECK(st.outputs == out.size());
    CHECK(st.transitions_fired >= w.size());
    CHECK(st.ecsa_nodes > 0);
    CHECK(st.max_delay_steps > 0);
}

TEST_CASE("the state table mirrors reachable states") {
    Nsst t = garbage_free_transform(two_start_copier());
    Ecsa e;
    auto table = eval_table(t, to_word(d32("ab")), e);
    CHECK(!table.empty());
    std::size_t total = 0;
    for (const auto& [q, n] : table) total += e.materialize(n).size();
    CHECK(total == 2); // one surviving run per initial state
}

TEST_CASE("random garbage-free machines agree with brute force") {
    std::vector<Char> sigma{U'a', U'b'};
    std::vector<Char> omega{U'a', U'b'};
    int tried = 0;
    for (unsigned seed = 0; tried < 25; ++seed) {
        Rng rr(1000 + seed);
        Nsst raw = random_nsst(rr, 3, 2, sigma, omega);
        Nsst g = garbage_free_transform(raw);
        if (g.states.empty()) continue;
        ++tried;
        for (const Word& w : all_words(raw.input, 4))
            CHECK(bag_eq(evaluate(g, w), oracle::nsst_bag(raw, w)));
    }
}
