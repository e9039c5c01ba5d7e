#include "ettx/oracle.hpp"

#include <deque>

#include "ettx/errors.hpp"

namespace ettx {
namespace oracle {

namespace {

// All (normalized gap form, reachable state set) pairs from S over bracket and
// ε edges of the raw NFA.
std::map<GapBits, std::set<int>> gap_reach(const Nfa& n, const std::set<int>& s,
                                           const GapBits& zero,
                                           const Budget& budget,
                                           std::uint64_t& configs) {
    std::set<std::pair<int, GapBits>> seen;
    std::deque<std::pair<int, GapBits>> work;
    auto push = [&](int q, const GapBits& g) {
        if (seen.emplace(q, g).second) {
            if (++configs > budget.max_configs)
                throw BudgetExceeded("tuple enumeration budget exhausted");
            work.emplace_back(q, g);
        }
    };
    for (int q : s) push(q, zero);
    while (!work.empty()) {
        auto [q, g] = work.front();
        work.pop_front();
        for (auto& [a, b] : n.eps)
            if (a == q) push(b, g);
        for (auto& [a, sym, b] : n.trans) {
            if (a != q || sym.is_chr()) continue;
            auto nb = bits_update(g.at(sym.var), sym.kind);
            if (!nb) continue;
            GapBits g2 = g;
            g2[sym.var] = *nb;
            push(b, g2);
        }
    }
    std::map<GapBits, std::set<int>> reach;
    for (auto& [q, g] : seen) reach[g].insert(q);
    return reach;
}

struct TupleSearch {
    const Nfa& nfa;
    const Doc& d;
    const Budget& budget;
    GapBits zero;
    std::uint64_t configs = 0;
    std::set<MultispanTuple> out;

    void go(int gap, const std::set<int>& s, const std::map<std::string, int>& pending,
            const MultispanTuple& t) {
        bool last = gap == (int)d.size() + 1;
        for (auto& [g, s2] : gap_reach(nfa, s, zero, budget, configs)) {
            MultispanTuple t2 = t;
            std::map<std::string, int> pend2 = pending;
            bool ok = true;
            for (auto& [x, b] : g) {
                if (b.c) {
                    auto it = pend2.find(x);
                    if (it == pend2.end()) { ok = false; break; }
                    t2.bindings[x].insert({it->second, gap});
                    pend2.erase(it);
                }
                // a still-open span forbids further brackets for x in this gap
                if (pend2.count(x) && (b.e || b.o)) { ok = false; break; }
                if (b.e) t2.bindings[x].insert({gap, gap});
                if (b.o) {
                    if (last) { ok = false; break; }
                    pend2.emplace(x, gap);
                }
            }
            if (!ok) continue;
            if (last) {
                if (!pend2.empty()) continue;
                for (int q : s2)
                    if (nfa.finals.count(q)) {
                        out.insert(t2);
                        break;
                    }
                continue;
            }
            std::set<int> s3 = nfa_step(nfa, s2, Symbol::chr(d[gap - 1]));
            if (!s3.empty()) go(gap + 1, s3, pend2, t2);
        }
    }
};

} // namespace

std::set<MultispanTuple> enumerate_tuples(const ExprPtr& e, const Doc& d,
                                          const std::set<Char>& alphabet,
                                          const Budget& budget) {
    Nfa nfa = compile_to_nfa(e, alphabet);
    TupleSearch ts{nfa, d, budget, {}, 0, {}};
    MultispanTuple empty;
    for (const std::string& x : nfa.vars) {
        ts.zero.emplace(x, VarBits{});
        empty.bindings.emplace(x, std::set<Span>{});
    }
    ts.go(1, eps_closure(nfa, {nfa.start}), {}, empty);
    return std::move(ts.out);
}

Bag<Doc> nsst_bag(const Nsst& t, const Word& w, const Budget& budget) {
    Bag<Doc> out;
    for (const Run& r : nsst_accepting_runs(t, w, budget).items) out.add(r.out);
    return out;
}

Bag<Doc> et_bag(const ExprPtr& e, const Dsst& t, const Doc& d,
                const std::set<Char>& alphabet, const Budget& budget) {
    Bag<Doc> out;
    for (const MultispanTuple& tup : enumerate_tuples(e, d, alphabet, budget)) {
        MultirefWord w = encode(tup, d);
        if (auto r = dsst_run(t, w.symbols)) out.add(*r);
    }
    return out;
}

Bag<Doc> compose_bag(const Nsst& t1, const Nsst& t2, const Word& w,
                     const Budget& budget) {
    Bag<Doc> out;
    for (const Doc& u : nsst_bag(t1, w, budget).items) {
        Word mid = to_word(u);
        bool in_sigma2 = true;
        for (const Symbol& s : mid)
            if (!t2.input.count(s)) { in_sigma2 = false; break; }
        if (!in_sigma2) continue;
        for (const Doc& v : nsst_bag(t2, mid, budget).items) out.add(v);
    }
    return out;
}

} // namespace oracle
} // namespace ettx
