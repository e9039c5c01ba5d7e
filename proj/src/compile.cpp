#include "ettx/compile.hpp"

#include <deque>
#include <string>

#include "ettx/errors.hpp"

namespace ettx {

namespace {

struct Product {
    const NormalizedDfa& dfa;
    const Dsst& tr;
    CompileStats* stats;

    std::vector<std::vector<std::pair<Symbol, int>>> brackets_from;
    std::map<std::pair<int, int>, int> base_id;
    std::vector<std::pair<int, int>> bases;
    std::deque<int> work;

    struct Edge {
        int from, to;
        Symbol sym;
        Assignment assign;
    };
    std::vector<Edge> edges;
    std::map<int, std::vector<Image>> finals; // per base, end-walk outputs
    int depth_cap;

    int intern(int p, int q) {
        auto [it, fresh] = base_id.try_emplace({p, q}, (int)bases.size());
        if (fresh) {
            bases.emplace_back(p, q);
            work.push_back(it->second);
        }
        return it->second;
    }

    void count_path() {
        if (stats) ++stats->gamma_paths;
    }

    // Walk bracket blocks from (p,q), then take the char edge `b`.
    void char_paths(int base, const Symbol& b, int p, int q, const Assignment& acc,
                    int depth) {
        if (depth > depth_cap) throw Error("bracket walk exceeded depth bound");
        if (auto pn = dfa.step(p, b)) {
            auto it = tr.delta.find({q, b});
            if (it != tr.delta.end()) {
                edges.push_back({base, intern(*pn, it->second.second), b,
                                 compose_assign(acc, it->second.first)});
                count_path();
            }
        }
        for (auto& [g, p2] : brackets_from[p]) {
            auto it = tr.delta.find({q, g});
            if (it == tr.delta.end()) continue;
            char_paths(base, b, p2, it->second.second,
                       compose_assign(acc, it->second.first), depth + 1);
        }
    }

    void final_paths(int base, int p, int q, const Assignment& acc, int depth) {
        if (depth > depth_cap) throw Error("bracket walk exceeded depth bound");
        if (auto pn = dfa.step(p, Symbol::chr(kEndMarker));
            pn && dfa.finals.count(*pn)) {
            auto it = tr.final_.find(q);
            if (it != tr.final_.end()) {
                if (auto img = subst(acc, it->second)) {
                    finals[base].push_back(std::move(*img));
                    count_path();
                }
            }
        }
        for (auto& [g, p2] : brackets_from[p]) {
            auto it = tr.delta.find({q, g});
            if (it == tr.delta.end()) continue;
            final_paths(base, p2, it->second.second,
                        compose_assign(acc, it->second.first), depth + 1);
        }
    }
};

} // namespace

Nsst et_to_nsst(const ExprPtr& e, const Dsst& t, const std::set<Char>& alphabet,
                CompileStats* stats) {
    NormalizedDfa dfa = normalized_dfa(compile_to_nfa(e, alphabet));
    for (Char c : alphabet)
        if (!t.input.count(Symbol::chr(c)))
            throw AlphabetMismatch("transformer misses letter " + utf8_encode_char(c));
    for (const std::string& x : dfa.vars)
        if (!t.input.count(Symbol::open(x)) || !t.input.count(Symbol::close(x)))
            throw AlphabetMismatch("transformer misses brackets of " + x);

    Product pr{dfa, t, stats, {}, {}, {}, {}, {}, {},
               4 * (int)dfa.vars.size() + 1};
    pr.brackets_from.resize(dfa.n);
    for (auto& [key, to] : dfa.delta)
        if (key.second.is_bracket())
            pr.brackets_from[key.first].emplace_back(key.second, to);

    Assignment id = identity_assign(t.registers);
    int start = pr.intern(dfa.start, t.q0);
    while (!pr.work.empty()) {
        int base = pr.work.front();
        pr.work.pop_front();
        auto [p, q] = pr.bases[base];
        for (Char b : alphabet)
            pr.char_paths(base, Symbol::chr(b), p, q, id, 0);
        pr.final_paths(base, p, q, id, 0);
    }
    if (stats) stats->base_states = pr.bases.size();

    Nsst out;
    for (Char b : alphabet) out.input.insert(Symbol::chr(b));
    out.output = t.output;
    out.registers = t.registers;
    for (std::size_t i = 0; i < pr.bases.size(); ++i)
        out.add_state("p" + std::to_string(pr.bases[i].first) + "_q" +
                      std::to_string(pr.bases[i].second));
    // one accepting variant per end walk; it inherits every edge into its base
    std::map<int, std::vector<int>> variants;
    for (auto& [base, imgs] : pr.finals)
        for (std::size_t j = 0; j < imgs.size(); ++j) {
            int v = out.add_state(out.states[base] + "_f" + std::to_string(j));
            out.final_.emplace(v, imgs[j]);
            variants[base].push_back(v);
        }
    for (auto& ed : pr.edges) {
        out.delta.push_back({ed.from, ed.sym, ed.assign, ed.to});
        auto it = variants.find(ed.to);
        if (it != variants.end())
            for (int v : it->second)
                out.delta.push_back({ed.from, ed.sym, ed.assign, v});
    }
    Valuation eps;
    for (const Reg& x : t.registers) eps.m.emplace(x, Image{});
    out.init.emplace(start, eps);
    auto it = variants.find(start);
    if (it != variants.end())
        for (int v : it->second) out.init.emplace(v, eps);
    return trim_nsst(out);
}

} // namespace ettx
