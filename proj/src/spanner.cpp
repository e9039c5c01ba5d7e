#include "ettx/spanner.hpp"

#include <algorithm>
#include <deque>

#include "ettx/errors.hpp"

namespace ettx {

ExprPtr MultispannerExpr::eps() {
    auto e = std::make_shared<MultispannerExpr>();
    e->kind = Epsilon;
    return e;
}
ExprPtr MultispannerExpr::lit(Char c) {
    auto e = std::make_shared<MultispannerExpr>();
    e->kind = Literal;
    e->ch = c;
    return e;
}
ExprPtr MultispannerExpr::dot() {
    auto e = std::make_shared<MultispannerExpr>();
    e->kind = Dot;
    return e;
}
ExprPtr MultispannerExpr::concat(ExprPtr l, ExprPtr r) {
    auto e = std::make_shared<MultispannerExpr>();
    e->kind = Concat;
    e->a = std::move(l);
    e->b = std::move(r);
    return e;
}
ExprPtr MultispannerExpr::alt(ExprPtr l, ExprPtr r) {
    auto e = std::make_shared<MultispannerExpr>();
    e->kind = Alt;
    e->a = std::move(l);
    e->b = std::move(r);
    return e;
}
ExprPtr MultispannerExpr::star(ExprPtr x) {
    auto e = std::make_shared<MultispannerExpr>();
    e->kind = Star;
    e->a = std::move(x);
    return e;
}
ExprPtr MultispannerExpr::capture(std::string x, ExprPtr body) {
    if (expr_vars(body).count(x))
        throw VariableNestingError(x);
    auto e = std::make_shared<MultispannerExpr>();
    e->kind = Capture;
    e->var = std::move(x);
    e->a = std::move(body);
    return e;
}

std::set<Char> expr_chars(const ExprPtr& e) {
    std::set<Char> r;
    if (!e) return r;
    if (e->kind == MultispannerExpr::Literal) r.insert(e->ch);
    for (const auto& sub : {e->a, e->b})
        if (sub)
            for (Char c : expr_chars(sub)) r.insert(c);
    return r;
}

std::set<std::string> expr_vars(const ExprPtr& e) {
    std::set<std::string> r;
    if (!e) return r;
    if (e->kind == MultispannerExpr::Capture) r.insert(e->var);
    for (const auto& sub : {e->a, e->b})
        if (sub)
            for (const auto& v : expr_vars(sub)) r.insert(v);
    return r;
}

bool expr_has_dot(const ExprPtr& e) {
    if (!e) return false;
    if (e->kind == MultispannerExpr::Dot) return true;
    return expr_has_dot(e->a) || expr_has_dot(e->b);
}

// ---- parser ----

namespace {

bool is_name_start(Char c) {
    return (c >= U'A' && c <= U'Z') || (c >= U'a' && c <= U'z') || c == U'_';
}
bool is_name_char(Char c) {
    return is_name_start(c) || (c >= U'0' && c <= U'9');
}
bool is_space(Char c) {
    return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r';
}

} // namespace

ExprPtr parse_expr(const std::string& text) {
    std::u32string s = utf8_decode(text);

    // recursive descent over the decoded string
    struct P {
        const std::u32string& s;
        std::size_t i = 0;

        void skip_ws() {
            while (i < s.size() && is_space(s[i])) ++i;
        }
        bool at_end() const { return i >= s.size(); }

        bool starts_atom() {
            std::size_t save = i;
            skip_ws();
            if (at_end()) { i = save; return false; }
            Char c = s[i];
            i = save;
            return c != U')' && c != U'}' && c != U'*' && c != U'+' && c != U'|';
        }

        ExprPtr alt() {
            ExprPtr e = concat();
            for (;;) {
                std::size_t save = i;
                bool had_ws = false;
                while (i < s.size() && is_space(s[i])) { ++i; had_ws = true; }
                if (!at_end() && (s[i] == U'|' || (s[i] == U'+' && had_ws))) {
                    ++i;
                    e = MultispannerExpr::alt(e, concat());
                } else {
                    i = save;
                    return e;
                }
            }
        }

        ExprPtr concat() {
            skip_ws();
            if (at_end() || !starts_atom())
                throw SyntaxError("expected expression at " + std::to_string(i));
            ExprPtr e = postfix();
            while (starts_atom()) {
                skip_ws();
                e = MultispannerExpr::concat(e, postfix());
            }
            return e;
        }

        ExprPtr postfix() {
            ExprPtr e = atom();
            for (;;) {
                if (!at_end() && s[i] == U'*') {
                    ++i;
                    e = MultispannerExpr::star(e);
                } else if (!at_end() && s[i] == U'+') {
                    // adjacent '+' is one-or-more
                    ++i;
                    e = MultispannerExpr::concat(e, MultispannerExpr::star(e));
                } else {
                    return e;
                }
            }
        }

        ExprPtr atom() {
            skip_ws();
            if (at_end()) throw SyntaxError("unexpected end of expression");
            Char c = s[i];
            if (c == U'\\') {
                if (i + 1 >= s.size())
                    throw SyntaxError("dangling escape at " + std::to_string(i));
                Char lit = s[i + 1];
                i += 2;
                return MultispannerExpr::lit(lit);
            }
            if (c == U'(') {
                ++i;
                ExprPtr e = alt();
                skip_ws();
                if (at_end() || s[i] != U')')
                    throw SyntaxError("expected ')' at " + std::to_string(i));
                ++i;
                return e;
            }
            if (c == U'.') {
                ++i;
                return MultispannerExpr::dot();
            }
            if (is_name_start(c)) {
                std::size_t j = i;
                while (j < s.size() && is_name_char(s[j])) ++j;
                if (j < s.size() && s[j] == U'{') {
                    std::string var = utf8_encode(s.substr(i, j - i));
                    i = j + 1;
                    ExprPtr body = alt();
                    skip_ws();
                    if (at_end() || s[i] != U'}')
                        throw SyntaxError("expected '}' at " + std::to_string(i));
                    ++i;
                    return MultispannerExpr::capture(std::move(var), body);
                }
                if (c == U'_') {
                    ++i;
                    return MultispannerExpr::eps();
                }
                ++i;
                return MultispannerExpr::lit(c);
            }
            if (c == U')' || c == U'}' || c == U'*' || c == U'+' || c == U'|')
                throw SyntaxError("unexpected symbol at " + std::to_string(i));
            ++i;
            return MultispannerExpr::lit(c);
        }
    };

    P p{s};
    ExprPtr e = p.alt();
    p.skip_ws();
    if (!p.at_end()) throw SyntaxError("trailing input at " + std::to_string(p.i));
    return e;
}

std::string render_expr(const ExprPtr& e) {
    switch (e->kind) {
    case MultispannerExpr::Epsilon:
        return "_";
    case MultispannerExpr::Literal: {
        Char c = e->ch;
        std::string lit = utf8_encode_char(c);
        if (std::string("(){}*+|._\\ \t\n\r").find(lit) != std::string::npos ||
            is_name_start(c))
            return "\\" + lit;
        return lit;
    }
    case MultispannerExpr::Dot:
        return ".";
    case MultispannerExpr::Concat:
        return "(" + render_expr(e->a) + " " + render_expr(e->b) + ")";
    case MultispannerExpr::Alt:
        return "(" + render_expr(e->a) + " | " + render_expr(e->b) + ")";
    case MultispannerExpr::Star:
        return "(" + render_expr(e->a) + ")*";
    case MultispannerExpr::Capture:
        return e->var + "{ " + render_expr(e->a) + " }";
    }
    return "?";
}

// ---- Thompson construction ----

namespace {

struct NfaBuilder {
    Nfa n;
    int fresh() { return n.n++; }
    void edge(int a, const Symbol& s, int b) { n.trans.emplace_back(a, s, b); }
    void eps(int a, int b) { n.eps.emplace_back(a, b); }

    // returns (in, out)
    std::pair<int, int> build(const ExprPtr& e, const std::set<Char>& sigma) {
        using K = MultispannerExpr;
        int in = fresh(), out = fresh();
        switch (e->kind) {
        case K::Epsilon:
            eps(in, out);
            break;
        case K::Literal:
            edge(in, Symbol::chr(e->ch), out);
            break;
        case K::Dot:
            for (Char c : sigma) edge(in, Symbol::chr(c), out);
            break;
        case K::Concat: {
            auto [i1, o1] = build(e->a, sigma);
            auto [i2, o2] = build(e->b, sigma);
            eps(in, i1);
            eps(o1, i2);
            eps(o2, out);
            break;
        }
        case K::Alt: {
            auto [i1, o1] = build(e->a, sigma);
            auto [i2, o2] = build(e->b, sigma);
            eps(in, i1);
            eps(in, i2);
            eps(o1, out);
            eps(o2, out);
            break;
        }
        case K::Star: {
            auto [i1, o1] = build(e->a, sigma);
            eps(in, out);
            eps(in, i1);
            eps(o1, i1);
            eps(o1, out);
            break;
        }
        case K::Capture: {
            auto [i1, o1] = build(e->a, sigma);
            int m1 = fresh(), m2 = fresh();
            eps(in, m1);
            edge(m1, Symbol::open(e->var), i1);
            edge(o1, Symbol::close(e->var), m2);
            eps(m2, out);
            break;
        }
        }
        return {in, out};
    }
};

} // namespace

Nfa compile_to_nfa(const ExprPtr& e, const std::set<Char>& alphabet) {
    if (alphabet.count(kEndMarker))
        throw AlphabetError("end marker not allowed in user alphabets");
    NfaBuilder b;
    b.n.alphabet = alphabet;
    b.n.vars = expr_vars(e);
    auto [in, out] = b.build(e, alphabet);
    b.n.start = in;
    b.n.finals = {out};
    return std::move(b.n);
}

std::set<int> eps_closure(const Nfa& n, std::set<int> s) {
    std::deque<int> work(s.begin(), s.end());
    while (!work.empty()) {
        int q = work.front();
        work.pop_front();
        for (auto [a, b] : n.eps)
            if (a == q && s.insert(b).second) work.push_back(b);
    }
    return s;
}

std::set<int> nfa_step(const Nfa& n, const std::set<int>& s, const Symbol& sym) {
    std::set<int> out;
    for (auto& [a, t, b] : n.trans)
        if (t == sym && s.count(a)) out.insert(b);
    return eps_closure(n, std::move(out));
}

bool nfa_accepts(const Nfa& n, const Word& w) {
    std::set<int> s = eps_closure(n, {n.start});
    for (const Symbol& sym : w) {
        s = nfa_step(n, s, sym);
        if (s.empty()) return false;
    }
    return std::any_of(s.begin(), s.end(),
                       [&](int q) { return n.finals.count(q) != 0; });
}

// ---- normalized DFA ----

std::optional<VarBits> bits_update(VarBits b, SymKind k) {
    if (k == SymKind::Open) {
        if (b.o) return std::nullopt;
        b.o = true;
        return b;
    }
    if (k == SymKind::Close) {
        if (b.o) {
            b.o = false;
            b.e = true;
            return b;
        }
        if (b.c || b.e) return std::nullopt;
        b.c = true;
        return b;
    }
    return std::nullopt;
}

Word bits_word(const GapBits& g) {
    Word w;
    for (const auto& [x, b] : g) {
        if (b.c) w.push_back(Symbol::close(x));
        if (b.e) {
            w.push_back(Symbol::open(x));
            w.push_back(Symbol::close(x));
        }
        if (b.o) w.push_back(Symbol::open(x));
    }
    return w;
}

std::optional<int> NormalizedDfa::step(int q, const Symbol& s) const {
    auto it = delta.find({q, s});
    if (it == delta.end()) return std::nullopt;
    return it->second;
}

bool NormalizedDfa::accepts(const Word& w) const {
    int q = start;
    for (const Symbol& s : w) {
        auto nq = step(q, s);
        if (!nq) return false;
        q = *nq;
    }
    return finals.count(q) != 0;
}

namespace {

struct RawDfa {
    std::map<std::pair<int, Symbol>, int> delta;
    int n = 0;
    int start = 0;
    std::set<int> finals;
};

// Accessible subset construction over a Thompson NFA with the end marker
// already attached, followed by a reachable/co-reachable trim. Adjacency is
// precomputed so the cost is per reached (subset, symbol), not a scan of the
// whole transition list.
RawDfa determinize(const Nfa& nfa) {
    std::vector<std::vector<int>> eps_adj(nfa.n);
    for (auto [a, b] : nfa.eps) eps_adj[a].push_back(b);
    std::vector<std::map<Symbol, std::vector<int>>> adj(nfa.n);
    for (const auto& [a, t, b] : nfa.trans) adj[a][t].push_back(b);

    auto closure = [&](std::set<int> s) {
        std::deque<int> work(s.begin(), s.end());
        while (!work.empty()) {
            int q = work.front();
            work.pop_front();
            for (int b : eps_adj[q])
                if (s.insert(b).second) work.push_back(b);
        }
        return s;
    };

    RawDfa d;
    std::map<std::set<int>, int> ids;
    std::vector<std::set<int>> sets;
    auto intern = [&](std::set<int> s) {
        auto it = ids.find(s);
        if (it != ids.end()) return it->second;
        int id = d.n++;
        ids.emplace(s, id);
        sets.push_back(std::move(s));
        return id;
    };
    d.start = intern(closure({nfa.start}));
    for (int q = 0; q < d.n; ++q) {
        std::map<Symbol, std::set<int>> step;
        for (int s : sets[q]) {
            for (const auto& [sym, tos] : adj[s])
                step[sym].insert(tos.begin(), tos.end());
        }
        for (auto& [sym, nxt] : step)
            d.delta[{q, sym}] = intern(closure(std::move(nxt)));
    }
    for (int q = 0; q < d.n; ++q)
        for (int f : nfa.finals)
            if (sets[q].count(f)) {
                d.finals.insert(q);
                break;
            }
    return d;
}

RawDfa trim(const RawDfa& d) {
    std::vector<std::vector<int>> out_adj(d.n), in_adj(d.n);
    for (auto& [key, to] : d.delta) {
        out_adj[key.first].push_back(to);
        in_adj[to].push_back(key.first);
    }
    // forward reachable
    std::set<int> fwd{d.start};
    std::deque<int> work{d.start};
    while (!work.empty()) {
        int q = work.front();
        work.pop_front();
        for (int to : out_adj[q])
            if (fwd.insert(to).second) work.push_back(to);
    }
    // backward reachable from finals
    std::set<int> bwd(d.finals.begin(), d.finals.end());
    std::deque<int> bw(d.finals.begin(), d.finals.end());
    while (!bw.empty()) {
        int q = bw.front();
        bw.pop_front();
        for (int from : in_adj[q])
            if (bwd.insert(from).second) bw.push_back(from);
    }
    std::map<int, int> remap;
    RawDfa r;
    auto keep = [&](int q) { return fwd.count(q) && bwd.count(q); };
    for (int q = 0; q < d.n; ++q)
        if (keep(q)) remap[q] = r.n++;
    if (!keep(d.start)) {
        // empty language; single dead start state
        r.n = 1;
        r.start = 0;
        return r;
    }
    r.start = remap[d.start];
    for (auto& [key, to] : d.delta)
        if (keep(key.first) && keep(to))
            r.delta[{remap[key.first], key.second}] = remap[to];
    for (int f : d.finals)
        if (keep(f)) r.finals.insert(remap[f]);
    return r;
}

} // namespace

NormalizedDfa normalized_dfa(const Nfa& src) {
    // 1. attach the end marker: fresh final state reachable by ⊣ from finals
    Nfa nfa = src;
    int fstar = nfa.n++;
    for (int f : nfa.finals) nfa.trans.emplace_back(f, Symbol::chr(kEndMarker), fstar);
    nfa.finals = {fstar};

    std::vector<Symbol> symbols;
    for (Char c : nfa.alphabet) symbols.push_back(Symbol::chr(c));
    symbols.push_back(Symbol::chr(kEndMarker));
    for (const std::string& x : nfa.vars) {
        symbols.push_back(Symbol::open(x));
        symbols.push_back(Symbol::close(x));
    }

    // 2. M1: deterministic, trimmed version of the source language
    RawDfa m1 = trim(determinize(nfa));

    // 3. path NFA over canonical gap labels: for every M1 state p1, find all
    //    (p2, bits) reachable via Γ-moves, and for each Σ/⊣ edge out of p2 spell
    //    the normalized label as a fresh path; then determinize again.
    Nfa m3;
    m3.alphabet = nfa.alphabet;
    m3.vars = nfa.vars;
    m3.n = m1.n;
    m3.start = m1.start;
    m3.finals = m1.finals;

    GapBits zero;
    for (const std::string& x : nfa.vars) zero[x] = VarBits{};

    for (int p1 = 0; p1 < m1.n; ++p1) {
        std::map<std::pair<int, GapBits>, bool> seen;
        std::deque<std::pair<int, GapBits>> work;
        seen[{p1, zero}] = true;
        work.push_back({p1, zero});
        std::set<std::pair<Word, int>> paths; // (normalized label u·b, target)
        while (!work.empty()) {
            auto [p, bits] = work.front();
            work.pop_front();
            // Σ / ⊣ continuation
            Word u = bits_word(bits);
            for (const Symbol& s : symbols) {
                if (s.is_bracket()) continue;
                auto it = m1.delta.find({p, s});
                if (it == m1.delta.end()) continue;
                Word label = u;
                label.push_back(s);
                paths.insert({std::move(label), it->second});
            }
            // Γ moves
            for (const std::string& x : nfa.vars) {
                for (SymKind k : {SymKind::Open, SymKind::Close}) {
                    Symbol g = (k == SymKind::Open) ? Symbol::open(x) : Symbol::close(x);
                    auto it = m1.delta.find({p, g});
                    if (it == m1.delta.end()) continue;
                    auto nb = bits_update(bits.at(x), k);
                    if (!nb) continue;
                    GapBits bits2 = bits;
                    bits2[x] = *nb;
                    auto key = std::make_pair(it->second, std::move(bits2));
                    if (!seen.count(key)) {
                        seen[key] = true;
                        work.push_back(key);
                    }
                }
            }
        }
        for (const auto& [label, target] : paths) {
            int cur = p1;
            for (std::size_t k = 0; k < label.size(); ++k) {
                int next = (k + 1 == label.size()) ? target : m3.n++;
                m3.trans.emplace_back(cur, label[k], next);
                cur = next;
            }
        }
    }

    RawDfa nd = trim(determinize(m3));

    NormalizedDfa out;
    out.n = nd.n;
    out.start = nd.start;
    out.finals = nd.finals;
    out.delta = nd.delta;
    out.alphabet = nfa.alphabet;
    out.vars = nfa.vars;
    return out;
}

} // namespace ettx
