#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ettx/core.hpp"
#include "ettx/symbol.hpp"

namespace ettx {

struct MultispannerExpr;
using ExprPtr = std::shared_ptr<const MultispannerExpr>;

struct MultispannerExpr {
    enum Kind { Epsilon, Literal, Dot, Concat, Alt, Star, Capture };
    Kind kind = Epsilon;
    Char ch = 0;       // Literal
    std::string var;   // Capture
    ExprPtr a, b;

    static ExprPtr eps();
    static ExprPtr lit(Char c);
    static ExprPtr dot();
    static ExprPtr concat(ExprPtr l, ExprPtr r);
    static ExprPtr alt(ExprPtr l, ExprPtr r);
    static ExprPtr star(ExprPtr e);
    static ExprPtr capture(std::string x, ExprPtr e);
};

ExprPtr parse_expr(const std::string& text);
std::string render_expr(const ExprPtr& e);

std::set<Char> expr_chars(const ExprPtr& e);
std::set<std::string> expr_vars(const ExprPtr& e);
bool expr_has_dot(const ExprPtr& e);

struct Nfa {
    int n = 0;
    int start = 0;
    std::set<int> finals;
    std::vector<std::tuple<int, Symbol, int>> trans;
    std::vector<std::pair<int, int>> eps;
    std::set<Char> alphabet;
    std::set<std::string> vars;
};

// Alphabet needed to expand `.`; must not contain the end marker.
Nfa compile_to_nfa(const ExprPtr& e, const std::set<Char>& alphabet);

std::set<int> eps_closure(const Nfa& n, std::set<int> s);
std::set<int> nfa_step(const Nfa& n, const std::set<int>& s, const Symbol& sym);
bool nfa_accepts(const Nfa& n, const Word& w);

// Per-gap bracket state of one variable: leading close, empty pair, trailing open.
struct VarBits {
    bool c = false, e = false, o = false;
    auto operator<=>(const VarBits&) const = default;
};

using GapBits = std::map<std::string, VarBits>;

// Reading one more bracket in a gap; nullopt if no multiref-word allows it.
std::optional<VarBits> bits_update(VarBits b, SymKind k);

// The normalized Γ-sequence for a gap, variables in name order.
Word bits_word(const GapBits& g);

struct NormalizedDfa {
    int n = 0;
    int start = 0;
    std::set<int> finals;
    std::map<std::pair<int, Symbol>, int> delta;
    std::set<Char> alphabet; // without the end marker
    std::set<std::string> vars;

    std::optional<int> step(int q, const Symbol& s) const;
    bool accepts(const Word& w) const; // w should end with the marker
};

// Deterministic automaton for { nrefw(w)·⊣ | w ∈ L(n) }.
NormalizedDfa normalized_dfa(const Nfa& n);

} // namespace ettx
