#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ettx/errors.hpp"
#include "ettx/symbol.hpp"

namespace ettx {

// Half-open span ⟨start,end⟩, 1-based, covering positions start..end-1.
struct Span {
    int start = 1;
    int end = 1;
    auto operator<=>(const Span&) const = default;
};

std::string render_span(const Span& s); // "[i,j)"

bool span_disjoint(const Span& a, const Span& b);

// Variables map to sets of pairwise-disjoint spans.
struct MultispanTuple {
    std::map<std::string, std::set<Span>> bindings;
    auto operator<=>(const MultispanTuple&) const = default;
};

std::string render_tuple(const MultispanTuple& t);

// Word over Σ ∪ Γ_X with per-variable balanced, unnested brackets.
struct MultirefWord {
    Word symbols;
    std::set<std::string> variables; // X; may include unused variables

    static MultirefWord over(Word w);   // variables inferred from brackets
};

Doc doc_of(const MultirefWord& w);
MultispanTuple tuple_of(const MultirefWord& w);
MultirefWord encode(const MultispanTuple& t, const Doc& d);
MultirefWord normalize(const MultirefWord& w);

// Bag with list-position ids; equality is multiplicity equality.
template <class V>
struct Bag {
    std::vector<V> items;

    void add(V v) { items.push_back(std::move(v)); }
    std::size_t size() const { return items.size(); }
    bool empty() const { return items.empty(); }

    std::size_t mult(const V& v) const {
        return std::count(items.begin(), items.end(), v);
    }
    std::vector<V> sorted() const {
        std::vector<V> s = items;
        std::sort(s.begin(), s.end());
        return s;
    }
};

template <class V>
Bag<V> bag_union(const Bag<V>& a, const Bag<V>& b) {
    Bag<V> r = a;
    r.items.insert(r.items.end(), b.items.begin(), b.items.end());
    return r;
}

template <class V>
bool bag_eq(const Bag<V>& a, const Bag<V>& b) {
    return a.sorted() == b.sorted();
}

} // namespace ettx
