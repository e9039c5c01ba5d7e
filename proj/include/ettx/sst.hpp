#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ettx/assignment.hpp"
#include "ettx/core.hpp"
#include "ettx/spanner.hpp"
#include "ettx/symbol.hpp"

namespace ettx {

struct Transition {
    int from = 0;
    Symbol sym;
    Assignment assign;
    int to = 0;
    auto operator<=>(const Transition&) const = default;
};

// Nondeterministic streaming string transducer. Δ is an ordered list whose
// indices serve as bag ids; duplicates are meaningful.
struct Nsst {
    std::vector<std::string> states;
    std::set<Symbol> input;     // Σ, possibly with brackets
    std::set<Char> output;      // Ω
    std::set<Reg> registers;
    std::vector<Transition> delta;
    std::map<int, Valuation> init;   // I
    std::map<int, Image> final_;     // F: template over R ∪ Ω

    int add_state(std::string name);
    void validate() const; // copylessness, state/register references
};

struct Dsst {
    std::vector<std::string> states;
    std::set<Symbol> input;
    std::set<Char> output;
    std::set<Reg> registers;
    std::map<std::pair<int, Symbol>, std::pair<Assignment, int>> delta;
    int q0 = 0;
    std::map<int, Image> final_;

    int add_state(std::string name);
};

Nsst to_nsst(const Dsst& t); // I(q0) = all-ε valuation

std::optional<Doc> dsst_run(const Dsst& t, const Word& w);

struct Run {
    int start = 0;
    std::vector<std::size_t> trans_ids;
    Doc out;
    auto operator<=>(const Run&) const = default;
};

struct Budget {
    std::uint64_t max_configs = 1000000;
    std::uint64_t max_outputs = 1000000;
};

Bag<Run> nsst_accepting_runs(const Nsst& t, const Word& w,
                             const Budget& budget = {});

// Trim to states both reachable (from dom I) and co-reachable (to dom F).
Nsst trim_nsst(const Nsst& t);

Nsst garbage_free_transform(const Nsst& t);
bool is_garbage_free(const Nsst& t);

int branching_factor(const Nsst& t);

struct EtPair {
    ExprPtr extractor;
    Dsst transformer;
};

EtPair nsst_to_et(const Nsst& t);

} // namespace ettx
