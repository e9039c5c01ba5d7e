#pragma once

#include <cstddef>
#include <set>

#include "ettx/spanner.hpp"
#include "ettx/sst.hpp"

namespace ettx {

struct CompileStats {
    std::size_t gamma_paths = 0; // bracket-block walks folded into Δ or F
    std::size_t base_states = 0;
};

// Fold an extractor/transformer pair into a single NSST over the plain
// alphabet. The transformer must read every letter of `alphabet` plus the
// open/close brackets of the extractor's variables.
Nsst et_to_nsst(const ExprPtr& e, const Dsst& t, const std::set<Char>& alphabet,
                CompileStats* stats = nullptr);

} // namespace ettx
