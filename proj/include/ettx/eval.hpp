#pragma once

#include <cstdint>

#include "ettx/ecsa.hpp"
#include "ettx/sst.hpp"

namespace ettx {

struct EvalStats {
    std::uint64_t transitions_fired = 0; // Δ entries applied while reading w
    std::uint64_t ecsa_nodes = 0;        // DAG nodes built while reading w
    std::uint64_t outputs = 0;
    std::uint64_t max_delay_steps = 0;   // cursor steps between outputs
    double max_delay_ratio = 0.0;        // steps / surrounding output length
};

// Reads w once, keeping one DAG node per live state, then streams outputs.
// Requires a garbage-free machine; limit 0 enumerates everything.
Bag<Doc> evaluate(const Nsst& t, const Word& w, EvalStats* stats = nullptr,
                  std::uint64_t limit = 0);

// The state table after reading w, for inspection; table[q] indexes into ecsa.
std::map<int, NodeRef> eval_table(const Nsst& t, const Word& w, Ecsa& ecsa);

} // namespace ettx
