#pragma once

#include <set>

#include "ettx/core.hpp"
#include "ettx/spanner.hpp"
#include "ettx/sst.hpp"

namespace ettx {
namespace oracle {

// E(D) by direct per-gap search: explore bracket blocks against the NFA,
// never through the normalized-DFA pipeline.
std::set<MultispanTuple> enumerate_tuples(const ExprPtr& e, const Doc& d,
                                          const std::set<Char>& alphabet,
                                          const Budget& budget = {});

Bag<Doc> nsst_bag(const Nsst& t, const Word& w, const Budget& budget = {});

Bag<Doc> et_bag(const ExprPtr& e, const Dsst& t, const Doc& d,
                const std::set<Char>& alphabet, const Budget& budget = {});

Bag<Doc> compose_bag(const Nsst& t1, const Nsst& t2, const Word& w,
                     const Budget& budget = {});

} // namespace oracle
} // namespace ettx
