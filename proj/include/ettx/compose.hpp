#pragma once

#include <cstddef>
#include <optional>
#include <utility>

#include "ettx/sst.hpp"

namespace ettx {

// Behavior of the second machine across one content piece: enter at q, leave
// at r, registers updated by s. Images of s may mix second-machine registers,
// output letters, and carrier registers of the outer machine.
struct Subrun {
    bool bot = false;
    int q = 0, r = 0;
    Assignment s;
    auto operator<=>(const Subrun&) const = default;
};

Subrun subrun_id(int q, const std::set<Reg>& regs2);
Subrun subrun_bot();
// Sequential product; ⊥ absorbs, mismatched mid states give ⊥.
Subrun subrun_mul(const Subrun& a, const Subrun& b, const std::set<Reg>& regs2);

// Split s into a skeleton over regs2 plus fresh carrier registers, and the
// carrier contents. Carriers are named z<tag>_<slot> with slots numbered in
// register order, left to right, so equal behaviors get equal skeletons.
std::pair<Assignment, Assignment> summarize_assign(const Assignment& s,
                                                   const std::set<Reg>& regs2,
                                                   const std::string& tag);

struct ComposeStats {
    std::size_t states = 0;
    std::size_t transitions = 0;
};

// Machine computing w ↦ ⟦t2⟧(⟦t1⟧(w)) under bag semantics. t2 must read
// plain letters. Both inputs are made garbage-free first.
Nsst compose_nsst(const Nsst& t1, const Nsst& t2, std::size_t max_states = 50000,
                  ComposeStats* stats = nullptr);

} // namespace ettx
