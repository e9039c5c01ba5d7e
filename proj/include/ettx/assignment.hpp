#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ettx/core.hpp"
#include "ettx/symbol.hpp"

namespace ettx {

using Reg = std::string;

// One element of an assignment image: a register or an output letter.
struct Atom {
    bool is_reg = false;
    Reg reg;    // valid when is_reg
    Char ch = 0;

    static Atom r(Reg x) { return Atom{true, std::move(x), 0}; }
    static Atom c(Char c) { return Atom{false, {}, c}; }

    auto operator<=>(const Atom&) const = default;
};

using Image = std::vector<Atom>; // word over (registers ∪ Ω)

Image image_of(const Doc& d);

// Partial map register ⇀ (registers ∪ Ω)*. A Valuation has register-free images.
struct Assignment {
    std::map<Reg, Image> m;

    bool defined(const Reg& x) const { return m.count(x) != 0; }
    std::set<Reg> dom() const;
    std::set<Reg> reg() const; // registers used across all images

    auto operator<=>(const Assignment&) const = default;
};

using Valuation = Assignment;

// σ̂(w): substitute registers by their images; absent register ⇒ undefined.
std::optional<Image> subst(const Assignment& s, const Image& w);

// [s1 ∘ s2](X) = ŝ1(s2(X)); entries with undefined substitution are dropped.
Assignment compose_assign(const Assignment& s1, const Assignment& s2);

bool is_copyless(const Assignment& s);
bool is_valuation(const Assignment& s);

// ν̂ applied to a final template; defined iff all registers present.
std::optional<Doc> apply_valuation(const Valuation& v, const Image& tmpl);

std::set<Reg> image_regs(const Image& w);
Doc image_letters(const Image& w); // letters only, registers skipped

std::string render_image(const Image& w);
std::string render_assignment(const Assignment& s);

// Restriction π_R(s).
Assignment restrict_assign(const Assignment& s, const std::set<Reg>& keep);

Assignment identity_assign(const std::set<Reg>& regs);
bool is_relabel(const Assignment& s); // every image a single register

} // namespace ettx
