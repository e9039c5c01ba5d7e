#pragma once

#include <optional>
#include <string>

#include "ettx/spanner.hpp"
#include "ettx/sst.hpp"

namespace ettx {

// Text format with whitespace-separated tokens:
//   states: q0 q1
//   input: a b <x x>
//   output: a b
//   registers: X Y
//   init: q0 { X := ; Y := a b }
//   trans: q0 a q1 { X := a X b ; Y := Y }
//   final: q1 -> Y \s X
// init/trans/final lines repeat; Δ order is line order (bag ids).
std::string serialize_nsst(const Nsst& t);
Nsst parse_nsst(const std::string& text);

// Deterministic machines (single all-ε init, functional Δ) viewed as DSSTs.
std::optional<Dsst> nsst_as_dsst(const Nsst& t);

struct MsreFile {
    std::optional<std::set<Char>> alphabet; // nullopt = infer
    ExprPtr expr;
};

// Line 1: "alphabet: <symbol tokens>" or "alphabet: infer"; rest: expression.
MsreFile parse_msre(const std::string& text);
std::string serialize_msre(const ExprPtr& e, const std::set<Char>& alphabet);

// Parse a rendered multiref-word against a known variable set (longest match
// on "<name" / "name>"); used by fixtures and diagnostics.
Word parse_ref_word(const std::string& text, const std::set<std::string>& vars);

// One letter token: single char or escape (\s space, \t, \n, \\, \<, \#).
std::string escape_letter(Char c);
Char unescape_letter(const std::string& tok);

} // namespace ettx
