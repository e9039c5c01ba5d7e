#pragma once

#include <compare>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ettx {

using Char = char32_t;
using Doc = std::u32string;

// Reserved end-marker, never allowed in user alphabets. Rendered ⊣.
constexpr Char kEndMarker = U'\0';

enum class SymKind : uint8_t { Chr, Open, Close };

// A symbol over Σ ∪ Γ_X: a plain character, or a variable bracket.
struct Symbol {
    SymKind kind = SymKind::Chr;
    Char ch = 0;           // valid when kind == Chr
    std::string var;       // valid when kind == Open/Close

    static Symbol chr(Char c) { return Symbol{SymKind::Chr, c, {}}; }
    static Symbol open(std::string v) { return Symbol{SymKind::Open, 0, std::move(v)}; }
    static Symbol close(std::string v) { return Symbol{SymKind::Close, 0, std::move(v)}; }

    bool is_chr() const { return kind == SymKind::Chr; }
    bool is_bracket() const { return kind != SymKind::Chr; }

    auto operator<=>(const Symbol&) const = default;
};

using Word = std::vector<Symbol>;

Word to_word(const Doc& d);

std::u32string utf8_decode(std::string_view s);
std::string utf8_encode(std::u32string_view s);
std::string utf8_encode_char(Char c);

// Diagnostic rendering: "<x" / "x>" for brackets, "⊣" for the end marker,
// backslash escapes for '<' and '\'.
std::string render_symbol(const Symbol& s);
std::string render_word(const Word& w);
std::string render_doc(const Doc& d);

} // namespace ettx
