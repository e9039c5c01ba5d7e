#include "ettx/symbol.hpp"

#include "ettx/errors.hpp"

namespace ettx {

Word to_word(const Doc& d) {
    Word w;
    w.reserve(d.size());
    for (Char c : d) w.push_back(Symbol::chr(c));
    return w;
}

std::u32string utf8_decode(std::string_view s) {
    std::u32string out;
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char b0 = s[i];
        Char c;
        std::size_t n;
        if (b0 < 0x80) {
            c = b0;
            n = 1;
        } else if ((b0 & 0xE0) == 0xC0) {
            c = b0 & 0x1F;
            n = 2;
        } else if ((b0 & 0xF0) == 0xE0) {
            c = b0 & 0x0F;
            n = 3;
        } else if ((b0 & 0xF8) == 0xF0) {
            c = b0 & 0x07;
            n = 4;
        } else {
            throw ParseError("invalid UTF-8 byte");
        }
        if (i + n > s.size()) throw ParseError("truncated UTF-8 sequence");
        for (std::size_t k = 1; k < n; ++k) {
            unsigned char b = s[i + k];
            if ((b & 0xC0) != 0x80) throw ParseError("invalid UTF-8 continuation");
            c = (c << 6) | (b & 0x3F);
        }
        out.push_back(c);
        i += n;
    }
    return out;
}

std::string utf8_encode_char(Char c) {
    std::string out;
    if (c < 0x80) {
        out += static_cast<char>(c);
    } else if (c < 0x800) {
        out += static_cast<char>(0xC0 | (c >> 6));
        out += static_cast<char>(0x80 | (c & 0x3F));
    } else if (c < 0x10000) {
        out += static_cast<char>(0xE0 | (c >> 12));
        out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (c & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (c >> 18));
        out += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (c & 0x3F));
    }
    return out;
}

std::string utf8_encode(std::u32string_view s) {
    std::string out;
    for (Char c : s) out += utf8_encode_char(c);
    return out;
}

std::string render_symbol(const Symbol& s) {
    switch (s.kind) {
    case SymKind::Open:
        return "<" + s.var;
    case SymKind::Close:
        return s.var + ">";
    case SymKind::Chr:
        if (s.ch == kEndMarker) return "⊣";
        if (s.ch == U'<') return "\\<";
        if (s.ch == U'\\') return "\\\\";
        return utf8_encode_char(s.ch);
    }
    return {};
}

std::string render_word(const Word& w) {
    std::string out;
    for (const Symbol& s : w) out += render_symbol(s);
    return out;
}

std::string render_doc(const Doc& d) {
    std::string out;
    for (Char c : d) out += render_symbol(Symbol::chr(c));
    return out;
}

} // namespace ettx
