#include "ettx/core.hpp"

namespace ettx {

std::string render_span(const Span& s) {
    return "[" + std::to_string(s.start) + "," + std::to_string(s.end) + ")";
}

bool span_disjoint(const Span& a, const Span& b) {
    return a.end <= b.start || b.end <= a.start;
}

std::string render_tuple(const MultispanTuple& t) {
    std::string out = "{";
    bool first_var = true;
    for (const auto& [x, spans] : t.bindings) {
        if (!first_var) out += ", ";
        first_var = false;
        out += x + " -> {";
        bool first = true;
        for (const Span& s : spans) {
            if (!first) out += ",";
            first = false;
            out += render_span(s);
        }
        out += "}";
    }
    return out + "}";
}

MultirefWord MultirefWord::over(Word w) {
    MultirefWord r;
    for (const Symbol& s : w)
        if (s.is_bracket()) r.variables.insert(s.var);
    r.symbols = std::move(w);
    return r;
}

Doc doc_of(const MultirefWord& w) {
    Doc d;
    for (const Symbol& s : w.symbols)
        if (s.is_chr()) d.push_back(s.ch);
    return d;
}

MultispanTuple tuple_of(const MultirefWord& w) {
    MultispanTuple t;
    for (const std::string& x : w.variables) t.bindings[x];

    // pos = next document position (1-based); open_at[x] = pending open position.
    std::map<std::string, int> open_at;
    int pos = 1;
    for (const Symbol& s : w.symbols) {
        switch (s.kind) {
        case SymKind::Chr:
            ++pos;
            break;
        case SymKind::Open:
            if (open_at.count(s.var))
                throw MalformedRefWord("nested open(" + s.var + ")");
            open_at[s.var] = pos;
            break;
        case SymKind::Close: {
            auto it = open_at.find(s.var);
            if (it == open_at.end())
                throw MalformedRefWord("unmatched close(" + s.var + ")");
            t.bindings[s.var].insert(Span{it->second, pos});
            open_at.erase(it);
            break;
        }
        }
    }
    if (!open_at.empty())
        throw MalformedRefWord("unmatched open(" + open_at.begin()->first + ")");
    return t;
}

MultirefWord encode(const MultispanTuple& t, const Doc& d) {
    const int n = static_cast<int>(d.size());
    MultirefWord w;
    for (const auto& [x, spans] : t.bindings) {
        w.variables.insert(x);
        for (const Span& s : spans) {
            if (s.start < 1 || s.start > s.end || s.end > n + 1)
                throw SpanOutOfRange(x + ": " + render_span(s));
            for (const Span& s2 : spans)
                if (!(s == s2) && !span_disjoint(s, s2))
                    throw OverlappingSpans(x + ": " + render_span(s) + " vs " +
                                           render_span(s2));
        }
    }
    // Per position i and variable x (in ≼ = name order):
    // (close)^c (open close)^e (open)^o.
    for (int i = 1; i <= n + 1; ++i) {
        for (const auto& [x, spans] : t.bindings) {
            bool c = false, e = false, o = false;
            for (const Span& s : spans) {
                if (s.end == i && s.start != i) c = true;
                if (s.start == i && s.end == i) e = true;
                if (s.start == i && s.end != i) o = true;
            }
            if (c) w.symbols.push_back(Symbol::close(x));
            if (e) {
                w.symbols.push_back(Symbol::open(x));
                w.symbols.push_back(Symbol::close(x));
            }
            if (o) w.symbols.push_back(Symbol::open(x));
        }
        if (i <= n) w.symbols.push_back(Symbol::chr(d[i - 1]));
    }
    return w;
}

MultirefWord normalize(const MultirefWord& w) {
    return encode(tuple_of(w), doc_of(w));
}

} // namespace ettx
