#include "ettx/sst_io.hpp"

#include <sstream>

#include "ettx/errors.hpp"

namespace ettx {

namespace {

bool is_ident(const std::string& s) {
    if (s.empty()) return false;
    auto head = [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
    };
    auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9'); };
    if (!head(s[0])) return false;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (!tail(s[i])) return false;
    return true;
}

std::vector<std::string> tokens_of(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> ts;
    std::string t;
    while (in >> t) ts.push_back(t);
    return ts;
}

} // namespace

std::string escape_letter(Char c) {
    switch (c) {
    case U' ': return "\\s";
    case U'\t': return "\\t";
    case U'\n': return "\\n";
    case U'\\': return "\\\\";
    case U'<': return "\\<";
    case U';': return "\\;";
    case U'{': return "\\{";
    case U'}': return "\\}";
    default: return utf8_encode_char(c);
    }
}

Char unescape_letter(const std::string& tok) {
    std::u32string u = utf8_decode(tok);
    if (u.size() == 2 && u[0] == U'\\') {
        switch (u[1]) {
        case U's': return U' ';
        case U't': return U'\t';
        case U'n': return U'\n';
        default: return u[1];
        }
    }
    if (u.size() != 1)
        throw ParseError("expected single letter token, got '" + tok + "'");
    return u[0];
}

namespace {

std::string symbol_token(const Symbol& s) {
    switch (s.kind) {
    case SymKind::Open: return "<" + s.var;
    case SymKind::Close: return s.var + ">";
    case SymKind::Chr: return escape_letter(s.ch);
    }
    return {};
}

Symbol parse_symbol_token(const std::string& tok) {
    if (tok.size() >= 2 && tok[0] == '<' && is_ident(tok.substr(1)))
        return Symbol::open(tok.substr(1));
    if (tok.size() >= 2 && tok.back() == '>' && is_ident(tok.substr(0, tok.size() - 1)))
        return Symbol::close(tok.substr(0, tok.size() - 1));
    return Symbol::chr(unescape_letter(tok));
}

std::string image_tokens(const Image& img) {
    std::string out;
    for (const Atom& a : img) {
        if (!out.empty()) out += " ";
        out += a.is_reg ? a.reg : escape_letter(a.ch);
    }
    return out;
}

} // namespace

std::string serialize_nsst(const Nsst& t) {
    std::ostringstream out;
    out << "states:";
    for (const auto& s : t.states) out << " " << s;
    out << "\ninput:";
    for (const Symbol& s : t.input) out << " " << symbol_token(s);
    out << "\noutput:";
    for (Char c : t.output) out << " " << escape_letter(c);
    out << "\nregisters:";
    for (const Reg& r : t.registers) out << " " << r;
    out << "\n";
    for (const auto& [q, v] : t.init) {
        out << "init: " << t.states[q] << " {";
        bool first = true;
        for (const auto& [x, img] : v.m) {
            out << (first ? " " : " ; ") << x << " := ";
            first = false;
            out << image_tokens(img);
        }
        out << " }\n";
    }
    for (const Transition& tr : t.delta) {
        out << "trans: " << t.states[tr.from] << " " << symbol_token(tr.sym) << " "
            << t.states[tr.to] << " {";
        bool first = true;
        for (const auto& [x, img] : tr.assign.m) {
            out << (first ? " " : " ; ") << x << " := ";
            first = false;
            out << image_tokens(img);
        }
        out << " }\n";
    }
    for (const auto& [q, f] : t.final_)
        out << "final: " << t.states[q] << " -> " << image_tokens(f) << "\n";
    return out.str();
}

namespace {

struct SstParser {
    Nsst t;
    std::map<std::string, int> state_ids;

    int state(const std::string& name) {
        auto it = state_ids.find(name);
        if (it == state_ids.end()) throw ParseError("unknown state " + name);
        return it->second;
    }

    Image parse_image(const std::vector<std::string>& ts, std::size_t& i,
                      bool allow_regs) {
        Image img;
        while (i < ts.size() && ts[i] != ";" && ts[i] != "}") {
            if (t.registers.count(ts[i])) {
                if (!allow_regs)
                    throw ParseError("register in valuation image: " + ts[i]);
                img.push_back(Atom::r(ts[i]));
            } else {
                img.push_back(Atom::c(unescape_letter(ts[i])));
            }
            ++i;
        }
        return img;
    }

    Assignment parse_assign_block(const std::vector<std::string>& ts, std::size_t& i,
                                  bool allow_regs) {
        if (i >= ts.size() || ts[i] != "{") throw ParseError("expected '{'");
        ++i;
        Assignment a;
        while (i < ts.size() && ts[i] != "}") {
            std::string reg = ts[i++];
            if (!t.registers.count(reg)) throw ParseError("unknown register " + reg);
            if (i >= ts.size() || ts[i] != ":=") throw ParseError("expected ':='");
            ++i;
            if (a.m.count(reg)) throw ParseError("register assigned twice: " + reg);
            a.m.emplace(reg, parse_image(ts, i, allow_regs));
            if (i < ts.size() && ts[i] == ";") ++i;
        }
        if (i >= ts.size()) throw ParseError("unterminated '{'");
        ++i;
        return a;
    }
};

} // namespace

Nsst parse_nsst(const std::string& text) {
    SstParser p;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto ts = tokens_of(line);
        if (ts.empty()) continue;
        const std::string& head = ts[0];
        if (head == "states:") {
            for (std::size_t i = 1; i < ts.size(); ++i) {
                if (!is_ident(ts[i])) throw ParseError("bad state name " + ts[i]);
                p.state_ids[ts[i]] = p.t.add_state(ts[i]);
            }
        } else if (head == "input:") {
            for (std::size_t i = 1; i < ts.size(); ++i)
                p.t.input.insert(parse_symbol_token(ts[i]));
        } else if (head == "output:") {
            for (std::size_t i = 1; i < ts.size(); ++i)
                p.t.output.insert(unescape_letter(ts[i]));
        } else if (head == "registers:") {
            for (std::size_t i = 1; i < ts.size(); ++i) {
                if (!is_ident(ts[i])) throw ParseError("bad register name " + ts[i]);
                p.t.registers.insert(ts[i]);
            }
        } else if (head == "init:") {
            if (ts.size() < 2) throw ParseError("init: missing state");
            int q = p.state(ts[1]);
            std::size_t i = 2;
            Valuation v = p.parse_assign_block(ts, i, false);
            if (p.t.init.count(q)) throw ParseError("duplicate init for " + ts[1]);
            p.t.init.emplace(q, std::move(v));
        } else if (head == "trans:") {
            if (ts.size() < 4) throw ParseError("trans: bad line");
            Transition tr;
            tr.from = p.state(ts[1]);
            tr.sym = parse_symbol_token(ts[2]);
            tr.to = p.state(ts[3]);
            std::size_t i = 4;
            tr.assign = p.parse_assign_block(ts, i, true);
            p.t.delta.push_back(std::move(tr));
        } else if (head == "final:") {
            if (ts.size() < 3 || ts[2] != "->") throw ParseError("final: bad line");
            int q = p.state(ts[1]);
            std::size_t i = 3;
            Image f;
            while (i < ts.size()) {
                if (p.t.registers.count(ts[i]))
                    f.push_back(Atom::r(ts[i]));
                else
                    f.push_back(Atom::c(unescape_letter(ts[i])));
                ++i;
            }
            if (p.t.final_.count(q)) throw ParseError("duplicate final for " + ts[1]);
            p.t.final_.emplace(q, std::move(f));
        } else {
            throw ParseError("unknown section: " + head);
        }
    }
    p.t.validate();
    return std::move(p.t);
}

std::optional<Dsst> nsst_as_dsst(const Nsst& t) {
    if (t.init.size() != 1) return std::nullopt;
    auto& [q0, v] = *t.init.begin();
    for (const Reg& x : t.registers) {
        auto it = v.m.find(x);
        if (it == v.m.end() || !it->second.empty()) return std::nullopt;
    }
    Dsst d;
    d.states = t.states;
    d.input = t.input;
    d.output = t.output;
    d.registers = t.registers;
    d.q0 = q0;
    d.final_ = t.final_;
    for (const Transition& tr : t.delta) {
        auto key = std::make_pair(tr.from, tr.sym);
        if (d.delta.count(key)) return std::nullopt;
        d.delta.emplace(key, std::make_pair(tr.assign, tr.to));
    }
    return d;
}

MsreFile parse_msre(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty .msre file");
    auto ts = tokens_of(line);
    if (ts.empty() || ts[0] != "alphabet:")
        throw ParseError(".msre line 1 must start with 'alphabet:'");
    MsreFile f;
    if (!(ts.size() == 2 && ts[1] == "infer")) {
        std::set<Char> sigma;
        for (std::size_t i = 1; i < ts.size(); ++i) sigma.insert(unescape_letter(ts[i]));
        f.alphabet = std::move(sigma);
    }
    std::string rest, l2;
    while (std::getline(in, l2)) rest += l2 + "\n";
    f.expr = parse_expr(rest);
    return f;
}

std::string serialize_msre(const ExprPtr& e, const std::set<Char>& alphabet) {
    std::string out = "alphabet:";
    for (Char c : alphabet) out += " " + escape_letter(c);
    out += "\n" + render_expr(e) + "\n";
    return out;
}

Word parse_ref_word(const std::string& text, const std::set<std::string>& vars) {
    std::u32string s = utf8_decode(text);
    Word w;
    std::size_t i = 0;
    auto match_var = [&](std::size_t from) -> std::string {
        // longest declared variable name starting at `from`
        std::string best;
        for (const std::string& v : vars) {
            std::u32string u = utf8_decode(v);
            if (s.compare(from, u.size(), u) == 0 && v.size() > best.size()) best = v;
        }
        return best;
    };
    while (i < s.size()) {
        Char c = s[i];
        if (c == U'\\' && i + 1 < s.size()) {
            w.push_back(Symbol::chr(s[i + 1]));
            i += 2;
            continue;
        }
        if (c == U'<') {
            std::string v = match_var(i + 1);
            if (!v.empty()) {
                w.push_back(Symbol::open(v));
                i += 1 + utf8_decode(v).size();
                continue;
            }
        }
        std::string v = match_var(i);
        if (!v.empty() && i + utf8_decode(v).size() < s.size() &&
            s[i + utf8_decode(v).size()] == U'>') {
            w.push_back(Symbol::close(v));
            i += utf8_decode(v).size() + 1;
            continue;
        }
        w.push_back(Symbol::chr(c));
        ++i;
    }
    return w;
}

} // namespace ettx
