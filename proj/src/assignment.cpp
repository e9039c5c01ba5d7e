#include "ettx/assignment.hpp"

namespace ettx {

Image image_of(const Doc& d) {
    Image w;
    w.reserve(d.size());
    for (Char c : d) w.push_back(Atom::c(c));
    return w;
}

std::set<Reg> Assignment::dom() const {
    std::set<Reg> r;
    for (const auto& [x, _] : m) r.insert(x);
    return r;
}

std::set<Reg> Assignment::reg() const {
    std::set<Reg> r;
    for (const auto& [_, img] : m)
        for (const Atom& a : img)
            if (a.is_reg) r.insert(a.reg);
    return r;
}

std::optional<Image> subst(const Assignment& s, const Image& w) {
    Image out;
    for (const Atom& a : w) {
        if (a.is_reg) {
            auto it = s.m.find(a.reg);
            if (it == s.m.end()) return std::nullopt;
            out.insert(out.end(), it->second.begin(), it->second.end());
        } else {
            out.push_back(a);
        }
    }
    return out;
}

Assignment compose_assign(const Assignment& s1, const Assignment& s2) {
    Assignment r;
    for (const auto& [x, img] : s2.m) {
        auto sub = subst(s1, img);
        if (sub) r.m.emplace(x, std::move(*sub));
    }
    return r;
}

bool is_copyless(const Assignment& s) {
    std::set<Reg> seen;
    for (const auto& [_, img] : s.m)
        for (const Atom& a : img)
            if (a.is_reg && !seen.insert(a.reg).second) return false;
    return true;
}

bool is_valuation(const Assignment& s) {
    for (const auto& [_, img] : s.m)
        for (const Atom& a : img)
            if (a.is_reg) return false;
    return true;
}

std::optional<Doc> apply_valuation(const Valuation& v, const Image& tmpl) {
    auto sub = subst(v, tmpl);
    if (!sub) return std::nullopt;
    return image_letters(*sub);
}

std::set<Reg> image_regs(const Image& w) {
    std::set<Reg> r;
    for (const Atom& a : w)
        if (a.is_reg) r.insert(a.reg);
    return r;
}

Doc image_letters(const Image& w) {
    Doc d;
    for (const Atom& a : w)
        if (!a.is_reg) d.push_back(a.ch);
    return d;
}

std::string render_image(const Image& w) {
    std::string out;
    bool first = true;
    for (const Atom& a : w) {
        if (!first) out += " ";
        first = false;
        if (a.is_reg)
            out += a.reg;
        else
            out += render_symbol(Symbol::chr(a.ch));
    }
    return out;
}

std::string render_assignment(const Assignment& s) {
    std::string out = "{";
    bool first = true;
    for (const auto& [x, img] : s.m) {
        if (!first) out += "; ";
        first = false;
        out += x + " := " + render_image(img);
    }
    return out + "}";
}

Assignment restrict_assign(const Assignment& s, const std::set<Reg>& keep) {
    Assignment r;
    for (const auto& [x, img] : s.m)
        if (keep.count(x)) r.m.emplace(x, img);
    return r;
}

Assignment identity_assign(const std::set<Reg>& regs) {
    Assignment r;
    for (const Reg& x : regs) r.m.emplace(x, Image{Atom::r(x)});
    return r;
}

bool is_relabel(const Assignment& s) {
    for (const auto& [_, img] : s.m)
        if (img.size() != 1 || !img[0].is_reg) return false;
    return true;
}

} // namespace ettx
