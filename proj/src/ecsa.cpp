#include "ettx/ecsa.hpp"

#include <sstream>

#include "ettx/errors.hpp"

namespace ettx {

RopePtr rope_text(Doc d) {
    auto n = std::make_shared<RopeNode>();
    n->text = std::move(d);
    return n;
}

RopePtr rope_cat(RopePtr a, RopePtr b) {
    if (!a) return b;
    if (!b) return a;
    auto n = std::make_shared<RopeNode>();
    n->l = std::move(a);
    n->r = std::move(b);
    return n;
}

void rope_flatten(const RopePtr& r, Doc& out) {
    std::vector<const RopeNode*> stack;
    if (r) stack.push_back(r.get());
    while (!stack.empty()) {
        const RopeNode* n = stack.back();
        stack.pop_back();
        out += n->text;
        if (n->r) stack.push_back(n->r.get());
        if (n->l) stack.push_back(n->l.get());
    }
}

NodeRef Ecsa::push(EcsaNode n) {
    nodes_.push_back(std::move(n));
    return (NodeRef)(nodes_.size() - 1);
}

NodeRef Ecsa::leaf(const Valuation& v) {
    if (!is_valuation(v)) throw PreconditionViolation("leaf label must be register-free");
    for (const auto& [x, img] : v.m) universe_.insert(x);
    return push({NodeKind::Leaf, v, 0, 0, 0});
}

NodeRef Ecsa::extend(NodeRef n, const Assignment& s) {
    if (!is_copyless(s)) throw PreconditionViolation("extension must be copyless");
    for (const Reg& x : s.dom()) universe_.insert(x);
    for (const Reg& x : s.reg()) universe_.insert(x);
    if (!is_relabel(s)) return push({NodeKind::Apply, s, n, 0, 0});
    const EcsaNode& nd = nodes_[n];
    if (nd.kind == NodeKind::Relabel)
        return push({NodeKind::Relabel, compose_assign(nd.label, s), nd.l, 0,
                     nd.odepth});
    return push({NodeKind::Relabel, s, n, 0, nd.odepth + 1});
}

Ecsa::Shape Ecsa::shape(NodeRef n) const {
    const EcsaNode& nd = nodes_[n];
    if (nd.kind == NodeKind::Union) return {true, nullptr, nd.l, nd.r};
    if (nd.kind == NodeKind::Relabel &&
        nodes_[nd.l].kind == NodeKind::Union) {
        const EcsaNode& u = nodes_[nd.l];
        return {true, &nd.label, u.l, u.r};
    }
    return {};
}

NodeRef Ecsa::cap_with(const Assignment* cap, NodeRef n) {
    return cap ? extend(n, *cap) : n;
}

NodeRef Ecsa::mk_union(NodeRef a, NodeRef b) {
    return push({NodeKind::Union, {}, a, b, nodes_[a].odepth + 1});
}

NodeRef Ecsa::unite(NodeRef a, NodeRef b) {
    Shape sa = shape(a), sb = shape(b);
    if (!sa.is_union && !sb.is_union) return mk_union(a, b);
    if (!sa.is_union) {
        if (!sb.cap) return mk_union(a, b);
        return mk_union(a, mk_union(cap_with(sb.cap, sb.l), cap_with(sb.cap, sb.r)));
    }
    if (!sb.is_union) {
        if (!sa.cap) return mk_union(b, a);
        return mk_union(b, mk_union(cap_with(sa.cap, sa.l), cap_with(sa.cap, sa.r)));
    }
    // unfold both so the result keeps a shallow left spine
    NodeRef a1 = cap_with(sa.cap, sa.l), b1 = cap_with(sa.cap, sa.r);
    NodeRef a2 = cap_with(sb.cap, sb.l), b2 = cap_with(sb.cap, sb.r);
    return mk_union(a1, mk_union(a2, mk_union(b1, b2)));
}

bool Ecsa::check_safe(NodeRef n) const {
    std::vector<signed char> memo(nodes_.size(), -1);
    bool ok = true;
    // two passes per node: children first, then the node's own constraints
    std::vector<std::pair<NodeRef, bool>> work{{n, false}};
    while (!work.empty() && ok) {
        auto [m, done] = work.back();
        work.pop_back();
        const EcsaNode& nd = nodes_[m];
        if (!done) {
            if (memo[m] != -1) continue;
            memo[m] = 1;
            work.push_back({m, true});
            if (nd.kind != NodeKind::Leaf) work.push_back({nd.l, false});
            if (nd.kind == NodeKind::Union) work.push_back({nd.r, false});
            continue;
        }
        switch (nd.kind) {
        case NodeKind::Leaf:
            ok = is_valuation(nd.label) && nd.odepth == 0;
            break;
        case NodeKind::Apply:
            ok = is_copyless(nd.label) && nd.odepth == 0;
            break;
        case NodeKind::Relabel:
            ok = is_relabel(nd.label) && nodes_[nd.l].kind != NodeKind::Relabel &&
                 nd.odepth == nodes_[nd.l].odepth + 1 && nd.odepth <= 4;
            break;
        case NodeKind::Union:
            ok = nd.odepth == nodes_[nd.l].odepth + 1 && nd.odepth <= 4;
            break;
        }
    }
    return ok;
}

Bag<Valuation> Ecsa::materialize(NodeRef n) const {
    std::map<NodeRef, Bag<Valuation>> memo;
    // children strictly precede parents in the store
    for (NodeRef m = 0; m <= n; ++m) {
        const EcsaNode& nd = nodes_[m];
        Bag<Valuation> b;
        switch (nd.kind) {
        case NodeKind::Leaf:
            b.add(nd.label);
            break;
        case NodeKind::Apply:
        case NodeKind::Relabel:
            for (const Valuation& v : memo[nd.l].items)
                b.add(compose_assign(v, nd.label));
            break;
        case NodeKind::Union:
            b = bag_union(memo[nd.l], memo[nd.r]);
            break;
        }
        memo.emplace(m, std::move(b));
    }
    return memo[n];
}

std::string Ecsa::dump() const {
    std::ostringstream out;
    for (NodeRef i = 0; i < nodes_.size(); ++i) {
        const EcsaNode& nd = nodes_[i];
        out << i << " ";
        switch (nd.kind) {
        case NodeKind::Leaf:
            out << "leaf " << render_assignment(nd.label);
            break;
        case NodeKind::Apply:
            out << "apply " << render_assignment(nd.label) << " " << nd.l;
            break;
        case NodeKind::Relabel:
            out << "relabel " << render_assignment(nd.label) << " " << nd.l;
            break;
        case NodeKind::Union:
            out << "union " << nd.l << " " << nd.r;
            break;
        }
        out << "\n";
    }
    return out.str();
}

Ecsa::Cursor::Cursor(const Ecsa* e, NodeRef n) : e_(e) {
    SymAssign id;
    for (const Reg& x : e->universe_) id.emplace(x, std::vector<Piece>{{nullptr, x}});
    stack_.push_back({n, std::move(id)});
}

Ecsa::Cursor::SymAssign Ecsa::Cursor::compose(const SymAssign& acc,
                                              const Assignment& s) {
    SymAssign out;
    for (const auto& [x, ps] : acc) {
        std::vector<Piece> np;
        Doc buf;
        RopePtr cur;
        bool ok = true;
        auto flush_buf = [&] {
            if (!buf.empty()) {
                cur = rope_cat(cur, rope_text(std::move(buf)));
                buf.clear();
            }
        };
        auto flush_cur = [&] {
            flush_buf();
            if (cur) {
                np.push_back({cur, {}});
                cur = nullptr;
            }
        };
        for (const Piece& p : ps) {
            ++steps_;
            if (p.chunk) {
                flush_buf();
                cur = rope_cat(cur, p.chunk);
                continue;
            }
            auto it = s.m.find(p.ref);
            if (it == s.m.end()) {
                ok = false;
                break;
            }
            for (const Atom& a : it->second) {
                if (a.is_reg) {
                    flush_cur();
                    np.push_back({nullptr, a.reg});
                } else {
                    buf.push_back(a.ch);
                }
            }
        }
        if (!ok) continue;
        flush_cur();
        out.emplace(x, std::move(np));
    }
    return out;
}

bool Ecsa::Cursor::next(Valuation& out) {
    while (!stack_.empty()) {
        Frame f = std::move(stack_.back());
        stack_.pop_back();
        ++steps_;
        const EcsaNode& nd = e_->node(f.n);
        switch (nd.kind) {
        case NodeKind::Union:
            stack_.push_back({nd.r, f.acc});
            stack_.push_back({nd.l, std::move(f.acc)});
            break;
        case NodeKind::Apply:
        case NodeKind::Relabel:
            stack_.push_back({nd.l, compose(f.acc, nd.label)});
            break;
        case NodeKind::Leaf: {
            out.m.clear();
            for (const auto& [x, ps] : f.acc) {
                Doc val;
                bool ok = true;
                for (const Piece& p : ps) {
                    ++steps_;
                    if (p.chunk) {
                        rope_flatten(p.chunk, val);
                        continue;
                    }
                    auto it = nd.label.m.find(p.ref);
                    if (it == nd.label.m.end()) {
                        ok = false;
                        break;
                    }
                    val += image_letters(it->second);
                }
                if (ok) out.m.emplace(x, image_of(val));
            }
            return true;
        }
        }
    }
    return false;
}

} // namespace ettx
