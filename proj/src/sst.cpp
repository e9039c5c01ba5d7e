#include "ettx/sst.hpp"

#include <algorithm>
#include <deque>

#include "ettx/errors.hpp"

namespace ettx {

int Nsst::add_state(std::string name) {
    states.push_back(std::move(name));
    return static_cast<int>(states.size()) - 1;
}

int Dsst::add_state(std::string name) {
    states.push_back(std::move(name));
    return static_cast<int>(states.size()) - 1;
}

void Nsst::validate() const {
    auto check_image = [&](const Image& img) {
        for (const Atom& a : img) {
            if (a.is_reg && !registers.count(a.reg))
                throw Error("unknown register " + a.reg);
            if (!a.is_reg && !output.count(a.ch))
                throw Error("letter outside output alphabet");
        }
    };
    for (const Transition& t : delta) {
        if (t.from < 0 || t.from >= (int)states.size() || t.to < 0 ||
            t.to >= (int)states.size())
            throw Error("transition state out of range");
        if (!input.count(t.sym)) throw AlphabetError("transition symbol outside input alphabet");
        if (!is_copyless(t.assign)) throw Error("assignment not copyless");
        for (const auto& [x, img] : t.assign.m) {
            if (!registers.count(x)) throw Error("unknown register " + x);
            check_image(img);
        }
    }
    for (const auto& [q, v] : init) {
        if (q < 0 || q >= (int)states.size()) throw Error("init state out of range");
        if (!is_valuation(v)) throw Error("initial valuation contains registers");
        for (const auto& [x, img] : v.m) {
            if (!registers.count(x)) throw Error("unknown register " + x);
            check_image(img);
        }
    }
    for (const auto& [q, f] : final_) {
        if (q < 0 || q >= (int)states.size()) throw Error("final state out of range");
        std::set<Reg> seen;
        for (const Atom& a : f)
            if (a.is_reg && !seen.insert(a.reg).second)
                throw Error("register used twice in final template");
        check_image(f);
    }
}

Nsst to_nsst(const Dsst& t) {
    Nsst n;
    n.states = t.states;
    n.input = t.input;
    n.output = t.output;
    n.registers = t.registers;
    for (const auto& [key, val] : t.delta)
        n.delta.push_back(Transition{key.first, key.second, val.first, val.second});
    Valuation v;
    for (const Reg& x : t.registers) v.m.emplace(x, Image{});
    n.init.emplace(t.q0, std::move(v));
    n.final_ = t.final_;
    return n;
}

std::optional<Doc> dsst_run(const Dsst& t, const Word& w) {
    for (const Symbol& s : w)
        if (!t.input.count(s)) throw AlphabetError("symbol outside input alphabet");
    int q = t.q0;
    Valuation v;
    for (const Reg& x : t.registers) v.m.emplace(x, Image{});
    for (const Symbol& s : w) {
        auto it = t.delta.find({q, s});
        if (it == t.delta.end()) return std::nullopt;
        v = compose_assign(v, it->second.first);
        q = it->second.second;
    }
    auto f = t.final_.find(q);
    if (f == t.final_.end()) return std::nullopt;
    return apply_valuation(v, f->second);
}

Bag<Run> nsst_accepting_runs(const Nsst& t, const Word& w, const Budget& budget) {
    for (const Symbol& s : w)
        if (!t.input.count(s)) throw AlphabetError("symbol outside input alphabet");
    Bag<Run> out;
    std::uint64_t configs = 0;

    struct Frame {
        int q;
        Valuation v;
        std::size_t pos;
        std::vector<std::size_t> ids;
    };
    std::vector<Frame> stack;
    for (const auto& [q, v] : t.init) stack.push_back({q, v, 0, {}});
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        if (++configs > budget.max_configs) throw BudgetExceeded("run enumeration");
        if (f.pos == w.size()) {
            auto fin = t.final_.find(f.q);
            if (fin != t.final_.end()) {
                auto o = apply_valuation(f.v, fin->second);
                if (o) {
                    if (out.size() >= budget.max_outputs)
                        throw BudgetExceeded("run outputs");
                    int start = f.ids.empty() ? f.q : t.delta[f.ids[0]].from;
                    out.add(Run{start, f.ids, *o});
                }
            }
            continue;
        }
        for (std::size_t i = 0; i < t.delta.size(); ++i) {
            const Transition& tr = t.delta[i];
            if (tr.from != f.q || tr.sym != w[f.pos]) continue;
            Frame g;
            g.q = tr.to;
            g.v = compose_assign(f.v, tr.assign);
            g.pos = f.pos + 1;
            g.ids = f.ids;
            g.ids.push_back(i);
            stack.push_back(std::move(g));
        }
    }
    return out;
}

Nsst trim_nsst(const Nsst& t) {
    std::set<int> fwd;
    std::deque<int> work;
    for (const auto& [q, _] : t.init) {
        fwd.insert(q);
        work.push_back(q);
    }
    while (!work.empty()) {
        int q = work.front();
        work.pop_front();
        for (const Transition& tr : t.delta)
            if (tr.from == q && fwd.insert(tr.to).second) work.push_back(tr.to);
    }
    std::set<int> bwd;
    for (const auto& [q, _] : t.final_) {
        bwd.insert(q);
        work.push_back(q);
    }
    while (!work.empty()) {
        int q = work.front();
        work.pop_front();
        for (const Transition& tr : t.delta)
            if (tr.to == q && bwd.insert(tr.from).second) work.push_back(tr.from);
    }
    Nsst r;
    r.input = t.input;
    r.output = t.output;
    r.registers = t.registers;
    std::map<int, int> remap;
    for (int q = 0; q < (int)t.states.size(); ++q)
        if (fwd.count(q) && bwd.count(q)) remap[q] = r.add_state(t.states[q]);
    for (const Transition& tr : t.delta)
        if (remap.count(tr.from) && remap.count(tr.to))
            r.delta.push_back(Transition{remap[tr.from], tr.sym, tr.assign, remap[tr.to]});
    for (const auto& [q, v] : t.init)
        if (remap.count(q)) r.init.emplace(remap[q], v);
    for (const auto& [q, f] : t.final_)
        if (remap.count(q)) r.final_.emplace(remap[q], f);
    return r;
}

namespace {

// identifier-safe so the result survives serialization
std::string regset_name(const std::set<Reg>& rs) {
    std::string s;
    for (const Reg& x : rs) s += "_" + x;
    return s;
}

bool subset(const std::set<Reg>& a, const std::set<Reg>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

} // namespace

Nsst garbage_free_transform(const Nsst& t0) {
    Nsst t = trim_nsst(t0);

    // Backward closure over (state, live-register-set) pairs.
    std::map<std::pair<int, std::set<Reg>>, int> ids;
    std::vector<std::pair<int, std::set<Reg>>> nodes;
    std::deque<int> work;
    auto intern = [&](int q, std::set<Reg> rs) {
        auto key = std::make_pair(q, std::move(rs));
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        int id = (int)nodes.size();
        ids.emplace(key, id);
        nodes.push_back(key);
        work.push_back(id);
        return id;
    };

    for (const auto& [q, f] : t.final_) intern(q, image_regs(f));

    struct NewTrans {
        int src;
        Symbol sym;
        Assignment a;
        int dst;
        std::size_t orig;
    };
    std::vector<NewTrans> ntrans;
    std::set<std::pair<std::size_t, int>> done; // (delta index, target node)
    while (!work.empty()) {
        int node = work.front();
        work.pop_front();
        auto [q2, rs2] = nodes[node];
        for (std::size_t i = 0; i < t.delta.size(); ++i) {
            const Transition& tr = t.delta[i];
            if (tr.to != q2) continue;
            if (!subset(rs2, tr.assign.dom())) continue;
            if (!done.insert({i, node}).second) continue;
            Assignment sigma = restrict_assign(tr.assign, rs2);
            int src = intern(tr.from, sigma.reg());
            ntrans.push_back({src, tr.sym, std::move(sigma), node, i});
        }
    }

    Nsst r;
    r.input = t.input;
    r.output = t.output;
    r.registers = t.registers;
    std::set<std::string> used;
    for (const auto& [q, rs] : nodes) {
        std::string name = t.states[q] + regset_name(rs);
        while (!used.insert(name).second) name += "_";
        r.add_state(std::move(name));
    }
    // keep Δ' in source-Δ order so duplicates stay adjacent and deterministic
    std::sort(ntrans.begin(), ntrans.end(), [](const NewTrans& a, const NewTrans& b) {
        return std::tie(a.orig, a.src, a.dst) < std::tie(b.orig, b.src, b.dst);
    });
    for (const NewTrans& nt : ntrans)
        r.delta.push_back(Transition{nt.src, nt.sym, nt.a, nt.dst});
    for (int id = 0; id < (int)nodes.size(); ++id) {
        auto& [q, rs] = nodes[id];
        auto it = t.init.find(q);
        if (it != t.init.end() && subset(rs, it->second.dom()))
            r.init.emplace(id, restrict_assign(it->second, rs));
        auto fit = t.final_.find(q);
        if (fit != t.final_.end() && image_regs(fit->second) == rs)
            r.final_.emplace(id, fit->second);
    }
    return trim_nsst(r);
}

namespace {

// Exact definitional check via reachable (state, dom(ν)) analysis.
bool garbage_free_exact(const Nsst& t) {
    using Node = std::pair<int, std::set<Reg>>;
    std::set<Node> fwd;
    std::deque<Node> work;
    for (const auto& [q, v] : t.init) {
        Node n{q, v.dom()};
        if (fwd.insert(n).second) work.push_back(n);
    }
    std::map<Node, std::vector<std::pair<std::size_t, Node>>> edges;
    while (!work.empty()) {
        Node n = work.front();
        work.pop_front();
        for (std::size_t i = 0; i < t.delta.size(); ++i) {
            const Transition& tr = t.delta[i];
            if (tr.from != n.first) continue;
            std::set<Reg> d2;
            for (const auto& [x, img] : tr.assign.m)
                if (subset(image_regs(img), n.second)) d2.insert(x);
            Node m{tr.to, std::move(d2)};
            edges[n].push_back({i, m});
            if (fwd.insert(m).second) work.push_back(m);
        }
    }
    // co-accepting closure
    std::set<Node> cacc;
    for (const Node& n : fwd) {
        auto fit = t.final_.find(n.first);
        if (fit != t.final_.end() && subset(image_regs(fit->second), n.second))
            cacc.insert(n);
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [n, outs] : edges) {
            if (cacc.count(n)) continue;
            for (const auto& [_, m] : outs)
                if (cacc.count(m)) {
                    cacc.insert(n);
                    changed = true;
                    break;
                }
        }
    }
    for (const Node& n : fwd) {
        auto fit = t.final_.find(n.first);
        if (fit != t.final_.end() && subset(image_regs(fit->second), n.second) &&
            image_regs(fit->second) != n.second)
            return false;
        auto eit = edges.find(n);
        if (eit == edges.end()) continue;
        for (const auto& [i, m] : eit->second)
            if (cacc.count(m) && t.delta[i].assign.reg() != n.second)
                return false;
    }
    return true;
}

} // namespace

bool is_garbage_free(const Nsst& t0) {
    Nsst t = trim_nsst(t0);
    if (t.states.empty()) return true;

    // Structural check (reg/dom consistency tables); sound but conservative.
    std::map<int, std::set<Reg>> regv, domv;
    std::map<int, bool> has_out, has_in;
    bool structural = true;
    for (const Transition& tr : t.delta) {
        std::set<Reg> rg = tr.assign.reg();
        std::set<Reg> dm = tr.assign.dom();
        if (has_out.count(tr.from) && regv[tr.from] != rg) structural = false;
        regv[tr.from] = rg;
        has_out[tr.from] = true;
        if (has_in.count(tr.to) && domv[tr.to] != dm) structural = false;
        domv[tr.to] = dm;
        has_in[tr.to] = true;
    }
    if (structural) {
        for (int q = 0; q < (int)t.states.size(); ++q) {
            if (has_in.count(q) && has_out.count(q) && domv[q] != regv[q])
                structural = false;
        }
        for (const auto& [q, v] : t.init) {
            if (has_out.count(q) && v.dom() != regv[q]) structural = false;
            auto fit = t.final_.find(q);
            if (fit != t.final_.end()) {
                std::set<Reg> fr = image_regs(fit->second);
                if (subset(fr, v.dom()) && fr != v.dom()) structural = false;
            }
        }
        for (const auto& [q, f] : t.final_)
            if (has_in.count(q) && image_regs(f) != domv[q]) structural = false;
    }
    if (structural) return true;
    return garbage_free_exact(t);
}

int branching_factor(const Nsst& t) {
    std::map<std::pair<int, Symbol>, int> counts;
    int m = 0;
    for (const Transition& tr : t.delta) m = std::max(m, ++counts[{tr.from, tr.sym}]);
    return m;
}

namespace {

std::string ann_var(char prefix, int idx, int width) {
    std::string num = std::to_string(idx);
    while ((int)num.size() < width) num = "0" + num;
    return std::string(1, prefix) + num;
}

} // namespace

EtPair nsst_to_et(const Nsst& t) {
    for (const Symbol& s : t.input)
        if (s.is_bracket())
            throw AlphabetError("nsst_to_et requires a bracket-free input alphabet");

    const int n = std::max(1, (int)t.states.size());
    const int m = std::max(1, branching_factor(t));
    const int width = (int)std::to_string(std::max(n, m)).size();

    using E = MultispannerExpr;
    auto pair_of = [&](char pfx, int i) {
        return E::capture(ann_var(pfx, i, width), E::eps());
    };
    auto alt_chain = [&](char pfx, int k) {
        ExprPtr e = pair_of(pfx, 1);
        for (int i = 2; i <= k; ++i) e = E::alt(e, pair_of(pfx, i));
        return e;
    };
    ExprPtr sigma_any;
    for (const Symbol& s : t.input) {
        ExprPtr l = E::lit(s.ch);
        sigma_any = sigma_any ? E::alt(sigma_any, l) : l;
    }
    ExprPtr r = alt_chain('a', n);
    if (sigma_any)
        r = E::concat(r, E::star(E::concat(alt_chain('b', m), sigma_any)));

    // replay DSST
    Dsst d;
    d.registers = t.registers;
    d.output = t.output;
    d.input = t.input;
    for (int i = 1; i <= n; ++i) {
        d.input.insert(Symbol::open(ann_var('a', i, width)));
        d.input.insert(Symbol::close(ann_var('a', i, width)));
    }
    for (int h = 1; h <= m; ++h) {
        d.input.insert(Symbol::open(ann_var('b', h, width)));
        d.input.insert(Symbol::close(ann_var('b', h, width)));
    }

    Assignment id = identity_assign(t.registers);
    int s_start = d.add_state("start");
    d.q0 = s_start;
    std::vector<int> s_iopen(n + 1), s_at(t.states.size());
    for (int i = 1; i <= n; ++i) s_iopen[i] = d.add_state("iopen" + std::to_string(i));
    for (int q = 0; q < (int)t.states.size(); ++q)
        s_at[q] = d.add_state("at:" + t.states[q]);

    for (int i = 1; i <= (int)t.states.size(); ++i) {
        int q = i - 1;
        auto it = t.init.find(q);
        if (it == t.init.end()) continue;
        d.delta[{s_start, Symbol::open(ann_var('a', i, width))}] = {id, s_iopen[i]};
        d.delta[{s_iopen[i], Symbol::close(ann_var('a', i, width))}] = {it->second, s_at[q]};
    }

    // per (q, b): the h-th listed transition
    std::map<std::pair<int, Symbol>, std::vector<std::size_t>> grouped;
    for (std::size_t i = 0; i < t.delta.size(); ++i)
        grouped[{t.delta[i].from, t.delta[i].sym}].push_back(i);

    for (int q = 0; q < (int)t.states.size(); ++q) {
        std::set<int> used_h;
        for (const auto& [key, ids] : grouped) {
            if (key.first != q) continue;
            for (int h = 1; h <= (int)ids.size(); ++h) used_h.insert(h);
        }
        std::map<int, std::pair<int, int>> h_states; // h -> (open, pend)
        for (int h : used_h) {
            int so = d.add_state("at:" + t.states[q] + ":o" + std::to_string(h));
            int sp = d.add_state("at:" + t.states[q] + ":p" + std::to_string(h));
            d.delta[{s_at[q], Symbol::open(ann_var('b', h, width))}] = {id, so};
            d.delta[{so, Symbol::close(ann_var('b', h, width))}] = {id, sp};
            h_states[h] = {so, sp};
        }
        for (const auto& [key, ids] : grouped) {
            if (key.first != q) continue;
            for (int h = 1; h <= (int)ids.size(); ++h) {
                const Transition& tr = t.delta[ids[h - 1]];
                d.delta[{h_states[h].second, key.second}] = {tr.assign, s_at[tr.to]};
            }
        }
        auto fit = t.final_.find(q);
        if (fit != t.final_.end()) d.final_[s_at[q]] = fit->second;
    }
    return EtPair{r, d};
}

} // namespace ettx
