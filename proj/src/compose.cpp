#include "ettx/compose.hpp"

#include <deque>

#include "ettx/errors.hpp"

namespace ettx {

namespace {

// s extended with the identity on carrier registers referenced by img
Assignment ext_for(const Assignment& s, const Image& img, const std::set<Reg>& regs2) {
    Assignment e = s;
    for (const Atom& a : img)
        if (a.is_reg && !regs2.count(a.reg))
            e.m.emplace(a.reg, Image{Atom::r(a.reg)});
    return e;
}

Assignment ext_for(const Assignment& s, const Assignment& b, const std::set<Reg>& regs2) {
    Assignment e = s;
    for (const auto& [x, img] : b.m)
        for (const Atom& a : img)
            if (a.is_reg && !regs2.count(a.reg))
                e.m.emplace(a.reg, Image{Atom::r(a.reg)});
    return e;
}

} // namespace

Subrun subrun_id(int q, const std::set<Reg>& regs2) {
    return {false, q, q, identity_assign(regs2)};
}

Subrun subrun_bot() {
    Subrun s;
    s.bot = true;
    return s;
}

Subrun subrun_mul(const Subrun& a, const Subrun& b, const std::set<Reg>& regs2) {
    if (a.bot || b.bot || a.r != b.q) return subrun_bot();
    return {false, a.q, b.r, compose_assign(ext_for(a.s, b.s, regs2), b.s)};
}

std::pair<Assignment, Assignment> summarize_assign(const Assignment& s,
                                                   const std::set<Reg>& regs2,
                                                   const std::string& tag) {
    Assignment skel, zeta;
    int slot = 0;
    for (const auto& [y, img] : s.m) {
        Image sk, run;
        auto flush = [&] {
            if (run.empty()) return;
            Reg name = "z" + tag + "_" + std::to_string(slot++);
            sk.push_back(Atom::r(name));
            zeta.m.emplace(name, std::move(run));
            run.clear();
        };
        for (const Atom& a : img) {
            if (a.is_reg && regs2.count(a.reg)) {
                flush();
                sk.push_back(a);
            } else {
                run.push_back(a);
            }
        }
        flush();
        skel.m.emplace(y, std::move(sk));
    }
    return {std::move(skel), std::move(zeta)};
}

namespace {

struct Summary {
    int q = 0, r = 0;
    Assignment skel;
    auto operator<=>(const Summary&) const = default;
};

using Guess = std::map<Reg, Summary>;

struct Builder {
    const Nsst& t1;
    const Nsst& t2;
    std::size_t max_states;

    std::set<Reg> r2;
    std::map<Char, std::vector<Subrun>> letter_opts;

    std::map<std::pair<int, Guess>, int> ids;
    std::vector<std::pair<int, Guess>> bases;
    std::deque<int> work;

    struct Edge {
        int from, to;
        Symbol sym;
        Assignment zeta;
    };
    std::vector<Edge> edges;
    std::map<int, std::vector<Valuation>> init_cands;
    std::map<int, std::vector<Image>> final_cands;

    int intern(int p, Guess f) {
        auto [it, fresh] = ids.try_emplace({p, std::move(f)}, (int)bases.size());
        if (fresh) {
            if (bases.size() >= max_states)
                throw SizeBudgetExceeded("composition state budget exhausted");
            bases.push_back(it->first);
            work.push_back(it->second);
        }
        return it->second;
    }

    std::vector<Subrun> fold(const Image& img, const Guess& f) {
        std::vector<Subrun> cands;
        bool first = true;
        for (const Atom& a : img) {
            std::vector<Subrun> opts;
            if (a.is_reg) {
                const Summary& s = f.at(a.reg);
                opts.push_back({false, s.q, s.r, s.skel});
            } else {
                auto it = letter_opts.find(a.ch);
                if (it != letter_opts.end()) opts = it->second;
            }
            if (first) {
                cands = std::move(opts);
                first = false;
            } else {
                std::vector<Subrun> nx;
                for (const Subrun& c : cands)
                    for (const Subrun& o : opts) {
                        Subrun m = subrun_mul(c, o, r2);
                        if (!m.bot) nx.push_back(std::move(m));
                    }
                cands = std::move(nx);
            }
            if (cands.empty()) return cands;
        }
        if (first)
            for (int q = 0; q < (int)t2.states.size(); ++q)
                cands.push_back(subrun_id(q, r2));
        return cands;
    }

    // all joint guesses over the images of `xs`, emitted via sink
    template <class Sink>
    void products(const std::vector<Reg>& xs, const Assignment& src, const Guess& f,
                  Sink&& sink) {
        std::vector<std::vector<Subrun>> lists;
        for (const Reg& x : xs) {
            lists.push_back(fold(src.m.at(x), f));
            if (lists.back().empty()) return;
        }
        std::vector<std::size_t> pick(xs.size(), 0);
        for (;;) {
            Guess g;
            Assignment zeta;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                const Subrun& c = lists[i][pick[i]];
                auto [skel, z] = summarize_assign(c.s, r2, xs[i]);
                g.emplace(xs[i], Summary{c.q, c.r, std::move(skel)});
                zeta.m.insert(z.m.begin(), z.m.end());
            }
            sink(std::move(g), std::move(zeta));
            std::size_t i = 0;
            while (i < pick.size() && ++pick[i] == lists[i].size()) pick[i++] = 0;
            if (i == pick.size()) break;
        }
    }

    void expand(int id) {
        auto [p, f] = bases[id];
        std::set<Reg> fdom;
        for (const auto& [x, s] : f) fdom.insert(x);

        for (const Transition& tr : t1.delta) {
            if (tr.from != p || tr.assign.reg() != fdom) continue;
            std::vector<Reg> xs;
            for (const auto& [x, img] : tr.assign.m) xs.push_back(x);
            products(xs, tr.assign, f, [&](Guess g, Assignment zeta) {
                int to = intern(tr.to, std::move(g));
                edges.push_back({id, to, tr.sym, std::move(zeta)});
            });
        }

        auto fit = t1.final_.find(p);
        if (fit != t1.final_.end() && image_regs(fit->second) == fdom) {
            for (const Subrun& c : fold(fit->second, f)) {
                auto iit = t2.init.find(c.q);
                auto oit = t2.final_.find(c.r);
                if (iit == t2.init.end() || oit == t2.final_.end()) continue;
                auto step1 = subst(ext_for(c.s, oit->second, r2), oit->second);
                if (!step1) continue;
                auto step2 = subst(ext_for(iit->second, *step1, r2), *step1);
                if (!step2) continue;
                final_cands[id].push_back(std::move(*step2));
            }
        }
    }
};

void collect_regs(const Assignment& a, std::set<Reg>& out) {
    for (const auto& [x, img] : a.m) {
        out.insert(x);
        for (const Atom& at : img)
            if (at.is_reg) out.insert(at.reg);
    }
}

} // namespace

Nsst compose_nsst(const Nsst& t1in, const Nsst& t2in, std::size_t max_states,
                  ComposeStats* stats) {
    for (const Symbol& s : t2in.input)
        if (!s.is_chr())
            throw PreconditionViolation("second machine must read plain letters");
    Nsst t1 = garbage_free_transform(t1in);
    Nsst t2 = garbage_free_transform(t2in);

    Builder b{t1, t2, max_states, t2.registers, {}, {}, {}, {}, {}, {}, {}};
    for (const Transition& tr : t2.delta)
        b.letter_opts[tr.sym.ch].push_back({false, tr.from, tr.to, tr.assign});

    // initial guesses come from second-machine subruns over the seed contents
    for (const auto& [q1, v1] : t1.init) {
        std::vector<Reg> xs;
        for (const auto& [x, img] : v1.m) xs.push_back(x);
        b.products(xs, v1, {}, [&](Guess g, Assignment zeta) {
            int id = b.intern(q1, std::move(g));
            b.init_cands[id].push_back(std::move(zeta));
        });
    }
    while (!b.work.empty()) {
        int id = b.work.front();
        b.work.pop_front();
        b.expand(id);
    }

    Nsst out;
    out.input = t1.input;
    out.output = t2.output;
    for (std::size_t i = 0; i < b.bases.size(); ++i)
        out.add_state("c" + std::to_string(i));
    // extra initial or final choices need their own states: clones replicate
    // outgoing edges, final variants replicate incoming edges, combo states
    // only carry the empty-input runs
    std::map<int, std::vector<int>> clones, fvars;
    for (auto& [id, cands] : b.init_cands)
        for (std::size_t k = 1; k < cands.size(); ++k)
            clones[id].push_back(
                out.add_state(out.states[id] + "i" + std::to_string(k)));
    for (auto& [id, cands] : b.final_cands)
        for (std::size_t j = 1; j < cands.size(); ++j)
            fvars[id].push_back(
                out.add_state(out.states[id] + "f" + std::to_string(j)));
    std::map<std::pair<int, std::pair<std::size_t, std::size_t>>, int> combos;
    for (auto& [id, ics] : b.init_cands) {
        auto fit = b.final_cands.find(id);
        if (fit == b.final_cands.end()) continue;
        for (std::size_t k = 1; k < ics.size(); ++k)
            for (std::size_t j = 1; j < fit->second.size(); ++j)
                combos[{id, {k, j}}] = out.add_state(
                    out.states[id] + "i" + std::to_string(k) + "f" + std::to_string(j));
    }

    for (const Builder::Edge& e : b.edges) {
        std::vector<int> srcs{e.from};
        if (auto it = clones.find(e.from); it != clones.end())
            srcs.insert(srcs.end(), it->second.begin(), it->second.end());
        std::vector<int> dsts{e.to};
        if (auto it = fvars.find(e.to); it != fvars.end())
            dsts.insert(dsts.end(), it->second.begin(), it->second.end());
        for (int s : srcs)
            for (int d : dsts) out.delta.push_back({s, e.sym, e.zeta, d});
    }

    for (auto& [id, cands] : b.init_cands) {
        out.init.emplace(id, cands[0]);
        if (auto it = clones.find(id); it != clones.end())
            for (std::size_t k = 1; k < cands.size(); ++k)
                out.init.emplace(it->second[k - 1], cands[k]);
        if (auto it = fvars.find(id); it != fvars.end())
            for (int v : it->second) out.init.emplace(v, cands[0]);
    }
    for (auto& [id, cands] : b.final_cands) {
        out.final_.emplace(id, cands[0]);
        if (auto it = clones.find(id); it != clones.end())
            for (int c : it->second) out.final_.emplace(c, cands[0]);
        if (auto it = fvars.find(id); it != fvars.end())
            for (std::size_t j = 1; j < cands.size(); ++j)
                out.final_.emplace(it->second[j - 1], cands[j]);
    }
    for (auto& [key, st] : combos) {
        out.init.emplace(st, b.init_cands.at(key.first)[key.second.first]);
        out.final_.emplace(st, b.final_cands.at(key.first)[key.second.second]);
    }

    for (const Transition& tr : out.delta) collect_regs(tr.assign, out.registers);
    for (const auto& [q, v] : out.init) collect_regs(v, out.registers);
    for (const auto& [q, img] : out.final_)
        for (const Atom& a : img)
            if (a.is_reg) out.registers.insert(a.reg);

    if (stats) {
        stats->states = out.states.size();
        stats->transitions = out.delta.size();
    }
    out.validate();
    return trim_nsst(out);
}

} // namespace ettx
