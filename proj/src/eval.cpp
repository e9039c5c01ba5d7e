#include "ettx/eval.hpp"

#include <algorithm>

#include "ettx/errors.hpp"

namespace ettx {

namespace {

std::map<int, NodeRef> advance(const Nsst& t, const Word& w, Ecsa& e,
                               std::uint64_t* fired) {
    std::map<int, NodeRef> table;
    for (const auto& [q, v] : t.init) table.emplace(q, e.leaf(v));
    for (const Symbol& s : w) {
        std::map<int, NodeRef> next;
        for (const Transition& tr : t.delta) {
            if (!(tr.sym == s)) continue;
            auto it = table.find(tr.from);
            if (it == table.end()) continue;
            if (fired) ++*fired;
            NodeRef n = e.extend(it->second, tr.assign);
            auto [jt, fresh] = next.emplace(tr.to, n);
            if (!fresh) jt->second = e.unite(jt->second, n);
        }
        table = std::move(next);
        if (table.empty()) break;
    }
    return table;
}

} // namespace

std::map<int, NodeRef> eval_table(const Nsst& t, const Word& w, Ecsa& ecsa) {
    return advance(t, w, ecsa, nullptr);
}

Bag<Doc> evaluate(const Nsst& t, const Word& w, EvalStats* stats,
                  std::uint64_t limit) {
    if (!is_garbage_free(t))
        throw NotGarbageFree("evaluation requires a garbage-free machine");
    Ecsa e;
    std::uint64_t fired = 0;
    std::map<int, NodeRef> table = advance(t, w, e, &fired);
    if (stats) {
        stats->transitions_fired = fired;
        stats->ecsa_nodes = e.size();
    }

    Bag<Doc> out;
    std::size_t prev_len = 0;
    for (const auto& [q, f] : t.final_) {
        auto it = table.find(q);
        if (it == table.end()) continue;
        Ecsa::Cursor cur = e.cursor(it->second);
        std::uint64_t mark = cur.steps();
        Valuation v;
        while (cur.next(v)) {
            auto d = apply_valuation(v, f);
            if (d) {
                if (stats) {
                    std::uint64_t gap = cur.steps() - mark;
                    std::size_t around = std::max<std::size_t>(1, prev_len + d->size());
                    stats->max_delay_steps = std::max(stats->max_delay_steps, gap);
                    stats->max_delay_ratio =
                        std::max(stats->max_delay_ratio, (double)gap / (double)around);
                    ++stats->outputs;
                    prev_len = d->size();
                }
                out.add(std::move(*d));
                if (limit && out.size() >= limit) return out;
            }
            mark = cur.steps();
        }
    }
    return out;
}

} // namespace ettx
