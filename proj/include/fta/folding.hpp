#pragma once

#include "automaton.hpp"

namespace fta {

// Abelian labels of a positive arc: head at the origin (lab1), tail at the target (lab2).
// The arc reads x * t^(tail - head); crossing it backwards reads x^-1 * t^(head - tail).
struct LabelPair {
    Vec head;
    Vec tail;
    friend bool operator==(const LabelPair&, const LabelPair&) = default;
};

inline LabelPair zero_labels(std::size_t m) { return {zero_vec(m), zero_vec(m)}; }

// Labels as seen from a half-edge: a backward step swaps head and tail.
inline const Vec& step_head(const LabelPair& l, Step s) { return s.backward ? l.tail : l.head; }
inline const Vec& step_tail(const LabelPair& l, Step s) { return s.backward ? l.head : l.tail; }
inline Vec step_reading(const LabelPair& l, Step s) { return step_tail(l, s) - step_head(l, s); }

enum class FoldStrategy { stack, queue };

struct FoldOutcome {
    Automaton automaton;
    std::vector<LabelPair> labels;
    std::vector<Vec> closed;  // reading(g) - reading(h) for every closed fold
};

namespace detail {

class FoldEngine {
public:
    FoldEngine(const Automaton& a, std::vector<LabelPair> labels, std::size_t dim)
        : n_(a.alphabet()),
          arcs_(a.arcs()),
          labels_(std::move(labels)),
          alive_(a.arc_count(), 1),
          parent_(a.vertex_count()),
          inc_(a.vertex_count()),
          basepoint_(a.basepoint()) {
        if (labels_.empty()) labels_.assign(arcs_.size(), zero_labels(dim));
        if (labels_.size() != arcs_.size()) throw std::invalid_argument("fold: one label pair per arc required");
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
        for (std::size_t i = 0; i < arcs_.size(); ++i) {
            inc_[arcs_[i].from].push_back(i);
            if (arcs_[i].to != arcs_[i].from) inc_[arcs_[i].to].push_back(i);
        }
    }

    FoldOutcome run(FoldStrategy strategy) {
        std::deque<std::size_t> work;
        for (std::size_t v = 0; v < parent_.size(); ++v) work.push_back(v);
        while (!work.empty()) {
            std::size_t v;
            if (strategy == FoldStrategy::stack) {
                v = work.back();
                work.pop_back();
            } else {
                v = work.front();
                work.pop_front();
            }
            while (auto merged = fold_once(find(v))) work.push_back(*merged);
        }
        return finish();
    }

private:
    std::size_t find(std::size_t v) {
        while (parent_[v] != v) {
            parent_[v] = parent_[parent_[v]];
            v = parent_[v];
        }
        return v;
    }
    std::size_t origin(Step s) { return find(s.backward ? arcs_[s.arc].to : arcs_[s.arc].from); }
    std::size_t target(Step s) { return find(s.backward ? arcs_[s.arc].from : arcs_[s.arc].to); }

    void vertex_transform(std::size_t w, const Vec& c) {
        for (auto e : inc_[w]) {
            if (!alive_[e]) continue;
            if (find(arcs_[e].from) == w) labels_[e].head = labels_[e].head + c;
            if (find(arcs_[e].to) == w) labels_[e].tail = labels_[e].tail + c;
        }
    }

    // Looks for two half-edges at v with one letter; folds them and returns the
    // vertex that needs another look, or nothing when v is deterministic.
    std::optional<std::size_t> fold_once(std::size_t v) {
        std::vector<std::optional<Step>> slot(2 * n_);
        for (auto e : inc_[v]) {
            if (!alive_[e]) continue;
            for (bool back : {false, true}) {
                Step s{e, back};
                if (origin(s) != v) continue;
                auto code = Letter(arcs_[e].gen, back).code();
                if (!slot[code]) {
                    slot[code] = s;
                    continue;
                }
                return fold(*slot[code], s, v);
            }
        }
        return std::nullopt;
    }

    std::size_t fold(Step h, Step g, std::size_t v) {
        const std::size_t th = target(h), tg = target(g);
        if (th == tg) {
            closed_.push_back(step_reading(labels_[g.arc], g) - step_reading(labels_[h.arc], h));
            alive_[g.arc] = 0;
            return v;
        }
        // match the head labels (arc transformation), then the tail labels (vertex transformation at tg)
        Vec c = step_head(labels_[h.arc], h) - step_head(labels_[g.arc], g);
        labels_[g.arc].head = labels_[g.arc].head + c;
        labels_[g.arc].tail = labels_[g.arc].tail + c;
        vertex_transform(tg, step_tail(labels_[h.arc], h) - step_tail(labels_[g.arc], g));
        alive_[g.arc] = 0;
        parent_[tg] = th;
        auto& into = inc_[th];
        into.insert(into.end(), inc_[tg].begin(), inc_[tg].end());
        inc_[tg].clear();
        into.erase(std::remove_if(into.begin(), into.end(), [&](std::size_t e) { return !alive_[e]; }), into.end());
        std::sort(into.begin(), into.end());
        into.erase(std::unique(into.begin(), into.end()), into.end());
        return th;
    }

    FoldOutcome finish() {
        const std::size_t V = parent_.size();
        std::vector<std::size_t> renum(V, 0);
        std::size_t next = 0;
        for (std::size_t v = 0; v < V; ++v)
            if (find(v) == v) renum[v] = next++;
        FoldOutcome out;
        std::vector<Arc> arcs;
        for (std::size_t i = 0; i < arcs_.size(); ++i) {
            if (!alive_[i]) continue;
            arcs.push_back({renum[find(arcs_[i].from)], arcs_[i].gen, renum[find(arcs_[i].to)]});
            out.labels.push_back(labels_[i]);
        }
        out.automaton = Automaton(n_, next, renum[find(basepoint_)], std::move(arcs));
        out.closed = std::move(closed_);
        return out;
    }

    std::size_t n_;
    std::vector<Arc> arcs_;
    std::vector<LabelPair> labels_;
    std::vector<char> alive_;
    std::vector<std::size_t> parent_;
    std::vector<std::vector<std::size_t>> inc_;
    std::size_t basepoint_;
    std::vector<Vec> closed_;
};

}  // namespace detail

// Fold until deterministic, carrying abelian labels along (dim 0 for plain automata).
inline FoldOutcome fold_labeled(const Automaton& a, std::vector<LabelPair> labels, std::size_t dim,
                                FoldStrategy strategy = FoldStrategy::stack) {
    return detail::FoldEngine(a, std::move(labels), dim).run(strategy);
}

inline Automaton fold(const Automaton& a, FoldStrategy strategy = FoldStrategy::stack) {
    return fold_labeled(a, {}, 0, strategy).automaton;
}

// fold, prune, renumber canonically
inline Automaton reduce(const Automaton& a, const LetterOrder& order) {
    return canonical(core(fold(a)), order);
}
inline Automaton reduce(const Automaton& a) { return reduce(a, default_order(a.alphabet())); }

inline Automaton stallings(std::size_t alphabet, const std::vector<Word>& words) {
    std::vector<Word> nonempty;
    for (const auto& w : words)
        if (!w.empty()) nonempty.push_back(w);
    return reduce(flower(alphabet, nonempty));
}

}  // namespace fta
