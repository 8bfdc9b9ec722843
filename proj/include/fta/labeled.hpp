#pragma once

#include "abelian.hpp"
#include "folding.hpp"

namespace fta {

// Basepoint data of a doubly enriched automaton.
struct SubgroupPair {
    AbelianSubgroup first;
    AbelianSubgroup second;
    friend bool operator==(const SubgroupPair&, const SubgroupPair&) = default;
};

template <class Base>
struct BaseTraits;

template <>
struct BaseTraits<AbelianSubgroup> {
    static std::size_t dim(const AbelianSubgroup& b) { return b.dim(); }
    static Vec reduce(const AbelianSubgroup& b, const Vec& v) { return b.reduce(v); }
    static void absorb(AbelianSubgroup& b, const Vec& v) {
        if (!b.contains(v)) b = with_generator(b, v);
    }
};

// Labels are (first-factor | second-factor) concatenations of length 2m.
template <>
struct BaseTraits<SubgroupPair> {
    static std::size_t dim(const SubgroupPair& b) { return 2 * b.first.dim(); }
    static Vec reduce(const SubgroupPair& b, const Vec& v) {
        const std::size_t m = b.first.dim();
        return concat(b.first.reduce(slice(v, 0, m)), b.second.reduce(slice(v, m, m)));
    }
    static void absorb(SubgroupPair& b, const Vec& v) {
        const std::size_t m = b.first.dim();
        if (!b.first.contains(slice(v, 0, m)) || !b.second.contains(slice(v, m, m)))
            throw std::logic_error("closed folding in a doubly enriched automaton");
    }
};

template <class Base>
class LabeledAutomaton {
public:
    LabeledAutomaton() = default;
    LabeledAutomaton(Automaton skeleton, std::vector<LabelPair> labels, Base base)
        : skeleton_(std::move(skeleton)), labels_(std::move(labels)), base_(std::move(base)) {
        if (labels_.size() != skeleton_.arc_count()) throw std::invalid_argument("one label pair per arc required");
        const std::size_t m = BaseTraits<Base>::dim(base_);
        for (const auto& l : labels_) {
            require_dim(l.head, m, "arc label");
            require_dim(l.tail, m, "arc label");
        }
    }

    const Automaton& skeleton() const { return skeleton_; }
    const std::vector<LabelPair>& labels() const { return labels_; }
    const LabelPair& label(std::size_t arc) const { return labels_.at(arc); }
    const Base& base() const { return base_; }
    std::size_t dim() const { return BaseTraits<Base>::dim(base_); }

    friend bool operator==(const LabeledAutomaton&, const LabeledAutomaton&) = default;

private:
    Automaton skeleton_;
    std::vector<LabelPair> labels_;
    Base base_;
};

template <class Base>
Vec reading(const LabeledAutomaton<Base>& e, Step s) {
    return step_reading(e.label(s.arc), s);
}

template <class Base>
Vec walk_reading(const LabeledAutomaton<Base>& e, const std::vector<Step>& walk) {
    Vec sum = zero_vec(e.dim());
    for (auto s : walk) sum = sum + reading(e, s);
    return sum;
}

template <class Base>
LabeledAutomaton<Base> vertex_transformation(const LabeledAutomaton<Base>& e, std::size_t v, const Vec& c) {
    if (v >= e.skeleton().vertex_count()) throw std::out_of_range("vertex transformation: no such vertex");
    require_dim(c, e.dim(), "vertex transformation");
    auto labels = e.labels();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (e.skeleton().arc(i).from == v) labels[i].head = labels[i].head + c;
        if (e.skeleton().arc(i).to == v) labels[i].tail = labels[i].tail + c;
    }
    return {e.skeleton(), std::move(labels), e.base()};
}

template <class Base>
LabeledAutomaton<Base> arc_transformation(const LabeledAutomaton<Base>& e, std::size_t arc, const Vec& c) {
    if (arc >= e.skeleton().arc_count()) throw std::out_of_range("arc transformation: no such arc");
    require_dim(c, e.dim(), "arc transformation");
    auto labels = e.labels();
    labels[arc].head = labels[arc].head + c;
    labels[arc].tail = labels[arc].tail + c;
    return {e.skeleton(), std::move(labels), e.base()};
}

template <class Base>
LabeledAutomaton<Base> apply_arc_map(const LabeledAutomaton<Base>& e, const ArcMap& map) {
    std::vector<LabelPair> labels;
    for (auto i : map.source_arc) labels.push_back(e.label(i));
    return {map.automaton, std::move(labels), e.base()};
}

namespace detail {

template <class Base>
void check_fold_pair(const LabeledAutomaton<Base>& e, std::size_t a, std::size_t b) {
    const auto& sk = e.skeleton();
    if (a >= sk.arc_count() || b >= sk.arc_count() || a == b) throw std::invalid_argument("fold: invalid arcs");
    if (sk.arc(a).from != sk.arc(b).from || sk.arc(a).gen != sk.arc(b).gen)
        throw std::invalid_argument("fold: arcs must share origin and letter");
}

}  // namespace detail

// Identify arcs a and b (same origin and letter, different targets).
template <class Base>
LabeledAutomaton<Base> open_fold(const LabeledAutomaton<Base>& e, std::size_t a, std::size_t b) {
    detail::check_fold_pair(e, a, b);
    const auto& sk = e.skeleton();
    const std::size_t ta = sk.arc(a).to, tb = sk.arc(b).to;
    if (ta == tb) throw std::invalid_argument("open fold: targets coincide");
    auto x = arc_transformation(e, b, e.label(a).head - e.label(b).head);
    x = vertex_transformation(x, tb, e.label(a).tail - x.label(b).tail);
    // merge tb into ta, drop b
    std::vector<Arc> arcs;
    std::vector<LabelPair> labels;
    auto rv = [&](std::size_t v) {
        if (v == tb) v = ta;
        return v > tb ? v - 1 : v;
    };
    for (std::size_t i = 0; i < sk.arc_count(); ++i) {
        if (i == b) continue;
        arcs.push_back({rv(sk.arc(i).from), sk.arc(i).gen, rv(sk.arc(i).to)});
        labels.push_back(x.label(i));
    }
    Automaton merged(sk.alphabet(), sk.vertex_count() - 1, rv(sk.basepoint()), std::move(arcs));
    return {std::move(merged), std::move(labels), e.base()};
}

// Drop arc b (parallel to a) and record the difference of readings in the base.
template <class Base>
LabeledAutomaton<Base> closed_fold(const LabeledAutomaton<Base>& e, std::size_t a, std::size_t b) {
    detail::check_fold_pair(e, a, b);
    const auto& sk = e.skeleton();
    if (sk.arc(a).to != sk.arc(b).to) throw std::invalid_argument("closed fold: targets differ");
    const auto &la = e.label(a), &lb = e.label(b);
    Base base = e.base();
    BaseTraits<Base>::absorb(base, -la.tail + la.head - lb.head + lb.tail);
    std::vector<Arc> arcs = sk.arcs();
    std::vector<LabelPair> labels = e.labels();
    arcs.erase(arcs.begin() + static_cast<std::ptrdiff_t>(b));
    labels.erase(labels.begin() + static_cast<std::ptrdiff_t>(b));
    return {Automaton(sk.alphabet(), sk.vertex_count(), sk.basepoint(), std::move(arcs)), std::move(labels),
            std::move(base)};
}

// Fold, absorb closed-fold vectors, prune to the core and renumber canonically.
template <class Base>
LabeledAutomaton<Base> reduce(const LabeledAutomaton<Base>& e, const LetterOrder& order,
                              FoldStrategy strategy = FoldStrategy::stack) {
    auto folded = fold_labeled(e.skeleton(), e.labels(), e.dim(), strategy);
    Base base = e.base();
    for (const auto& v : folded.closed) BaseTraits<Base>::absorb(base, v);
    LabeledAutomaton<Base> f(folded.automaton, folded.labels, base);
    auto pruned = apply_arc_map(f, core_map(f.skeleton()));
    return apply_arc_map(pruned, canonical_map(pruned.skeleton(), order));
}

template <class Base>
LabeledAutomaton<Base> reduce(const LabeledAutomaton<Base>& e) {
    return reduce(e, default_order(e.skeleton().alphabet()));
}

// Push all label mass onto the tails of non-tree arcs, then reduce those modulo the base.
// Tree arcs are cleared root to leaf: an arc transformation zeroes the parent side, a vertex
// transformation at the child zeroes the child side. Later steps only touch deeper vertices.
// With reduce_labels false the non-tree tails are left as exact petal readings.
template <class Base>
LabeledAutomaton<Base> normalize(const LabeledAutomaton<Base>& e, const SpanningTree& t, bool reduce_labels = true) {
    const auto& sk = e.skeleton();
    if (t.vertex_count() != sk.vertex_count()) throw std::invalid_argument("normalize: tree does not span the automaton");
    std::vector<LabelPair> labels = e.labels();
    std::vector<std::vector<std::size_t>> inc(sk.vertex_count());
    for (std::size_t i = 0; i < sk.arc_count(); ++i) {
        inc[sk.arc(i).from].push_back(i);
        if (sk.arc(i).to != sk.arc(i).from) inc[sk.arc(i).to].push_back(i);
    }
    auto vertex_shift = [&](std::size_t v, const Vec& c) {
        for (auto i : inc[v]) {
            if (sk.arc(i).from == v) labels[i].head = labels[i].head + c;
            if (sk.arc(i).to == v) labels[i].tail = labels[i].tail + c;
        }
    };
    for (auto v : t.vertex_order()) {
        const auto& ps = t.parent_step(v);
        if (!ps) continue;
        auto& l = labels[ps->arc];
        Vec c = -step_head(l, *ps);
        l.head = l.head + c;
        l.tail = l.tail + c;
        vertex_shift(v, -step_tail(l, *ps));
    }
    for (auto i : t.non_tree_arcs()) {
        auto& l = labels[i];
        l.tail = l.tail - l.head;
        if (reduce_labels) l.tail = BaseTraits<Base>::reduce(e.base(), l.tail);
        l.head = zero_vec(e.dim());
    }
    return {sk, std::move(labels), e.base()};
}

}  // namespace fta
