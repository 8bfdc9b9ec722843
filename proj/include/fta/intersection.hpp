#pragma once

#include "enriched.hpp"

namespace fta {

using DoublyEnrichedAutomaton = LabeledAutomaton<SubgroupPair>;

inline void require_same_ambient(const EnrichedAutomaton& e1, const EnrichedAutomaton& e2) {
    if (e1.skeleton().alphabet() != e2.skeleton().alphabet() || !(e1.base().spec() == e2.base().spec()))
        throw std::invalid_argument("subgroups live in different ambient groups");
}

// Product of skeletons carrying both label systems, pruned and renumbered (not yet normalized).
inline DoublyEnrichedAutomaton raw_doubly_enriched_product(const EnrichedAutomaton& e1, const EnrichedAutomaton& e2,
                                                           const LetterOrder& order) {
    require_same_ambient(e1, e2);
    auto pm = product_map(e1.skeleton(), e2.skeleton());
    std::vector<LabelPair> labels;
    for (auto [i, j] : pm.source_arcs)
        labels.push_back({concat(e1.label(i).head, e2.label(j).head), concat(e1.label(i).tail, e2.label(j).tail)});
    DoublyEnrichedAutomaton p(pm.automaton, std::move(labels), SubgroupPair{e1.base(), e2.base()});
    auto pruned = apply_arc_map(p, core_map(p.skeleton()));
    return apply_arc_map(pruned, canonical_map(pruned.skeleton(), order));
}

// Normalized w.r.t. make_tree(skeleton, policy); non-tree labels are exact petal readings.
inline DoublyEnrichedAutomaton doubly_enriched_product(const EnrichedAutomaton& e1, const EnrichedAutomaton& e2,
                                                       const TreePolicy& policy = {}) {
    auto p = raw_doubly_enriched_product(e1, e2, policy.order_for(e1.skeleton().alphabet()));
    return normalize(p, make_tree(p.skeleton(), policy), false);
}

enum class Verdict { finitely_generated, not_finitely_generated };

inline std::string to_string(Verdict v) {
    return v == Verdict::finitely_generated ? "finitely-generated" : "not-finitely-generated";
}

struct IntersectionReport {
    std::size_t r = 0;  // rank of the projection intersection
    std::size_t s = 0;  // rank of M
    Vec deltas;         // length r
    std::vector<Word> petal_words;
    Matrix a1, a2, b1, b2, d, m, p, q, smith;
    AbelianSubgroup base_intersection;
    Verdict verdict = Verdict::finitely_generated;
    bool trivial_projection = true;
    Index free_rank;  // rank of the free part of the intersection
    Index rank;       // free_rank + rank(L1 ∩ L2)
};

namespace detail {

inline Matrix petal_label_rows(const EnrichedAutomaton& e, const SpanningTree& t) {
    Matrix a(0, e.dim());
    for (const auto& g : basis(e, t).free_part) a.append_row(g.vec);
    return a;
}

}  // namespace detail

// Verdict and predicted ranks from r, s, deltas and M.
inline void decide_finitely_generated(IntersectionReport& rep) {
    const std::size_t r = rep.r, s = rep.s;
    rep.trivial_projection = r == 0 || (r == 1 && rep.m.rows() == 0);
    rep.verdict = (r <= 1 || r == s) ? Verdict::finitely_generated : Verdict::not_finitely_generated;
    if (rep.trivial_projection)
        rep.free_rank = Index(Int(0));
    else if (r == 1)
        rep.free_rank = Index(Int(1));
    else if (s < r)
        rep.free_rank = Index::infinite();
    else {
        Int prod = 1;
        for (const auto& d : rep.deltas) prod *= d;
        rep.free_rank = Index(prod * Int(r - 1) + 1);
    }
    rep.rank = rep.free_rank * Index(Int(1));
    if (rep.rank.finite()) rep.rank = Index(rep.rank.value() + Int(rep.base_intersection.rank()));
}

// All matrices of the intersection pipeline for canonical inputs e1, e2 (normalized w.r.t. the
// trees given by the policy).
inline IntersectionReport intersection_report(const EnrichedAutomaton& e1, const EnrichedAutomaton& e2,
                                              const DoublyEnrichedAutomaton& prod, const SpanningTree& t,
                                              const TreePolicy& policy = {}) {
    IntersectionReport rep;
    const std::size_t m = e1.dim();
    const auto t1 = make_tree(e1.skeleton(), policy), t2 = make_tree(e2.skeleton(), policy);
    rep.petal_words = t_basis(prod.skeleton(), t);
    rep.r = rep.petal_words.size();
    rep.a1 = detail::petal_label_rows(e1, t1);
    rep.a2 = detail::petal_label_rows(e2, t2);
    rep.b1 = Matrix(0, t1.non_tree_arcs().size());
    rep.b2 = Matrix(0, t2.non_tree_arcs().size());
    for (const auto& w : rep.petal_words) {
        rep.b1.append_row(word_coordinates(e1.skeleton(), t1, w));
        rep.b2.append_row(word_coordinates(e2.skeleton(), t2, w));
    }
    rep.d = rep.b1 * rep.a1 - rep.b2 * rep.a2;
    if (rep.d.cols() != m) rep.d = Matrix(rep.r, m);
    const auto lsum = sum(e1.base(), e2.base());
    rep.m = preimage_under_matrix(lsum, rep.d);
    auto snf_m = snf(rep.m);
    rep.s = snf_m.s;
    rep.deltas = snf_m.deltas;
    rep.p = snf_m.p;
    rep.q = snf_m.q;
    rep.smith = snf_m.smith;
    rep.base_intersection = intersect(e1.base(), e2.base());
    decide_finitely_generated(rep);
    return rep;
}

// Difference matrix read off the normalized product: row j = first minus second factor label.
inline Matrix product_difference_matrix(const DoublyEnrichedAutomaton& prod, const SpanningTree& t) {
    const std::size_t m = prod.dim() / 2;
    Matrix d(0, m);
    auto pot = tree_potentials(prod, t);
    for (auto arc : t.non_tree_arcs()) {
        const auto& a = prod.skeleton().arc(arc);
        Vec v = pot[a.from] + reading(prod, Step{arc, false}) - pot[a.to];
        d.append_row(slice(v, 0, m) - slice(v, m, m));
    }
    return d;
}

struct CayleyGraph {
    Automaton automaton;     // alphabet w_1..w_r
    std::vector<Vec> elements;  // element of each vertex
    bool complete = true;       // false when the ball misses part of the group
};

// Cayley multidigraph of ⊕ Z/δ_i with generators q_rows (δ = 0 means Z), restricted to the
// ball of the given radius when one is supplied. Vertices are numbered breadth-first.
inline CayleyGraph cayley_multidigraph(const Vec& deltas, const Matrix& q_rows,
                                       std::optional<std::size_t> radius = std::nullopt) {
    const std::size_t r = deltas.size();
    bool seen_zero = false;
    for (std::size_t i = 0; i < r; ++i) {
        if (deltas[i] < 0) throw std::invalid_argument("cayley: negative invariant factor");
        if (deltas[i] == 0) {
            seen_zero = true;
            continue;
        }
        if (seen_zero) throw std::invalid_argument("cayley: zero invariant factors must come last");
        if (i > 0 && deltas[i] % deltas[i - 1] != 0) throw std::invalid_argument("cayley: divisibility chain broken");
    }
    if (seen_zero && !radius) throw std::invalid_argument("cayley: infinite group needs a ball radius");
    if (q_rows.cols() != r) throw DimensionError("cayley: generator length differs from invariant factor count");
    auto norm = [&](Vec v) {
        for (std::size_t i = 0; i < r; ++i)
            if (deltas[i] != 0) v[i] = floor_mod(v[i], deltas[i]);
        return v;
    };
    std::map<Vec, std::size_t> id;
    std::vector<Vec> elems;
    std::vector<std::size_t> dist;
    auto add = [&](const Vec& v, std::size_t d) {
        id.emplace(v, elems.size());
        elems.push_back(v);
        dist.push_back(d);
    };
    add(zero_vec(r), 0);
    bool complete = true;
    for (std::size_t k = 0; k < elems.size(); ++k) {
        for (std::size_t i = 0; i < q_rows.rows(); ++i)
            for (int sign : {1, -1}) {
                Vec w = norm(elems[k] + scaled(q_rows.row(i), sign));
                if (id.count(w)) continue;
                if (radius && dist[k] + 1 > *radius) {
                    complete = false;
                    continue;
                }
                add(w, dist[k] + 1);
            }
    }
    std::vector<Arc> arcs;
    for (std::size_t k = 0; k < elems.size(); ++k)
        for (std::size_t i = 0; i < q_rows.rows(); ++i) {
            auto it = id.find(norm(elems[k] + q_rows.row(i)));
            if (it != id.end()) arcs.push_back({k, i, it->second});
        }
    return {Automaton(q_rows.rows(), elems.size(), 0, std::move(arcs)), std::move(elems), complete};
}

// Generators e_i Q read in ⊕ Z/δ_i.
inline CayleyGraph cayley_for(const IntersectionReport& rep, std::optional<std::size_t> radius = std::nullopt) {
    return cayley_multidigraph(rep.deltas, rep.q, radius);
}

// Replace every vertex of delta by a copy of the tree and reroute each w_i-arc along the i-th petal.
// Vertex (p, v) is p * |V(theta)| + v. Arcs: tree copies per delta vertex, then rerouted arcs.
inline DoublyEnrichedAutomaton vertex_expand(const Automaton& delta, const DoublyEnrichedAutomaton& theta,
                                             const SpanningTree& t) {
    const auto& th = theta.skeleton();
    const auto& petals = t.non_tree_arcs();
    if (delta.alphabet() != petals.size()) throw std::invalid_argument("vertex expansion: alphabet mismatch");
    const std::size_t VT = th.vertex_count();
    const auto tree = t.tree_arcs();
    std::vector<Arc> arcs;
    std::vector<LabelPair> labels;
    for (std::size_t p = 0; p < delta.vertex_count(); ++p)
        for (auto e : tree) {
            const auto& a = th.arc(e);
            arcs.push_back({p * VT + a.from, a.gen, p * VT + a.to});
            labels.push_back(theta.label(e));
        }
    for (const auto& da : delta.arcs()) {
        const auto& a = th.arc(petals[da.gen]);
        arcs.push_back({da.from * VT + a.from, a.gen, da.to * VT + a.to});
        labels.push_back(theta.label(petals[da.gen]));
    }
    Automaton sk(th.alphabet(), delta.vertex_count() * VT, delta.basepoint() * VT + th.basepoint(), std::move(arcs));
    return {std::move(sk), std::move(labels), theta.base()};
}

// Tree of a vertex expansion: all tree copies plus the rerouted arcs of delta's own tree.
inline SpanningTree expansion_tree(const Automaton& delta, const SpanningTree& delta_tree,
                                   const DoublyEnrichedAutomaton& expanded, const SpanningTree& t) {
    const std::size_t copies = delta.vertex_count() * t.tree_arcs().size();
    std::vector<std::size_t> arcs(copies);
    std::iota(arcs.begin(), arcs.end(), std::size_t{0});
    for (auto e : delta_tree.tree_arcs()) arcs.push_back(copies + e);
    return spanning_tree_from_arcs(expanded.skeleton(), arcs);
}

inline bool is_equalizable(const DoublyEnrichedAutomaton& p, const SpanningTree& t) {
    const std::size_t m = p.dim() / 2;
    for (auto e : t.non_tree_arcs()) {
        const auto& l = p.label(e);
        if (!coset_intersection_witness(slice(l.tail, 0, m), p.base().first, slice(l.tail, m, m), p.base().second))
            return false;
    }
    return true;
}

// Replace each double label by a common witness; base becomes L1 ∩ L2.
inline EnrichedAutomaton equalize(const DoublyEnrichedAutomaton& p, const SpanningTree& t) {
    const std::size_t m = p.dim() / 2;
    std::vector<LabelPair> labels(p.skeleton().arc_count(), zero_labels(m));
    for (std::size_t e = 0; e < labels.size(); ++e) {
        const auto& l = p.label(e);
        if (!is_zero(l.head) || (t.contains_arc(e) && !is_zero(l.tail)))
            throw std::invalid_argument("equalize: automaton is not normalized");
        if (t.contains_arc(e)) continue;
        auto c = coset_intersection_witness(slice(l.tail, 0, m), p.base().first, slice(l.tail, m, m), p.base().second);
        if (!c) throw std::invalid_argument("equalize: automaton is not equalizable");
        labels[e].tail = *c;
    }
    return {p.skeleton(), std::move(labels), intersect(p.base().first, p.base().second)};
}

// Everything needed to build intersection automata for a fixed pair of inputs.
class IntersectionProblem {
public:
    IntersectionProblem(const EnrichedAutomaton& e1, const EnrichedAutomaton& e2, TreePolicy policy = {})
        : policy_(std::move(policy)),
          e1_(canonical_form(e1, policy_)),
          e2_(canonical_form(e2, policy_)),
          product_(doubly_enriched_product(e1_, e2_, policy_)),
          tree_(make_tree(product_.skeleton(), policy_)),
          report_(intersection_report(e1_, e2_, product_, tree_, policy_)) {}

    const IntersectionReport& report() const { return report_; }
    const DoublyEnrichedAutomaton& product() const { return product_; }
    const SpanningTree& product_tree() const { return tree_; }
    const EnrichedAutomaton& first() const { return e1_; }
    const EnrichedAutomaton& second() const { return e2_; }
    const TreePolicy& policy() const { return policy_; }

private:
    TreePolicy policy_;
    EnrichedAutomaton e1_, e2_;
    DoublyEnrichedAutomaton product_;
    SpanningTree tree_;
    IntersectionReport report_;
};

// Finite case: a canonical automaton for H1 ∩ H2.
inline EnrichedAutomaton intersect_fg(const IntersectionProblem& prob) {
    const auto& rep = prob.report();
    if (rep.verdict != Verdict::finitely_generated)
        throw std::invalid_argument("intersect_fg: the intersection is not finitely generated");
    const auto& policy = prob.policy();
    if (rep.trivial_projection)
        return {Automaton::point(prob.first().skeleton().alphabet()), {}, rep.base_intersection};
    auto delta = cayley_for(rep);
    auto x = reduce(vertex_expand(delta.automaton, prob.product(), prob.product_tree()),
                    policy.order_for(prob.first().skeleton().alphabet()));
    auto tx = make_tree(x.skeleton(), policy);
    return canonical_form(equalize(normalize(x, tx), tx), policy);
}

inline EnrichedAutomaton intersect_fg(const EnrichedAutomaton& e1, const EnrichedAutomaton& e2,
                                      const TreePolicy& policy = {}) {
    return intersect_fg(IntersectionProblem(e1, e2, policy));
}

struct StreamStep {
    std::size_t radius = 0;
    EnrichedAutomaton automaton;   // recognizes a subgroup of H1 ∩ H2
    SpanningTree tree;
    std::vector<GroupElement> basis;  // free part; petals ordered by arc id
    bool complete = false;            // the ball already covers the whole Cayley graph
};

// Equalized vertex expansions of growing balls. Trees grow monotonically, so basis(n) ⊆ basis(n+1).
class IntersectionStream {
public:
    explicit IntersectionStream(IntersectionProblem prob) : prob_(std::move(prob)) {}

    const IntersectionReport& report() const { return prob_.report(); }

    StreamStep at_radius(std::size_t n) const {
        const auto& rep = prob_.report();
        auto delta = cayley_for(rep, n);
        auto dtree = spanning_tree_by_order(delta.automaton, default_order(delta.automaton.alphabet()));
        auto x = vertex_expand(delta.automaton, prob_.product(), prob_.product_tree());
        auto tx = expansion_tree(delta.automaton, dtree, x, prob_.product_tree());
        StreamStep step;
        step.radius = n;
        step.automaton = equalize(normalize(x, tx), tx);
        step.tree = tx;
        step.basis = basis(step.automaton, tx).free_part;
        step.complete = delta.complete;
        return step;
    }

private:
    IntersectionProblem prob_;
};

}  // namespace fta
