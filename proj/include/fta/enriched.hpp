#pragma once

#include "labeled.hpp"

namespace fta {

// The ambient group F_n x A.
struct AmbientGroup {
    std::size_t n = 0;
    AbelianSpec spec;
    std::size_t m() const { return spec.dim(); }
    friend bool operator==(const AmbientGroup&, const AmbientGroup&) = default;
};

// Normal form w * t^a.
struct GroupElement {
    Word word;
    Vec vec;
    friend bool operator==(const GroupElement&, const GroupElement&) = default;
};

inline GroupElement make_element(const AmbientGroup& g, Word w, Vec a) {
    require_alphabet(w, g.n);
    return {std::move(w), canonicalize(std::move(a), g.spec)};
}

inline GroupElement identity_element(const AmbientGroup& g) { return {Word(), zero_vec(g.m())}; }

inline GroupElement multiply(const AmbientGroup& g, const GroupElement& x, const GroupElement& y) {
    return make_element(g, x.word * y.word, x.vec + y.vec);
}

inline GroupElement inverse(const AmbientGroup& g, const GroupElement& x) {
    return make_element(g, x.word.inverse(), -x.vec);
}

inline std::string format_vec(const Vec& v) { return to_string(v); }

inline std::string format_element(const GroupElement& e) {
    const bool trivial_vec = is_zero(e.vec);
    if (e.word.empty() && trivial_vec) return "1";
    std::string s = e.word.empty() ? "" : format_word(e.word);
    if (!trivial_vec) s += (s.empty() ? "" : " ") + std::string("t^") + format_vec(e.vec);
    return s;
}

namespace detail {

inline Vec parse_vector(Cursor& c, std::size_t m) {
    std::size_t col = c.column();
    if (c.peek() != '(') c.fail("expected '(' after t^");
    ++c.pos;
    Vec v;
    c.skip_ws();
    if (c.peek() != ')') {
        for (;;) {
            c.skip_ws();
            v.emplace_back(c.integer(true));
            c.skip_ws();
            if (c.peek() == ',') {
                ++c.pos;
                continue;
            }
            break;
        }
    }
    if (c.peek() != ')') c.fail("expected ',' or ')' in vector");
    ++c.pos;
    if (v.size() != m)
        throw WordParseError("vector has " + std::to_string(v.size()) + " coordinates, expected " + std::to_string(m),
                             col);
    return v;
}

}  // namespace detail

// e.g. "x1 x2^-1 t^(3,0)"; identity "1"
inline GroupElement parse_element(std::string_view text, const AmbientGroup& g, std::size_t base_column = 1) {
    detail::Cursor c{text, 0, base_column};
    std::vector<Letter> letters;
    Vec vec = zero_vec(g.m());
    bool any = false;
    while (!c.done()) {
        any = true;
        char ch = c.peek();
        if (ch == '1') {
            ++c.pos;
        } else if (ch == 't') {
            ++c.pos;
            if (c.peek() != '^') c.fail("expected '^' after t");
            ++c.pos;
            vec = vec + detail::parse_vector(c, g.m());
        } else {
            detail::parse_letter_token(c, g.n, letters);
        }
    }
    if (!any) c.fail("empty element");
    return make_element(g, Word(letters), vec);
}

using EnrichedAutomaton = LabeledAutomaton<AbelianSubgroup>;

inline EnrichedAutomaton enriched_flower(const AmbientGroup& g, const std::vector<GroupElement>& gens) {
    std::vector<Word> words;
    std::vector<Vec> abelian;
    std::vector<Vec> petal_vecs;
    for (const auto& x : gens) {
        require_dim(x.vec, g.m(), "generator");
        require_alphabet(x.word, g.n);
        if (x.word.empty()) {
            if (!is_zero(canonicalize(x.vec, g.spec))) abelian.push_back(x.vec);
            continue;
        }
        words.push_back(x.word);
        petal_vecs.push_back(x.vec);
    }
    Automaton sk = flower(g.n, words);
    std::vector<LabelPair> labels(sk.arc_count(), zero_labels(g.m()));
    std::size_t arc = 0;
    for (std::size_t i = 0; i < words.size(); ++i) {
        arc += words[i].size();
        // vector on the tail of the last half-edge of the petal
        auto& last = labels[arc - 1];
        (words[i].letters().back().inverse() ? last.head : last.tail) = petal_vecs[i];
    }
    return {sk, std::move(labels), AbelianSubgroup(g.spec, abelian)};
}

inline AmbientGroup ambient_of(const EnrichedAutomaton& e) {
    return {e.skeleton().alphabet(), e.base().spec()};
}

// Reduce, then normalize against the tree chosen by the policy.
inline EnrichedAutomaton canonical_form(const EnrichedAutomaton& e, const TreePolicy& policy = {}) {
    auto r = reduce(e, policy.order_for(e.skeleton().alphabet()));
    return normalize(r, make_tree(r.skeleton(), policy));
}

inline EnrichedAutomaton stallings(const AmbientGroup& g, const std::vector<GroupElement>& gens,
                                   const TreePolicy& policy = {}) {
    return canonical_form(enriched_flower(g, gens), policy);
}

inline SpanningTree tree_of(const EnrichedAutomaton& e, const TreePolicy& policy = {}) {
    return make_tree(e.skeleton(), policy);
}

struct Completion {
    Vec offset;
    AbelianSubgroup subgroup;
};

// The coset {a : w t^a in H}, or nothing when w is not in the projection.
inline std::optional<Completion> completion(const EnrichedAutomaton& e, const Word& w) {
    auto walk = recognizes(e.skeleton(), w);
    if (!walk) return std::nullopt;
    return Completion{e.base().reduce(walk_reading(e, *walk)), e.base()};
}

inline bool member(const EnrichedAutomaton& e, const GroupElement& g) {
    auto c = completion(e, g.word);
    return c && c->subgroup.contains(g.vec - c->offset);
}

struct SubgroupBasis {
    std::vector<GroupElement> free_part;
    AbelianSubgroup abelian_part;
    std::size_t rank() const { return free_part.size() + abelian_part.rank(); }
};

// Sum of readings along the tree path from the basepoint to each vertex.
template <class Base>
std::vector<Vec> tree_potentials(const LabeledAutomaton<Base>& e, const SpanningTree& t) {
    std::vector<Vec> pot(e.skeleton().vertex_count(), zero_vec(e.dim()));
    for (auto v : t.vertex_order())
        if (auto s = t.parent_step(v)) pot[v] = pot[e.skeleton().origin(*s)] + reading(e, *s);
    return pot;
}

inline SubgroupBasis basis(const EnrichedAutomaton& e, const SpanningTree& t) {
    const auto& sk = e.skeleton();
    auto words = t_basis(sk, t);
    auto pot = tree_potentials(e, t);
    SubgroupBasis b{{}, e.base()};
    for (std::size_t i = 0; i < words.size(); ++i) {
        std::size_t arc = t.non_tree_arcs()[i];
        Vec v = pot[sk.arc(arc).from] + reading(e, Step{arc, false}) - pot[sk.arc(arc).to];
        b.free_part.push_back({words[i], e.base().reduce(v)});
    }
    return b;
}

struct IndexReport {
    Index free_index;
    Index abelian_index;
    Index total;
};

inline IndexReport index_report(const EnrichedAutomaton& e) {
    Index free_idx = is_saturated(e.skeleton()) ? Index(Int(e.skeleton().vertex_count())) : Index::infinite();
    Index ab = e.base().index();
    return {free_idx, ab, free_idx * ab};
}

// Right coset representatives v t^c, graded by |v| + |c|_1, ties by abelian then free position.
inline std::vector<GroupElement> transversal_stream(const EnrichedAutomaton& e, std::size_t budget,
                                                    const LetterOrder& order) {
    auto free_reps = schreier_transversal(e.skeleton(), budget, order);
    auto ab_reps = transversal(e.base(), budget);
    struct Key {
        Int grade;
        std::size_t j, i;
    };
    std::vector<Key> keys;
    for (std::size_t i = 0; i < free_reps.size(); ++i)
        for (std::size_t j = 0; j < ab_reps.size(); ++j) {
            Int norm = Int(free_reps[i].size());
            for (const auto& x : ab_reps[j]) norm += abs(x);
            keys.push_back({norm, j, i});
        }
    std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
        return std::tie(a.grade, a.j, a.i) < std::tie(b.grade, b.j, b.i);
    });
    if (keys.size() > budget) keys.resize(budget);
    std::vector<GroupElement> out;
    for (const auto& k : keys) out.push_back({free_reps[k.i], canonicalize(ab_reps[k.j], e.base().spec())});
    return out;
}

inline std::vector<GroupElement> transversal_stream(const EnrichedAutomaton& e, std::size_t budget) {
    return transversal_stream(e, budget, default_order(e.skeleton().alphabet()));
}

// Saturate the skeleton with zero-labelled arcs and complete the base to finite index.
inline EnrichedAutomaton finite_index_factor_extension(const EnrichedAutomaton& e, const TreePolicy& policy = {}) {
    const auto& sk = e.skeleton();
    const std::size_t V = sk.vertex_count();
    std::vector<Arc> arcs = sk.arcs();
    std::vector<LabelPair> labels = e.labels();
    for (std::size_t x = 0; x < sk.alphabet(); ++x) {
        std::vector<char> has_out(V, 0), has_in(V, 0);
        for (const auto& a : sk.arcs())
            if (a.gen == x) has_out[a.from] = has_in[a.to] = 1;
        std::vector<std::size_t> sources, sinks;
        for (std::size_t v = 0; v < V; ++v) {
            if (!has_out[v]) sources.push_back(v);
            if (!has_in[v]) sinks.push_back(v);
        }
        for (std::size_t k = 0; k < sources.size(); ++k) {
            arcs.push_back({sources[k], x, sinks[k]});
            labels.push_back(zero_labels(e.dim()));
        }
    }
    EnrichedAutomaton ext(Automaton(sk.alphabet(), V, sk.basepoint(), std::move(arcs)), std::move(labels),
                          finite_index_completion(e.base()));
    return canonical_form(ext, policy);
}

inline std::string to_dot(const EnrichedAutomaton& e, const std::string& name = "E") {
    std::ostringstream os;
    const auto& sk = e.skeleton();
    os << "digraph " << name << " {\n  rankdir=LR;\n  node [shape=circle];\n";
    std::string lat;
    for (const auto& r : e.base().lattice_basis().row_list()) lat += (lat.empty() ? "" : ",") + format_vec(r);
    for (std::size_t v = 0; v < sk.vertex_count(); ++v) {
        os << "  " << v;
        if (v == sk.basepoint()) os << " [shape=doublecircle, xlabel=\"L = <" << lat << ">\"]";
        os << ";\n";
    }
    for (std::size_t i = 0; i < sk.arc_count(); ++i) {
        const auto& a = sk.arc(i);
        os << "  " << a.from << " -> " << a.to << " [label=\"[" << format_vec(e.label(i).head) << "|x" << a.gen + 1
           << "|" << format_vec(e.label(i).tail) << "]\"];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace fta
