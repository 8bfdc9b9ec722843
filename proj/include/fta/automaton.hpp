#pragma once

#include "linalg.hpp"
#include "word.hpp"

#include <deque>
#include <map>
#include <optional>
#include <sstream>
#include <tuple>

namespace fta {

struct Arc {
    std::size_t from = 0;
    std::size_t gen = 0;
    std::size_t to = 0;
    friend bool operator==(const Arc&, const Arc&) = default;
    friend auto operator<=>(const Arc&, const Arc&) = default;
};

// A half-edge: a positive arc, possibly crossed backwards.
struct Step {
    std::size_t arc = 0;
    bool backward = false;
    friend bool operator==(const Step&, const Step&) = default;
};

// Pointed involutive automaton; only positive arcs are stored.
class Automaton {
public:
    Automaton() : Automaton(0, 1, 0, {}) {}
    Automaton(std::size_t alphabet, std::size_t vertices, std::size_t basepoint, std::vector<Arc> arcs)
        : alphabet_(alphabet), vertices_(vertices), basepoint_(basepoint), arcs_(std::move(arcs)) {
        if (basepoint_ >= vertices_) throw std::invalid_argument("basepoint out of range");
        for (const auto& a : arcs_) {
            if (a.from >= vertices_ || a.to >= vertices_) throw std::invalid_argument("arc endpoint out of range");
            if (a.gen >= alphabet_) throw std::out_of_range("arc letter outside alphabet");
        }
    }
    static Automaton point(std::size_t alphabet) { return Automaton(alphabet, 1, 0, {}); }

    std::size_t alphabet() const { return alphabet_; }
    std::size_t vertex_count() const { return vertices_; }
    std::size_t arc_count() const { return arcs_.size(); }
    std::size_t basepoint() const { return basepoint_; }
    const std::vector<Arc>& arcs() const { return arcs_; }
    const Arc& arc(std::size_t i) const { return arcs_.at(i); }

    std::size_t origin(Step s) const { return s.backward ? arcs_[s.arc].to : arcs_[s.arc].from; }
    std::size_t target(Step s) const { return s.backward ? arcs_[s.arc].from : arcs_[s.arc].to; }
    Letter letter(Step s) const { return Letter(arcs_[s.arc].gen, s.backward); }

    // Half-edges leaving each vertex, sorted by (letter code, arc id).
    std::vector<std::vector<Step>> outgoing() const {
        std::vector<std::vector<Step>> out(vertices_);
        for (std::size_t i = 0; i < arcs_.size(); ++i) {
            out[arcs_[i].from].push_back({i, false});
            out[arcs_[i].to].push_back({i, true});
        }
        for (auto& v : out)
            std::stable_sort(v.begin(), v.end(), [&](Step a, Step b) {
                return std::make_pair(letter(a).code(), a.arc) < std::make_pair(letter(b).code(), b.arc);
            });
        return out;
    }

    bool is_deterministic() const {
        std::vector<char> seen(vertices_ * 2 * alphabet_, 0);
        for (const auto& a : arcs_) {
            auto& f = seen[a.from * 2 * alphabet_ + 2 * a.gen];
            auto& b = seen[a.to * 2 * alphabet_ + 2 * a.gen + 1];
            if (f || b) return false;
            f = b = 1;
        }
        return true;
    }

    friend bool operator==(const Automaton&, const Automaton&) = default;

private:
    std::size_t alphabet_;
    std::size_t vertices_;
    std::size_t basepoint_;
    std::vector<Arc> arcs_;
};

// Transition lookup for deterministic automata.
class Transitions {
public:
    explicit Transitions(const Automaton& a) : a_(&a), dirs_(2 * a.alphabet()), table_(a.vertex_count() * dirs_, -1) {
        for (std::size_t i = 0; i < a.arcs().size(); ++i) {
            const Arc& e = a.arc(i);
            set(e.from, 2 * e.gen, static_cast<long long>(2 * i));
            set(e.to, 2 * e.gen + 1, static_cast<long long>(2 * i + 1));
        }
    }
    std::optional<Step> next(std::size_t v, Letter l) const {
        if (l.gen() >= a_->alphabet()) return std::nullopt;
        long long x = table_[v * dirs_ + l.code()];
        if (x < 0) return std::nullopt;
        return Step{static_cast<std::size_t>(x / 2), x % 2 == 1};
    }
    std::size_t degree(std::size_t v) const {
        std::size_t d = 0;
        for (std::size_t c = 0; c < dirs_; ++c) d += table_[v * dirs_ + c] >= 0;
        return d;
    }

private:
    void set(std::size_t v, std::size_t dir, long long val) {
        auto& slot = table_[v * dirs_ + dir];
        if (slot >= 0) throw std::invalid_argument("automaton is not deterministic");
        slot = val;
    }
    const Automaton* a_;
    std::size_t dirs_;
    std::vector<long long> table_;
};

// Result of an operation that rebuilds an automaton from a subset of arcs.
struct ArcMap {
    Automaton automaton;
    std::vector<std::size_t> source_arc;  // new arc id -> old arc id
};

inline Automaton flower(std::size_t alphabet, const std::vector<Word>& words) {
    std::vector<Arc> arcs;
    std::size_t vertices = 1;
    for (const auto& w : words) {
        if (w.empty()) throw std::invalid_argument("flower: empty generator word");
        require_alphabet(w, alphabet);
        std::size_t prev = 0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            std::size_t next = i + 1 == w.size() ? 0 : vertices++;
            Letter l = w[i];
            arcs.push_back(l.inverse() ? Arc{next, l.gen(), prev} : Arc{prev, l.gen(), next});
            prev = next;
        }
    }
    return Automaton(alphabet, vertices, 0, std::move(arcs));
}

namespace detail {

inline ArcMap restrict_to(const Automaton& a, const std::vector<char>& keep_vertex,
                          const std::vector<std::size_t>& vertex_order) {
    std::vector<long long> renum(a.vertex_count(), -1);
    std::size_t next = 0;
    for (auto v : vertex_order)
        if (keep_vertex[v] && renum[v] < 0) renum[v] = static_cast<long long>(next++);
    std::vector<std::tuple<Arc, std::size_t>> kept;
    for (std::size_t i = 0; i < a.arcs().size(); ++i) {
        const Arc& e = a.arc(i);
        if (keep_vertex[e.from] && keep_vertex[e.to])
            kept.emplace_back(Arc{static_cast<std::size_t>(renum[e.from]), e.gen, static_cast<std::size_t>(renum[e.to])},
                              i);
    }
    std::stable_sort(kept.begin(), kept.end(), [](const auto& x, const auto& y) { return std::get<0>(x) < std::get<0>(y); });
    ArcMap out;
    std::vector<Arc> arcs;
    for (auto& [e, i] : kept) {
        arcs.push_back(e);
        out.source_arc.push_back(i);
    }
    out.automaton = Automaton(a.alphabet(), next, static_cast<std::size_t>(renum[a.basepoint()]), std::move(arcs));
    return out;
}

inline std::vector<std::size_t> identity_order(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

}  // namespace detail

// Basepoint component with hanging trees removed.
inline ArcMap core_map(const Automaton& a) {
    const std::size_t V = a.vertex_count();
    auto out = a.outgoing();
    std::vector<char> keep(V, 0);
    std::deque<std::size_t> q{a.basepoint()};
    keep[a.basepoint()] = 1;
    while (!q.empty()) {
        auto v = q.front();
        q.pop_front();
        for (auto s : out[v]) {
            auto w = a.target(s);
            if (!keep[w]) {
                keep[w] = 1;
                q.push_back(w);
            }
        }
    }
    std::vector<std::size_t> degree(V, 0);
    for (const auto& e : a.arcs())
        if (keep[e.from]) {
            ++degree[e.from];
            ++degree[e.to];
        }
    std::vector<std::size_t> stack;
    for (std::size_t v = 0; v < V; ++v)
        if (keep[v] && v != a.basepoint() && degree[v] <= 1) stack.push_back(v);
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        if (!keep[v]) continue;
        keep[v] = 0;
        for (auto s : out[v]) {
            auto w = a.target(s);
            if (!keep[w] || w == v) continue;
            if (--degree[w] <= 1 && w != a.basepoint()) stack.push_back(w);
        }
    }
    return detail::restrict_to(a, keep, detail::identity_order(V));
}

inline Automaton core(const Automaton& a) { return core_map(a).automaton; }

// Renumber vertices breadth-first from the basepoint under the letter order;
// unreachable vertices follow in their old order. Arcs end up sorted.
inline ArcMap canonical_map(const Automaton& a, const LetterOrder& order) {
    const std::size_t V = a.vertex_count();
    auto out = a.outgoing();
    for (auto& list : out)
        std::stable_sort(list.begin(), list.end(),
                         [&](Step x, Step y) { return order.rank(a.letter(x)) < order.rank(a.letter(y)); });
    std::vector<char> seen(V, 0);
    std::vector<std::size_t> vorder;
    auto bfs = [&](std::size_t root) {
        std::deque<std::size_t> q{root};
        seen[root] = 1;
        while (!q.empty()) {
            auto v = q.front();
            q.pop_front();
            vorder.push_back(v);
            for (auto s : out[v]) {
                auto w = a.target(s);
                if (!seen[w]) {
                    seen[w] = 1;
                    q.push_back(w);
                }
            }
        }
    };
    bfs(a.basepoint());
    for (std::size_t v = 0; v < V; ++v)
        if (!seen[v]) vorder.push_back(v);
    return detail::restrict_to(a, std::vector<char>(V, 1), vorder);
}

inline LetterOrder default_order(std::size_t n) { return LetterOrder(n); }

inline Automaton canonical(const Automaton& a, const LetterOrder& order) { return canonical_map(a, order).automaton; }
inline Automaton canonical(const Automaton& a) { return canonical(a, default_order(a.alphabet())); }

// ---------------------------------------------------------------- spanning trees

class SpanningTree {
public:
    SpanningTree() = default;
    SpanningTree(std::vector<std::optional<Step>> parent, std::vector<char> in_tree,
                 std::vector<std::size_t> vertex_order, std::vector<std::size_t> non_tree)
        : parent_(std::move(parent)), in_tree_(std::move(in_tree)), vertex_order_(std::move(vertex_order)),
          non_tree_(std::move(non_tree)) {}

    // step from the parent into v (absent at the basepoint)
    const std::optional<Step>& parent_step(std::size_t v) const { return parent_.at(v); }
    bool contains_arc(std::size_t arc) const { return in_tree_.at(arc) != 0; }
    // vertices, each after its parent
    const std::vector<std::size_t>& vertex_order() const { return vertex_order_; }
    // positive arcs outside the tree, in petal order
    const std::vector<std::size_t>& non_tree_arcs() const { return non_tree_; }
    std::size_t vertex_count() const { return parent_.size(); }

    std::vector<std::size_t> tree_arcs() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < in_tree_.size(); ++i)
            if (in_tree_[i]) out.push_back(i);
        return out;
    }

    friend bool operator==(const SpanningTree&, const SpanningTree&) = default;

private:
    std::vector<std::optional<Step>> parent_;
    std::vector<char> in_tree_;
    std::vector<std::size_t> vertex_order_;
    std::vector<std::size_t> non_tree_;
};

namespace detail {

// Grow a tree breadth-first, scanning the half-edges of each vertex in the given order.
inline SpanningTree grow_tree(const Automaton& a, const std::vector<std::vector<Step>>& scan) {
    const std::size_t V = a.vertex_count();
    std::vector<std::optional<Step>> parent(V);
    std::vector<char> in_tree(a.arc_count(), 0), seen(V, 0), classified(a.arc_count(), 0);
    std::vector<std::size_t> vorder, non_tree;
    std::deque<std::size_t> q{a.basepoint()};
    seen[a.basepoint()] = 1;
    while (!q.empty()) {
        auto u = q.front();
        q.pop_front();
        vorder.push_back(u);
        for (auto s : scan[u]) {
            if (classified[s.arc]) continue;
            classified[s.arc] = 1;
            auto w = a.target(s);
            if (!seen[w]) {
                seen[w] = 1;
                parent[w] = s;
                in_tree[s.arc] = 1;
                q.push_back(w);
            } else {
                non_tree.push_back(s.arc);
            }
        }
    }
    if (vorder.size() != V) throw std::invalid_argument("spanning tree: automaton is not connected");
    return SpanningTree(std::move(parent), std::move(in_tree), std::move(vorder), std::move(non_tree));
}

}  // namespace detail

// Oldest vertex first, smallest letter first.
inline SpanningTree spanning_tree_by_order(const Automaton& a, const LetterOrder& order) {
    auto scan = a.outgoing();
    for (auto& list : scan)
        std::stable_sort(list.begin(), list.end(),
                         [&](Step x, Step y) { return order.rank(a.letter(x)) < order.rank(a.letter(y)); });
    return detail::grow_tree(a, scan);
}

// Oldest vertex first, arcs in storage order.
inline SpanningTree spanning_tree_first_seen(const Automaton& a) {
    auto scan = a.outgoing();
    for (auto& list : scan)
        std::stable_sort(list.begin(), list.end(), [](Step x, Step y) { return x.arc < y.arc; });
    return detail::grow_tree(a, scan);
}

// Tree given by an explicit arc set; petals are ordered by arc id.
inline SpanningTree spanning_tree_from_arcs(const Automaton& a, const std::vector<std::size_t>& arcs) {
    const std::size_t V = a.vertex_count();
    std::vector<char> in_tree(a.arc_count(), 0);
    for (auto e : arcs) in_tree.at(e) = 1;
    std::vector<std::vector<Step>> adj(V);
    for (auto e : arcs) {
        adj[a.arc(e).from].push_back({e, false});
        adj[a.arc(e).to].push_back({e, true});
    }
    std::vector<std::optional<Step>> parent(V);
    std::vector<char> seen(V, 0);
    std::vector<std::size_t> vorder;
    std::deque<std::size_t> q{a.basepoint()};
    seen[a.basepoint()] = 1;
    while (!q.empty()) {
        auto u = q.front();
        q.pop_front();
        vorder.push_back(u);
        for (auto s : adj[u]) {
            auto w = a.target(s);
            if (seen[w]) {
                if (!(parent[u] && parent[u]->arc == s.arc)) throw std::invalid_argument("tree arcs contain a cycle");
                continue;
            }
            seen[w] = 1;
            parent[w] = s;
            q.push_back(w);
        }
    }
    if (vorder.size() != V || arcs.size() + 1 != V) throw std::invalid_argument("arc set does not span the automaton");
    std::vector<std::size_t> non_tree;
    for (std::size_t i = 0; i < a.arc_count(); ++i)
        if (!in_tree[i]) non_tree.push_back(i);
    return SpanningTree(std::move(parent), std::move(in_tree), std::move(vorder), std::move(non_tree));
}

enum class TreeRule { order, first_seen };

struct TreePolicy {
    std::optional<LetterOrder> order;  // default order when absent
    TreeRule rule = TreeRule::order;

    LetterOrder order_for(std::size_t n) const { return order ? *order : default_order(n); }
};

inline SpanningTree make_tree(const Automaton& a, const TreePolicy& policy) {
    if (policy.rule == TreeRule::first_seen) return spanning_tree_first_seen(a);
    return spanning_tree_by_order(a, policy.order_for(a.alphabet()));
}

// Label of the tree geodesic from the basepoint to each vertex.
inline std::vector<Word> tree_paths(const Automaton& a, const SpanningTree& t) {
    std::vector<Word> path(a.vertex_count());
    for (auto v : t.vertex_order())
        if (auto s = t.parent_step(v)) path[v] = path[a.origin(*s)] * Word({a.letter(*s)});
    return path;
}

inline std::vector<Word> t_basis(const Automaton& a, const SpanningTree& t) {
    auto path = tree_paths(a, t);
    std::vector<Word> out;
    for (auto e : t.non_tree_arcs()) {
        const Arc& arc = a.arc(e);
        out.push_back(path[arc.from] * Word::letter(arc.gen) * path[arc.to].inverse());
    }
    return out;
}

// The basepoint walk reading w, if any.
inline std::optional<std::vector<Step>> recognizes(const Automaton& a, const Word& w) {
    Transitions tr(a);
    std::vector<Step> walk;
    std::size_t v = a.basepoint();
    for (auto l : w.letters()) {
        auto s = tr.next(v, l);
        if (!s) return std::nullopt;
        walk.push_back(*s);
        v = a.target(*s);
    }
    if (v != a.basepoint()) return std::nullopt;
    return walk;
}

inline bool accepts(const Automaton& a, const Word& w) { return recognizes(a, w).has_value(); }

// Signed traversal count of each non-tree arc along the walk reading w.
inline Vec word_coordinates(const Automaton& a, const SpanningTree& t, const Word& w) {
    auto walk = recognizes(a, w);
    if (!walk) throw std::invalid_argument("word_coordinates: word not in the recognized subgroup");
    std::vector<long long> slot(a.arc_count(), -1);
    for (std::size_t i = 0; i < t.non_tree_arcs().size(); ++i) slot[t.non_tree_arcs()[i]] = static_cast<long long>(i);
    Vec out = zero_vec(t.non_tree_arcs().size());
    for (auto s : *walk)
        if (slot[s.arc] >= 0) out[static_cast<std::size_t>(slot[s.arc])] += s.backward ? -1 : 1;
    return out;
}

struct ProductMap {
    Automaton automaton;
    std::vector<std::pair<std::size_t, std::size_t>> source_arcs;  // arcs of the factors
};

// Full tensor product: vertex (v1, v2) is v1 * |V2| + v2.
inline ProductMap product_map(const Automaton& a1, const Automaton& a2) {
    if (a1.alphabet() != a2.alphabet()) throw std::invalid_argument("product: alphabets differ");
    const std::size_t V2 = a2.vertex_count();
    std::vector<Arc> arcs;
    ProductMap out;
    for (std::size_t i = 0; i < a1.arc_count(); ++i)
        for (std::size_t j = 0; j < a2.arc_count(); ++j) {
            const Arc &e = a1.arc(i), &f = a2.arc(j);
            if (e.gen != f.gen) continue;
            arcs.push_back({e.from * V2 + f.from, e.gen, e.to * V2 + f.to});
            out.source_arcs.emplace_back(i, j);
        }
    out.automaton = Automaton(a1.alphabet(), a1.vertex_count() * V2, a1.basepoint() * V2 + a2.basepoint(), std::move(arcs));
    return out;
}

inline Automaton product(const Automaton& a1, const Automaton& a2) { return product_map(a1, a2).automaton; }

inline bool is_saturated(const Automaton& a) {
    Transitions tr(a);
    for (std::size_t v = 0; v < a.vertex_count(); ++v)
        if (tr.degree(v) != 2 * a.alphabet()) return false;
    return true;
}

// Right coset representatives of the recognized subgroup, breadth-first through the
// Schreier graph (the automaton plus its hanging trees), shortest first.
inline std::vector<Word> schreier_transversal(const Automaton& a, std::size_t budget, const LetterOrder& order) {
    Transitions tr(a);
    struct Node {
        std::optional<std::size_t> vertex;  // absent: a vertex of a hanging tree
        Word word;
    };
    std::vector<Word> out;
    if (budget == 0) return out;
    std::vector<char> seen(a.vertex_count(), 0);
    std::deque<Node> q;
    q.push_back({a.basepoint(), Word()});
    seen[a.basepoint()] = 1;
    out.push_back(Word());
    const auto letters = order.letters();
    while (!q.empty() && out.size() < budget) {
        Node n = q.front();
        q.pop_front();
        for (auto l : letters) {
            if (out.size() >= budget) break;
            if (n.vertex) {
                if (auto s = tr.next(*n.vertex, l)) {
                    auto w = a.target(*s);
                    if (seen[w]) continue;
                    seen[w] = 1;
                    Word word = n.word * Word({l});
                    out.push_back(word);
                    q.push_back({w, word});
                    continue;
                }
            } else if (!n.word.empty() && n.word.letters().back() == l.inv()) {
                continue;
            }
            Word word = n.word * Word({l});
            out.push_back(word);
            q.push_back({std::nullopt, word});
        }
    }
    return out;
}

inline std::vector<Word> schreier_transversal(const Automaton& a, std::size_t budget) {
    return schreier_transversal(a, budget, default_order(a.alphabet()));
}

inline std::string to_dot(const Automaton& a, const std::string& name = "A") {
    std::ostringstream os;
    os << "digraph " << name << " {\n  rankdir=LR;\n  node [shape=circle];\n";
    for (std::size_t v = 0; v < a.vertex_count(); ++v)
        os << "  " << v << (v == a.basepoint() ? " [shape=doublecircle]" : "") << ";\n";
    for (const auto& e : a.arcs())
        os << "  " << e.from << " -> " << e.to << " [label=\"x" << e.gen + 1 << "\"];\n";
    os << "}\n";
    return os.str();
}

}  // namespace fta
