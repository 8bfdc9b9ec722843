#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace fta;
using namespace fta::testing;

namespace {

const AmbientGroup F2Z{2, AbelianSpec::free(1)};
const AmbientGroup F2Z2{2, AbelianSpec::free(2)};

GroupElement E(const AmbientGroup& g, std::string_view s) { return parse_element(s, g); }

std::vector<GroupElement> Es(const AmbientGroup& g, std::initializer_list<std::string_view> xs) {
    std::vector<GroupElement> out;
    for (auto s : xs) out.push_back(E(g, s));
    return out;
}

Vec V(std::initializer_list<long long> xs) { return make_vec(xs); }

// A random closed walk at the basepoint: a random walk out, then back along a spanning tree.
std::vector<Step> random_closed_walk(const Automaton& a, Rng& rng, std::size_t steps) {
    auto out = a.outgoing();
    auto tree = spanning_tree_first_seen(a);
    std::vector<Step> walk;
    std::size_t v = a.basepoint();
    for (std::size_t k = 0; k < steps; ++k) {
        if (out[v].empty()) break;
        Step s = out[v][uniform(rng, 0, static_cast<long long>(out[v].size()) - 1)];
        walk.push_back(s);
        v = a.target(s);
    }
    while (v != a.basepoint()) {
        Step p = *tree.parent_step(v);
        walk.push_back({p.arc, !p.backward});
        v = a.origin(p);
    }
    return walk;
}

GroupElement walk_element(const EnrichedAutomaton& e, const std::vector<Step>& walk) {
    std::vector<Letter> ls;
    for (auto s : walk) ls.push_back(e.skeleton().letter(s));
    return {Word(ls), canonicalize(walk_reading(e, walk), e.base().spec())};
}

std::vector<GroupElement> random_gens(Rng& rng, const AmbientGroup& g, std::size_t count) {
    std::vector<GroupElement> gens;
    for (std::size_t i = 0; i < count; ++i) gens.push_back(random_element(rng, g, 0, 4, 3));
    return gens;
}

}  // namespace

TEST(Elements, ParseFormatMultiply) {
    auto g = E(F2Z2, "x1^3 t^(1,0)");
    EXPECT_EQ(g.word, parse_word("x1^3", 2));
    EXPECT_EQ(g.vec, V({1, 0}));
    EXPECT_EQ(format_element(g), "x1^3 t^(1,0)");
    EXPECT_EQ(format_element(identity_element(F2Z2)), "1");
    EXPECT_EQ(format_element(E(F2Z2, "t^(0,6)")), "t^(0,6)");
    EXPECT_THROW(E(F2Z2, "t^(1)"), WordParseError);
    auto p = multiply(F2Z2, g, inverse(F2Z2, g));
    EXPECT_EQ(p, identity_element(F2Z2));
    AmbientGroup tor{1, AbelianSpec(0, {6})};
    EXPECT_EQ(E(tor, "x1 t^(8)").vec, V({2}));
}

TEST(Flower, Examples) {
    auto f = enriched_flower(F2Z, Es(F2Z, {"x1 t^(1)", "x2"}));
    EXPECT_EQ(f.skeleton().vertex_count(), 1u);
    ASSERT_EQ(f.skeleton().arc_count(), 2u);
    EXPECT_EQ(f.label(0).tail, V({1}));
    EXPECT_EQ(f.label(1).tail, V({0}));
    EXPECT_TRUE(f.base().is_trivial());

    auto ab = enriched_flower(F2Z2, Es(F2Z2, {"t^(0,6)"}));
    EXPECT_EQ(ab.skeleton(), Automaton::point(2));
    EXPECT_EQ(ab.base(), subgroup_from_generators(AbelianSpec::free(2), {V({0, 6})}));

    auto none = enriched_flower(F2Z, {});
    EXPECT_EQ(none.skeleton(), Automaton::point(2));
    EXPECT_TRUE(none.base().is_trivial());
    EXPECT_THROW(enriched_flower(F2Z, {GroupElement{Word(), V({1, 2})}}), DimensionError);
}

TEST(Transformations, Examples) {
    auto f = enriched_flower(F2Z, Es(F2Z, {"x1 t^(2)"}));
    EXPECT_EQ(vertex_transformation(f, 0, V({0})), f);
    auto a = arc_transformation(f, 0, V({5}));
    EXPECT_EQ(a.label(0).head, V({5}));
    EXPECT_EQ(a.label(0).tail, V({7}));
    EXPECT_TRUE(member(canonical_form(a), E(F2Z, "x1 t^(2)")));
    EXPECT_EQ(canonical_form(a), canonical_form(f));

    auto petal = enriched_flower(F2Z, Es(F2Z, {"x1 x2 t^(3)"}));
    auto moved = vertex_transformation(petal, 1, V({4}));
    EXPECT_EQ(moved.label(0).tail, V({4}));
    EXPECT_EQ(moved.label(1).head, V({4}));
    EXPECT_TRUE(member(canonical_form(moved), E(F2Z, "x1 x2 t^(3)")));
    EXPECT_THROW(vertex_transformation(petal, 9, V({1})), std::out_of_range);
    EXPECT_THROW(arc_transformation(petal, 9, V({1})), std::out_of_range);
}

TEST(Transformations, PreserveWalkReadings) {
    Rng rng(31);
    for (int it = 0; it < 100; ++it) {
        auto f = enriched_flower(F2Z2, random_gens(rng, F2Z2, uniform(rng, 1, 4)));
        const auto& sk = f.skeleton();
        auto t = f;
        for (int k = 0; k < 5; ++k) {
            if (uniform(rng, 0, 1))
                t = vertex_transformation(t, uniform(rng, 0, sk.vertex_count() - 1), random_vec(rng, 2, -5, 5));
            else if (sk.arc_count())
                t = arc_transformation(t, uniform(rng, 0, sk.arc_count() - 1), random_vec(rng, 2, -5, 5));
        }
        for (int k = 0; k < 10; ++k) {
            auto walk = random_closed_walk(sk, rng, 6);
            EXPECT_EQ(walk_reading(f, walk), walk_reading(t, walk));
        }
    }
}

TEST(Folds, ClosedFoldExample) {
    auto f = enriched_flower(F2Z2, Es(F2Z2, {"x1 t^(1,0)", "x1 t^(0,1)"}));
    auto c = closed_fold(f, 0, 1);
    EXPECT_EQ(c.skeleton().arc_count(), 1u);
    EXPECT_EQ(c.base(), subgroup_from_generators(AbelianSpec::free(2), {V({1, -1})}));
    auto same = closed_fold(enriched_flower(F2Z2, Es(F2Z2, {"x1 t^(1,0)", "x1 t^(1,0)"})), 0, 1);
    EXPECT_TRUE(same.base().is_trivial());
    EXPECT_THROW(open_fold(f, 0, 1), std::invalid_argument);
}

TEST(Folds, OpenFoldExample) {
    auto f = enriched_flower(F2Z, Es(F2Z, {"x1 x2", "x1 x2^-1 t^(3)"}));
    // arcs 0 and 2 are both x1-arcs leaving the basepoint
    auto o = open_fold(f, 0, 2);
    EXPECT_EQ(o.skeleton().vertex_count(), 2u);
    EXPECT_EQ(o.skeleton().arc_count(), 3u);
    auto cf = canonical_form(o);
    EXPECT_TRUE(member(cf, E(F2Z, "x1 x2")));
    EXPECT_TRUE(member(cf, E(F2Z, "x1 x2^-1 t^(3)")));
    EXPECT_EQ(cf, canonical_form(f));
    // labels already equal: a plain identification
    auto plain = enriched_flower(F2Z, Es(F2Z, {"x1 x2", "x1 x2^-1"}));
    auto p = open_fold(plain, 0, 2);
    for (const auto& l : p.labels()) EXPECT_TRUE(is_zero(l.head) && is_zero(l.tail));
}

TEST(Folds, PreserveRecognizedElements) {
    Rng rng(32);
    for (int it = 0; it < 150; ++it) {
        auto f = enriched_flower(F2Z2, random_gens(rng, F2Z2, uniform(rng, 2, 4)));
        std::vector<GroupElement> sample;
        for (int k = 0; k < 8; ++k) sample.push_back(walk_element(f, random_closed_walk(f.skeleton(), rng, 6)));
        // apply one fold, whichever kind is available
        auto outs = f.skeleton().outgoing();
        std::optional<EnrichedAutomaton> g;
        for (std::size_t v = 0; v < outs.size() && !g; ++v)
            for (std::size_t i = 0; i < outs[v].size() && !g; ++i)
                for (std::size_t j = i + 1; j < outs[v].size() && !g; ++j) {
                    Step a = outs[v][i], b = outs[v][j];
                    if (a.backward || b.backward || f.skeleton().letter(a) != f.skeleton().letter(b)) continue;
                    if (f.skeleton().target(a) == f.skeleton().target(b)) g = closed_fold(f, a.arc, b.arc);
                    else g = open_fold(f, a.arc, b.arc);
                }
        if (!g) continue;
        auto cf = canonical_form(*g);
        EXPECT_EQ(cf, canonical_form(f));
        for (const auto& s : sample) EXPECT_TRUE(member(cf, s)) << format_element(s);
    }
}

TEST(Reduce, ClosedFoldCase) {
    auto f = enriched_flower(F2Z2, Es(F2Z2, {"x1 t^(1,0)", "x1 t^(0,1)"}));
    auto r = reduce(f);
    EXPECT_EQ(r.skeleton().arc_count(), 1u);
    auto l = subgroup_from_generators(AbelianSpec::free(2), {V({1, -1})});
    EXPECT_EQ(r.base(), l);
    auto n = normalize(r, spanning_tree_by_order(r.skeleton(), default_order(2)));
    EXPECT_EQ(n.label(0).tail, l.reduce(V({1, 0})));
    EXPECT_TRUE(is_zero(n.label(0).head));
    EXPECT_EQ(normalize(n, spanning_tree_by_order(n.skeleton(), default_order(2))), n);
}

TEST(Normalize, Shape) {
    Rng rng(33);
    for (int it = 0; it < 100; ++it) {
        auto e = stallings(F2Z2, random_gens(rng, F2Z2, uniform(rng, 1, 4)));
        auto t = tree_of(e);
        for (std::size_t i = 0; i < e.skeleton().arc_count(); ++i) {
            EXPECT_TRUE(is_zero(e.label(i).head));
            if (t.contains_arc(i)) EXPECT_TRUE(is_zero(e.label(i).tail));
            else EXPECT_EQ(e.base().reduce(e.label(i).tail), e.label(i).tail);
        }
        EXPECT_EQ(normalize(e, t), e);
        EXPECT_EQ(e.skeleton(), stallings(2, [&] {
                      std::vector<Word> ws;
                      for (const auto& g : basis(e, t).free_part) ws.push_back(g.word);
                      return ws;
                  }()));
    }
}

TEST(Stallings, Examples) {
    auto h = stallings(F2Z, Es(F2Z, {"x1 t^(1)", "x2"}));
    EXPECT_EQ(h.skeleton().vertex_count(), 1u);
    ASSERT_EQ(h.skeleton().arc_count(), 2u);
    EXPECT_EQ(h.label(0).tail, V({1}));
    EXPECT_EQ(h.label(1).tail, V({0}));
    EXPECT_EQ(stallings(F2Z, {}), enriched_flower(F2Z, {}));
    // a redundant presentation of the same subgroup
    auto h2 = stallings(F2Z, Es(F2Z, {"x2^-1", "x1 t^(1)", "x1 x2 x1^-1", "x1 x2 t^(1)"}));
    EXPECT_EQ(h, h2);
}

TEST(Stallings, CaseOneFirstSubgroup) {
    auto h1 = stallings(F2Z2, Es(F2Z2, {"x1^3 t^(1,0)", "x2 x1", "x2^3 x1 x2^-2", "t^(0,6)"}));
    auto plain = stallings(2, {parse_word("x1^3", 2), parse_word("x2 x1", 2), parse_word("x2^3 x1 x2^-2", 2)});
    EXPECT_EQ(h1.skeleton(), plain);
    EXPECT_EQ(h1.base(), subgroup_from_generators(AbelianSpec::free(2), {V({0, 6})}));
    for (auto s : {"x1^3 t^(1,0)", "x2 x1", "x2^3 x1 x2^-2", "t^(0,6)", "x1^3 t^(1,6)"}) EXPECT_TRUE(member(h1, E(F2Z2, s)));
    EXPECT_FALSE(member(h1, E(F2Z2, "x1^3")));
    EXPECT_FALSE(member(h1, E(F2Z2, "t^(0,3)")));
}

TEST(Stallings, CanonicalUnderPresentationChanges) {
    Rng rng(34);
    for (int it = 0; it < 150; ++it) {
        AmbientGroup g{static_cast<std::size_t>(uniform(rng, 1, 2)),
                       uniform(rng, 0, 2) == 0 ? AbelianSpec(1, {4}) : AbelianSpec::free(uniform(rng, 1, 2))};
        auto gens = random_gens(rng, g, uniform(rng, 1, 4));
        auto more = gens;
        for (int k = 0; k < 3; ++k) {
            auto a = gens[uniform(rng, 0, gens.size() - 1)], b = gens[uniform(rng, 0, gens.size() - 1)];
            more.push_back(multiply(g, a, uniform(rng, 0, 1) ? b : inverse(g, b)));
        }
        for (auto& x : more)
            if (uniform(rng, 0, 1)) x = inverse(g, x);
        std::shuffle(more.begin(), more.end(), rng);
        EXPECT_EQ(stallings(g, gens), stallings(g, more));
    }
}

TEST(Completion, Examples) {
    auto h = stallings(F2Z, Es(F2Z, {"x1 t^(1)", "x2"}));
    auto c = completion(h, parse_word("x1", 2));
    ASSERT_TRUE(c);
    EXPECT_EQ(c->offset, V({1}));
    EXPECT_TRUE(c->subgroup.is_trivial());
    EXPECT_EQ(completion(h, parse_word("x1 x2 x1^-1", 2))->offset, V({0}));
    auto small = stallings(F2Z, Es(F2Z, {"x1"}));
    EXPECT_FALSE(completion(small, parse_word("x2", 2)));
}

TEST(Member, Examples) {
    auto h = stallings(F2Z, Es(F2Z, {"x1 t^(1)", "x2"}));
    EXPECT_TRUE(member(h, E(F2Z, "x1 t^(1)")));
    EXPECT_FALSE(member(h, E(F2Z, "x1")));
    auto h2 = stallings(F2Z, Es(F2Z, {"x1", "x2"}));
    EXPECT_TRUE(member(h, E(F2Z, "x1 x2 x1^-1")));
    EXPECT_TRUE(member(h2, E(F2Z, "x1 x2 x1^-1")));
}

TEST(Member, AgreesWithProductEnumeration) {
    Rng rng(35);
    for (int it = 0; it < 40; ++it) {
        AmbientGroup g{2, uniform(rng, 0, 1) ? AbelianSpec::free(1) : AbelianSpec(0, {3})};
        auto gens = random_gens(rng, g, uniform(rng, 1, 3));
        auto h = stallings(g, gens);
        auto reach = products_up_to(g, gens, 5);
        for (const auto& [w, v] : reach) EXPECT_TRUE(member(h, {w, v})) << format_element({w, v});
        // elements found by membership lie among products once the search is wide enough
        for (const auto& w : all_words(2, 2))
            for (long long a = -2; a <= 2; ++a) {
                GroupElement x = make_element(g, w, V({a}));
                if (!member(h, x)) { EXPECT_FALSE(reach.count({x.word, x.vec})) << format_element(x); }
            }
    }
}

TEST(Basis, Examples) {
    auto h = stallings(F2Z, Es(F2Z, {"x1 t^(1)", "x2"}));
    auto b = basis(h, tree_of(h));
    EXPECT_EQ(b.free_part, Es(F2Z, {"x1 t^(1)", "x2"}));
    EXPECT_TRUE(b.abelian_part.is_trivial());
    EXPECT_EQ(b.rank(), 2u);

    auto pt = stallings(F2Z2, Es(F2Z2, {"t^(0,6)"}));
    auto bp = basis(pt, tree_of(pt));
    EXPECT_TRUE(bp.free_part.empty());
    EXPECT_EQ(bp.abelian_part, subgroup_from_generators(AbelianSpec::free(2), {V({0, 6})}));
}

TEST(Basis, RegeneratesSubgroup) {
    Rng rng(36);
    for (int it = 0; it < 100; ++it) {
        auto gens = random_gens(rng, F2Z2, uniform(rng, 1, 4));
        auto h = stallings(F2Z2, gens);
        auto b = basis(h, tree_of(h));
        auto again = b.free_part;
        for (const auto& r : b.abelian_part.generators()) again.push_back({Word(), r});
        EXPECT_EQ(stallings(F2Z2, again), h);
        for (const auto& x : b.free_part) EXPECT_TRUE(member(h, x));
    }
}

TEST(Basis, AbelianPartIsIntersectionWithA) {
    Rng rng(37);
    for (int it = 0; it < 30; ++it) {
        auto h = stallings(F2Z2, random_gens(rng, F2Z2, uniform(rng, 1, 4)));
        auto b = basis(h, tree_of(h));
        for (long long x = -6; x <= 6; ++x)
            for (long long y = -6; y <= 6; ++y)
                EXPECT_EQ(b.abelian_part.contains(V({x, y})), member(h, {Word(), V({x, y})}));
    }
}

TEST(Index, Examples) {
    auto whole = stallings(F2Z, Es(F2Z, {"x1", "x2", "t^(1)"}));
    auto r = index_report(whole);
    EXPECT_EQ(r.total, Index(Int(1)));
    EXPECT_EQ(transversal_stream(whole, 10).size(), 1u);

    auto h = stallings(F2Z, Es(F2Z, {"x1^2", "x2", "x1 x2 x1^-1", "t^(2)"}));
    auto ri = index_report(h);
    EXPECT_EQ(ri.free_index, Index(Int(2)));
    EXPECT_EQ(ri.abelian_index, Index(Int(2)));
    EXPECT_EQ(ri.total, Index(Int(4)));
    EXPECT_EQ(transversal_stream(h, 10), Es(F2Z, {"1", "x1", "t^(1)", "x1 t^(1)"}));

    auto inf = index_report(stallings(F2Z, Es(F2Z, {"x1 t^(1)", "x2"})));
    EXPECT_EQ(inf.free_index, Index(Int(1)));
    EXPECT_FALSE(inf.abelian_index.finite());
    EXPECT_FALSE(inf.total.finite());
}

TEST(Index, TransversalIsRightTransversal) {
    Rng rng(38);
    int checked = 0;
    for (int it = 0; it < 400 && checked < 30; ++it) {
        AmbientGroup g{2, AbelianSpec(1, {2})};
        auto gens = random_gens(rng, g, uniform(rng, 3, 6));
        auto h = stallings(g, gens);
        auto rep = index_report(h);
        if (!rep.total.finite() || rep.total.value() > 60) continue;
        ++checked;
        auto tr = transversal_stream(h, 200);
        ASSERT_EQ(Int(tr.size()), rep.total.value());
        for (std::size_t i = 0; i < tr.size(); ++i)
            for (std::size_t j = 0; j < i; ++j) EXPECT_FALSE(member(h, multiply(g, tr[i], inverse(g, tr[j]))));
    }
    EXPECT_GT(checked, 5);
}

TEST(FactorExtension, Examples) {
    auto sat = stallings(F2Z, Es(F2Z, {"x1", "x2", "t^(3)"}));
    EXPECT_EQ(finite_index_factor_extension(sat), sat);

    AmbientGroup f2{2, AbelianSpec::free(0)};
    auto sq = stallings(f2, Es(f2, {"x1^2"}));
    auto ext = finite_index_factor_extension(sq);
    EXPECT_TRUE(is_saturated(ext.skeleton()));
    EXPECT_EQ(ext.skeleton().vertex_count(), 2u);
    EXPECT_EQ(index_report(ext).total, Index(Int(2)));

    auto xt = stallings(F2Z, Es(F2Z, {"x1 t^(1)"}));
    auto e2 = finite_index_factor_extension(xt);
    EXPECT_TRUE(index_report(e2).total.finite());
    EXPECT_EQ(e2.base(), AbelianSubgroup::whole(AbelianSpec::free(1)));
    EXPECT_TRUE(member(e2, E(F2Z, "x1 t^(1)")));
}

TEST(FactorExtension, ContainsOriginalWithFiniteIndex) {
    Rng rng(39);
    for (int it = 0; it < 60; ++it) {
        auto gens = random_gens(rng, F2Z2, uniform(rng, 1, 3));
        auto h = stallings(F2Z2, gens);
        auto k = finite_index_factor_extension(h);
        EXPECT_TRUE(index_report(k).total.finite());
        for (const auto& x : gens) EXPECT_TRUE(member(k, x));
        // a factor never has larger rank than the whole
        EXPECT_LE(basis(h, tree_of(h)).rank(), basis(k, tree_of(k)).rank());
    }
}

TEST(Dot, Labels) {
    auto h = stallings(F2Z, Es(F2Z, {"x1 t^(1)", "t^(4)"}));
    auto dot = to_dot(h);
    EXPECT_NE(dot.find("[(0)|x1|(1)]"), std::string::npos);
    EXPECT_NE(dot.find("L = <(4)>"), std::string::npos);
}
