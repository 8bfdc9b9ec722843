#pragma once

#include "linalg.hpp"

#include <functional>
#include <map>
#include <set>

namespace fta {

// ---------------------------------------------------------------- HNF / SNF

struct HnfResult {
    Matrix h;                       // canonical HNF, zero rows removed
    Matrix transform;               // unimodular U with U * M = [h; 0]
    std::vector<std::size_t> pivots;  // pivot column of each row of h
};

namespace detail {

inline std::optional<std::size_t> min_abs_row(const Matrix& a, std::size_t from, std::size_t col) {
    std::optional<std::size_t> best;
    for (std::size_t i = from; i < a.rows(); ++i) {
        if (a(i, col) == 0) continue;
        if (!best || abs(a(i, col)) < abs(a(*best, col))) best = i;
    }
    return best;
}

}  // namespace detail

inline HnfResult hnf_with_transform(const Matrix& m) {
    Matrix a = m;
    Matrix u = Matrix::identity(m.rows());
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
        bool found = false;
        for (;;) {
            auto p = detail::min_abs_row(a, r, c);
            if (!p) break;
            found = true;
            a.swap_rows(r, *p);
            u.swap_rows(r, *p);
            bool clean = true;
            for (std::size_t i = r + 1; i < a.rows(); ++i) {
                if (a(i, c) == 0) continue;
                Int q = floor_div(a(i, c), a(r, c));
                a.add_row(i, r, -q);
                u.add_row(i, r, -q);
                if (a(i, c) != 0) clean = false;
            }
            if (clean) break;
        }
        if (!found) continue;
        if (a(r, c) < 0) {
            a.negate_row(r);
            u.negate_row(r);
        }
        for (std::size_t i = 0; i < r; ++i) {
            Int q = floor_div(a(i, c), a(r, c));
            a.add_row(i, r, -q);
            u.add_row(i, r, -q);
        }
        pivots.push_back(c);
        ++r;
    }
    Matrix h = a;
    h.truncate_rows(r);
    return {std::move(h), std::move(u), std::move(pivots)};
}

inline Matrix hnf(const Matrix& m) { return hnf_with_transform(m).h; }

inline std::vector<std::size_t> hnf_pivots(const Matrix& h) {
    std::vector<std::size_t> p;
    for (const auto& row : h.row_list()) {
        std::size_t j = 0;
        while (j < row.size() && row[j] == 0) ++j;
        p.push_back(j);
    }
    return p;
}

// Reduce v column by column against an HNF basis (floor division at each pivot).
inline Vec reduce_by_hnf(Vec v, const Matrix& h) {
    require_dim(v, h.cols(), "reduction");
    std::size_t j = 0;
    for (std::size_t i = 0; i < h.rows(); ++i) {
        const Vec& row = h.row(i);
        while (row[j] == 0) ++j;
        Int q = floor_div(v[j], row[j]);
        axpy(v, -q, row);
    }
    return v;
}

// Coefficients x with x * h = v, if v lies in the row lattice of h.
inline std::optional<Vec> coordinates_in_hnf(Vec v, const Matrix& h) {
    require_dim(v, h.cols(), "coordinates");
    Vec x = zero_vec(h.rows());
    std::size_t j = 0;
    for (std::size_t i = 0; i < h.rows(); ++i) {
        const Vec& row = h.row(i);
        while (row[j] == 0) ++j;
        for (std::size_t k = 0; k < j; ++k)
            if (v[k] != 0) return std::nullopt;
        if (v[j] % row[j] != 0) return std::nullopt;
        x[i] = v[j] / row[j];
        axpy(v, -x[i], row);
    }
    if (!is_zero(v)) return std::nullopt;
    return x;
}

struct SnfDecomposition {
    std::size_t s = 0;   // number of nonzero invariant factors
    Vec deltas;          // length = column count; zeros after the first s
    Matrix p, q, smith;  // p * M * q = smith
};

inline SnfDecomposition snf(const Matrix& m) {
    const std::size_t k = m.rows(), r = m.cols();
    Matrix a = m, p = Matrix::identity(k), q = Matrix::identity(r);
    std::size_t t = 0;
    while (t < k && t < r) {
        // smallest |entry| in the trailing block, first in row-major order
        std::optional<std::pair<std::size_t, std::size_t>> piv;
        for (std::size_t i = t; i < k; ++i)
            for (std::size_t j = t; j < r; ++j)
                if (a(i, j) != 0 && (!piv || abs(a(i, j)) < abs(a(piv->first, piv->second)))) piv = {i, j};
        if (!piv) break;
        a.swap_rows(t, piv->first);
        p.swap_rows(t, piv->first);
        a.swap_cols(t, piv->second);
        q.swap_cols(t, piv->second);

        bool clear = true;
        for (std::size_t i = t + 1; i < k; ++i) {
            if (a(i, t) == 0) continue;
            Int c = a(i, t) / a(t, t);
            a.add_row(i, t, -c);
            p.add_row(i, t, -c);
            if (a(i, t) != 0) clear = false;
        }
        for (std::size_t j = t + 1; j < r; ++j) {
            if (a(t, j) == 0) continue;
            Int c = a(t, j) / a(t, t);
            a.add_col(j, t, -c);
            q.add_col(j, t, -c);
            if (a(t, j) != 0) clear = false;
        }
        if (!clear) continue;  // a smaller remainder now exists; pick again

        std::optional<std::size_t> bad_row;
        for (std::size_t i = t + 1; i < k && !bad_row; ++i)
            for (std::size_t j = t + 1; j < r; ++j)
                if (a(i, j) % a(t, t) != 0) {
                    bad_row = i;
                    break;
                }
        if (bad_row) {
            a.add_row(t, *bad_row, 1);
            p.add_row(t, *bad_row, 1);
            continue;
        }
        if (a(t, t) < 0) {
            a.negate_row(t);
            p.negate_row(t);
        }
        ++t;
    }
    SnfDecomposition d;
    d.s = t;
    d.deltas = zero_vec(r);
    for (std::size_t i = 0; i < t; ++i) d.deltas[i] = a(i, i);
    d.p = std::move(p);
    d.q = std::move(q);
    d.smith = std::move(a);
    return d;
}

// Inverse of a unimodular matrix (HNF of a unimodular matrix is the identity).
inline Matrix unimodular_inverse(const Matrix& m) {
    auto res = hnf_with_transform(m);
    if (res.h != Matrix::identity(m.rows())) throw std::invalid_argument("matrix is not unimodular");
    return res.transform;
}

// ---------------------------------------------------------------- indices

// A group index: finite positive integer or infinity.
class Index {
public:
    Index() = default;  // infinite
    explicit Index(Int v) : value_(std::move(v)) {}
    static Index infinite() { return Index(); }

    bool finite() const { return value_.has_value(); }
    const Int& value() const { return *value_; }
    std::string str() const { return finite() ? value_->str() : "inf"; }

    friend Index operator*(const Index& a, const Index& b) {
        if (!a.finite() || !b.finite()) return infinite();
        return Index(a.value() * b.value());
    }
    friend bool operator==(const Index& a, const Index& b) { return a.value_ == b.value_; }

private:
    std::optional<Int> value_;
};

// ---------------------------------------------------------------- abelian groups

struct AbelianSpec {
    std::size_t m_free = 0;
    std::vector<Int> torsion;

    AbelianSpec() = default;
    AbelianSpec(std::size_t free_rank, std::vector<Int> ds) : m_free(free_rank), torsion(std::move(ds)) {
        for (std::size_t i = 0; i < torsion.size(); ++i) {
            if (torsion[i] < 2) throw std::invalid_argument("torsion coefficient below 2");
            if (i + 1 < torsion.size() && torsion[i + 1] % torsion[i] != 0)
                throw std::invalid_argument("torsion coefficients must form a divisibility chain");
        }
    }
    static AbelianSpec free(std::size_t m) { return AbelianSpec(m, {}); }

    std::size_t dim() const { return m_free + torsion.size(); }

    // relation lattice R
    Matrix relations() const {
        Matrix r(0, dim());
        for (std::size_t i = 0; i < torsion.size(); ++i) {
            Vec row = zero_vec(dim());
            row[m_free + i] = torsion[i];
            r.append_row(std::move(row));
        }
        return r;
    }

    friend bool operator==(const AbelianSpec&, const AbelianSpec&) = default;
};

inline Vec canonicalize(Vec a, const AbelianSpec& spec) {
    require_dim(a, spec.dim(), "abelian element");
    for (std::size_t i = 0; i < spec.torsion.size(); ++i)
        a[spec.m_free + i] = floor_mod(a[spec.m_free + i], spec.torsion[i]);
    return a;
}

// Subgroup of A, stored as the canonical HNF of its lift to Z^m (which contains R).
class AbelianSubgroup {
public:
    AbelianSubgroup() = default;
    explicit AbelianSubgroup(AbelianSpec spec) : AbelianSubgroup(spec, {}) {}

    AbelianSubgroup(AbelianSpec spec, const std::vector<Vec>& gens) : spec_(std::move(spec)) {
        Matrix m = spec_.relations();
        for (const auto& g : gens) {
            require_dim(g, spec_.dim(), "subgroup generator");
            m.append_row(g);
        }
        basis_ = hnf(m);
    }

    static AbelianSubgroup from_lattice(AbelianSpec spec, const Matrix& lattice) {
        return AbelianSubgroup(std::move(spec), lattice.row_list());
    }
    static AbelianSubgroup whole(const AbelianSpec& spec) {
        return from_lattice(spec, Matrix::identity(spec.dim()));
    }

    const AbelianSpec& spec() const { return spec_; }
    std::size_t dim() const { return spec_.dim(); }
    const Matrix& lattice_basis() const { return basis_; }

    Vec reduce(const Vec& a) const {
        require_dim(a, dim(), "abelian element");
        return reduce_by_hnf(a, basis_);
    }
    bool contains(const Vec& a) const { return is_zero(reduce(a)); }

    bool is_trivial() const { return basis_ == hnf(spec_.relations()); }

    Index index() const {
        if (basis_.rows() < dim()) return Index::infinite();
        Int prod = 1;
        for (std::size_t i = 0; i < basis_.rows(); ++i) prod *= basis_(i, i);
        return Index(prod);
    }

    // A minimal generating set of L, with the order of each generator (0 = infinite).
    std::vector<std::pair<Vec, Int>> invariant_generators() const {
        const std::size_t k = basis_.rows();
        Matrix coeff(0, k);
        const Matrix rel = spec_.relations();
        for (const auto& r : rel.row_list()) coeff.append_row(*coordinates_in_hnf(r, basis_));
        auto d = snf(coeff);
        Matrix gens = unimodular_inverse(d.q) * basis_;
        std::vector<std::pair<Vec, Int>> out;
        for (std::size_t i = 0; i < k; ++i) {
            Int order = i < d.s ? d.deltas[i] : Int(0);
            if (order == 1) continue;
            out.emplace_back(canonicalize(gens.row(i), spec_), order);
        }
        return out;
    }

    std::size_t rank() const { return invariant_generators().size(); }

    std::vector<Vec> generators() const {
        std::vector<Vec> g;
        for (auto& [v, ord] : invariant_generators()) g.push_back(v);
        return g;
    }

    friend bool operator==(const AbelianSubgroup& a, const AbelianSubgroup& b) {
        return a.spec_ == b.spec_ && a.basis_ == b.basis_;
    }

private:
    AbelianSpec spec_;
    Matrix basis_;
};

inline void require_same_spec(const AbelianSubgroup& a, const AbelianSubgroup& b) {
    if (!(a.spec() == b.spec())) throw DimensionError("subgroups live in different abelian groups");
}

inline AbelianSubgroup subgroup_from_generators(const AbelianSpec& spec, const std::vector<Vec>& gens) {
    return AbelianSubgroup(spec, gens);
}

inline AbelianSubgroup sum(const AbelianSubgroup& a, const AbelianSubgroup& b) {
    require_same_spec(a, b);
    return AbelianSubgroup::from_lattice(a.spec(), vstack(a.lattice_basis(), b.lattice_basis()));
}

inline AbelianSubgroup with_generator(const AbelianSubgroup& a, const Vec& g) {
    Matrix m = a.lattice_basis();
    m.append_row(g);
    return AbelianSubgroup::from_lattice(a.spec(), m);
}

namespace detail {

// HNF of the rows (b | b) for b in B1 and (b' | 0) for b' in B2.
inline HnfResult stacked_pair(const AbelianSubgroup& l1, const AbelianSubgroup& l2) {
    const std::size_t m = l1.dim();
    Matrix st(0, 2 * m);
    for (const auto& b : l1.lattice_basis().row_list()) st.append_row(concat(b, b));
    for (const auto& b : l2.lattice_basis().row_list()) st.append_row(concat(b, zero_vec(m)));
    return hnf_with_transform(st);
}

}  // namespace detail

inline AbelianSubgroup intersect(const AbelianSubgroup& a, const AbelianSubgroup& b) {
    require_same_spec(a, b);
    const std::size_t m = a.dim();
    auto res = detail::stacked_pair(a, b);
    Matrix tail(0, m);
    for (std::size_t i = 0; i < res.h.rows(); ++i)
        if (res.pivots[i] >= m) tail.append_row(slice(res.h.row(i), m, m));
    return AbelianSubgroup::from_lattice(a.spec(), tail);
}

// Some c in (a + L1) ∩ (b + L2), canonical modulo L1 ∩ L2.
inline std::optional<Vec> coset_intersection_witness(const Vec& a, const AbelianSubgroup& l1, const Vec& b,
                                                     const AbelianSubgroup& l2) {
    require_same_spec(l1, l2);
    const std::size_t m = l1.dim();
    require_dim(a, m, "witness");
    require_dim(b, m, "witness");
    auto res = detail::stacked_pair(l1, l2);
    // find x1*B1 + x2*B2 = b - a; the second half of the combination is l1 = x1*B1
    Vec v = reduce_by_hnf(concat(b - a, zero_vec(m)), res.h);
    if (!is_zero(slice(v, 0, m))) return std::nullopt;
    Vec c = a - slice(v, m, m);
    return intersect(l1, l2).reduce(canonicalize(c, l1.spec()));
}

// {v in Z^r : v * D in L}, as a canonical HNF basis.
inline Matrix preimage_under_matrix(const AbelianSubgroup& l, const Matrix& d) {
    const std::size_t m = l.dim(), r = d.rows();
    if (d.cols() != m) throw DimensionError("preimage: matrix column count differs from subgroup dimension");
    Matrix st(0, m + r);
    for (std::size_t i = 0; i < r; ++i) {
        Vec e = zero_vec(r);
        e[i] = 1;
        st.append_row(concat(d.row(i), e));
    }
    for (const auto& row : l.lattice_basis().row_list()) st.append_row(concat(row, zero_vec(r)));
    auto res = hnf_with_transform(st);
    Matrix out(0, r);
    for (std::size_t i = 0; i < res.h.rows(); ++i)
        if (res.pivots[i] >= m) out.append_row(slice(res.h.row(i), m, r));
    return out;
}

inline Index lattice_index(const Matrix& h) {
    if (h.rows() < h.cols()) return Index::infinite();
    Int prod = 1;
    for (std::size_t i = 0; i < h.rows(); ++i) prod *= abs(h(i, i));
    return Index(prod);
}

inline Index index(const AbelianSubgroup& l) { return l.index(); }

// Total order on integers used for transversal tie-breaks: 0, 1, -1, 2, -2, ...
inline Int signed_rank(const Int& x) { return x > 0 ? 2 * x - 1 : -2 * x; }

inline bool graded_less(const Vec& a, const Vec& b) {
    Int na = 0, nb = 0;
    for (const auto& x : a) na += abs(x);
    for (const auto& x : b) nb += abs(x);
    if (na != nb) return na < nb;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return signed_rank(a[i]) < signed_rank(b[i]);
    return false;
}

namespace detail {

// All canonical elements of A with coordinate norm exactly `norm`, in graded order.
inline std::vector<Vec> sphere(const AbelianSpec& spec, const Int& norm) {
    std::vector<Vec> out;
    Vec cur = zero_vec(spec.dim());
    std::function<void(std::size_t, Int)> rec = [&](std::size_t i, Int left) {
        if (i == spec.dim()) {
            if (left == 0) out.push_back(cur);
            return;
        }
        if (i >= spec.m_free) {
            const Int& d = spec.torsion[i - spec.m_free];
            for (Int x = 0; x < d && x <= left; ++x) {
                cur[i] = x;
                rec(i + 1, left - x);
            }
        } else {
            for (Int k = 0; k <= 2 * left; ++k) {
                Int x = k % 2 == 1 ? (k + 1) / 2 : -(k / 2);
                if (abs(x) > left) break;
                cur[i] = x;
                rec(i + 1, left - abs(x));
            }
        }
        cur[i] = 0;
    };
    rec(0, norm);
    std::sort(out.begin(), out.end(), graded_less);
    return out;
}

inline Int max_norm(const AbelianSpec& spec) {
    Int n = 0;
    for (const auto& d : spec.torsion) n += d - 1;
    return n;
}

}  // namespace detail

// Coset representatives of L in A in graded order; stops after `budget` elements
// or once a finite index is exhausted.
inline std::vector<Vec> transversal(const AbelianSubgroup& l, std::size_t budget) {
    std::vector<Vec> out;
    std::set<Vec> seen;
    const Index idx = l.index();
    const Int bound = detail::max_norm(l.spec());
    for (Int norm = 0; out.size() < budget; ++norm) {
        if (idx.finite() && Int(out.size()) == idx.value()) break;
        if (l.spec().m_free == 0 && norm > bound) break;
        for (auto& v : detail::sphere(l.spec(), norm)) {
            if (out.size() >= budget) break;
            if (seen.insert(l.reduce(v)).second) out.push_back(v);
        }
    }
    return out;
}

// L' >= L with L a direct summand of L' and [A : L'] finite.
inline AbelianSubgroup finite_index_completion(const AbelianSubgroup& l) {
    const Matrix& b = l.lattice_basis();
    const std::size_t k = b.rows(), m = l.dim();
    if (k == m) return l;
    auto d = snf(b);
    Matrix qinv = unimodular_inverse(d.q);
    Matrix ext = b;
    for (std::size_t i = k; i < m; ++i) ext.append_row(qinv.row(i));
    return AbelianSubgroup::from_lattice(l.spec(), ext);
}

}  // namespace fta
