#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fta {

// expression templates off: plain value semantics
using Int = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>, boost::multiprecision::et_off>;
using Vec = std::vector<Int>;

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline void require_dim(const Vec& v, std::size_t m, const char* what) {
    if (v.size() != m)
        throw DimensionError(std::string(what) + ": expected length " + std::to_string(m) +
                             ", got " + std::to_string(v.size()));
}

// floor division / modulo (cpp_int truncates toward zero)
inline Int floor_div(const Int& a, const Int& b) {
    Int q = a / b;
    Int r = a - q * b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

inline Int floor_mod(const Int& a, const Int& b) { return a - floor_div(a, b) * b; }

inline Vec zero_vec(std::size_t m) { return Vec(m, Int(0)); }

inline bool is_zero(const Vec& v) {
    return std::all_of(v.begin(), v.end(), [](const Int& x) { return x == 0; });
}

inline Vec operator+(Vec a, const Vec& b) {
    require_dim(b, a.size(), "vector sum");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

inline Vec operator-(Vec a, const Vec& b) {
    require_dim(b, a.size(), "vector difference");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}

inline Vec operator-(Vec a) {
    for (auto& x : a) x = -x;
    return a;
}

inline Vec scaled(Vec a, const Int& k) {
    for (auto& x : a) x *= k;
    return a;
}

inline void axpy(Vec& y, const Int& k, const Vec& x) {
    if (k == 0) return;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += k * x[i];
}

inline Vec concat(const Vec& a, const Vec& b) {
    Vec out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

inline Vec slice(const Vec& a, std::size_t from, std::size_t len) {
    return Vec(a.begin() + static_cast<std::ptrdiff_t>(from),
               a.begin() + static_cast<std::ptrdiff_t>(from + len));
}

inline Vec make_vec(std::initializer_list<long long> xs) {
    Vec v;
    for (auto x : xs) v.emplace_back(x);
    return v;
}

inline std::string to_string(const Vec& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += v[i].str();
    }
    return s + ")";
}

// Dense integer matrix. Stores the column count so that 0-row matrices keep their shape.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows, zero_vec(cols)) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.rows_[i][i] = 1;
        return m;
    }

    static Matrix from_rows(std::size_t cols, std::vector<Vec> rows) {
        Matrix m(0, cols);
        for (auto& r : rows) m.append_row(std::move(r));
        return m;
    }

    static Matrix from(std::size_t cols, std::initializer_list<std::initializer_list<long long>> rows) {
        Matrix m(0, cols);
        for (auto r : rows) m.append_row(make_vec(r));
        return m;
    }

    std::size_t rows() const { return rows_.size(); }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_.empty(); }

    Int& operator()(std::size_t i, std::size_t j) { return rows_[i][j]; }
    const Int& operator()(std::size_t i, std::size_t j) const { return rows_[i][j]; }
    Vec& row(std::size_t i) { return rows_[i]; }
    const Vec& row(std::size_t i) const { return rows_[i]; }
    const std::vector<Vec>& row_list() const { return rows_; }

    void append_row(Vec r) {
        require_dim(r, cols_, "matrix row");
        rows_.push_back(std::move(r));
    }

    void truncate_rows(std::size_t n) { rows_.resize(std::min(n, rows_.size())); }

    void swap_rows(std::size_t a, std::size_t b) { std::swap(rows_[a], rows_[b]); }
    void swap_cols(std::size_t a, std::size_t b) {
        for (auto& r : rows_) std::swap(r[a], r[b]);
    }
    // row a += k * row b
    void add_row(std::size_t a, std::size_t b, const Int& k) { axpy(rows_[a], k, Vec(rows_[b])); }
    // col a += k * col b
    void add_col(std::size_t a, std::size_t b, const Int& k) {
        if (k == 0) return;
        for (auto& r : rows_) r[a] += k * r[b];
    }
    void negate_row(std::size_t a) {
        for (auto& x : rows_[a]) x = -x;
    }
    void negate_col(std::size_t a) {
        for (auto& r : rows_) r[a] = -r[a];
    }

    Matrix transposed() const {
        Matrix t(cols_, rows());
        for (std::size_t i = 0; i < rows(); ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = rows_[i][j];
        return t;
    }

    bool is_zero() const {
        return std::all_of(rows_.begin(), rows_.end(), [](const Vec& r) { return fta::is_zero(r); });
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.cols_ == b.cols_ && a.rows_ == b.rows_;
    }

private:
    std::size_t cols_ = 0;
    std::vector<Vec> rows_;
};

// row vector times matrix
inline Vec operator*(const Vec& v, const Matrix& m) {
    require_dim(v, m.rows(), "vector-matrix product");
    Vec out = zero_vec(m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) axpy(out, v[i], m.row(i));
    return out;
}

inline Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("matrix product: inner dimensions differ");
    Matrix out(0, b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) out.append_row(a.row(i) * b);
    return out;
}

inline Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("matrix difference: shapes differ");
    Matrix out(0, a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) out.append_row(a.row(i) - b.row(i));
    return out;
}

inline Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("matrix sum: shapes differ");
    Matrix out(0, a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) out.append_row(a.row(i) + b.row(i));
    return out;
}

// stack rows of b under rows of a
inline Matrix vstack(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw DimensionError("vstack: column counts differ");
    Matrix out = a;
    for (const auto& r : b.row_list()) out.append_row(r);
    return out;
}

// Bareiss fraction-free determinant.
inline Int determinant(const Matrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("determinant of a non-square matrix");
    const std::size_t n = m.rows();
    if (n == 0) return 1;
    Matrix a = m;
    Int sign = 1, prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && a(p, k) == 0) ++p;
            if (p == n) return 0;
            a.swap_rows(k, p);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

inline std::ostream& operator<<(std::ostream& os, const Matrix& m) {
    os << "(";
    for (std::size_t i = 0; i < m.rows(); ++i) os << (i ? "," : "") << to_string(m.row(i));
    return os << ")";
}

}  // namespace fta
