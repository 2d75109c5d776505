#pragma once

// Dense complex matrices sized for Frobenius-manifold computations:
// dimensions stay small (a few dozen rows at most after block flattening),
// so everything is a plain row-major std::vector with no expression
// templates.  Entry access via operator()(i, j) is 0-based; the few helpers
// that mirror textbook index conventions (elementary(), block extraction in
// block_matrix.hpp) take 1-based indices and say so.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dubrovin {

using Complex = std::complex<double>;

class CMatrix {
public:
    CMatrix() = default;

    CMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), e_(static_cast<std::size_t>(rows) * cols) {
        if (rows <= 0 || cols <= 0)
            throw std::invalid_argument("CMatrix: dimensions must be positive");
    }

    static CMatrix zero(int rows, int cols) { return CMatrix(rows, cols); }

    static CMatrix identity(int n) {
        CMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    Complex& operator()(int i, int j) { return e_[idx(i, j)]; }
    const Complex& operator()(int i, int j) const { return e_[idx(i, j)]; }

    CMatrix& operator+=(const CMatrix& o) {
        require_same_shape(o, "+=");
        for (std::size_t k = 0; k < e_.size(); ++k) e_[k] += o.e_[k];
        return *this;
    }

    CMatrix& operator-=(const CMatrix& o) {
        require_same_shape(o, "-=");
        for (std::size_t k = 0; k < e_.size(); ++k) e_[k] -= o.e_[k];
        return *this;
    }

    CMatrix& operator*=(Complex s) {
        for (auto& v : e_) v *= s;
        return *this;
    }

    friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
    friend CMatrix operator*(CMatrix a, Complex s) { return a *= s; }
    friend CMatrix operator*(Complex s, CMatrix a) { return a *= s; }

    friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
        if (a.cols_ != b.rows_)
            throw std::invalid_argument("CMatrix: inner dimensions mismatch in product");
        CMatrix r(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                const Complex aik = a(i, k);
                if (aik == 0.0) continue;
                for (int j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
            }
        return r;
    }

    CMatrix transpose() const {
        CMatrix r(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    // Gauss-Jordan with partial pivoting; fine at these sizes.
    CMatrix inverse() const {
        if (!is_square())
            throw std::invalid_argument("CMatrix: inverse of non-square matrix");
        const int n = rows_;
        CMatrix a(*this), r = identity(n);
        for (int col = 0; col < n; ++col) {
            int piv = col;
            double best = std::abs(a(col, col));
            for (int i = col + 1; i < n; ++i) {
                const double v = std::abs(a(i, col));
                if (v > best) { best = v; piv = i; }
            }
            if (best == 0.0)
                throw std::runtime_error("CMatrix: singular matrix in inverse()");
            if (piv != col) { a.swap_rows(piv, col); r.swap_rows(piv, col); }
            const Complex d = a(col, col);
            for (int j = 0; j < n; ++j) { a(col, j) /= d; r(col, j) /= d; }
            for (int i = 0; i < n; ++i) {
                if (i == col) continue;
                const Complex f = a(i, col);
                if (f == 0.0) continue;
                for (int j = 0; j < n; ++j) {
                    a(i, j) -= f * a(col, j);
                    r(i, j) -= f * r(col, j);
                }
            }
        }
        return r;
    }

    // max-entry norm; every tolerance in this library is stated against it
    double max_norm() const {
        double m = 0.0;
        for (const auto& v : e_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    std::size_t idx(int i, int j) const {
        if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
            throw std::out_of_range("CMatrix: index (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ") out of range for " +
                                    std::to_string(rows_) + "x" + std::to_string(cols_));
        return static_cast<std::size_t>(i) * cols_ + j;
    }

    void swap_rows(int i, int j) {
        for (int c = 0; c < cols_; ++c) std::swap((*this)(i, c), (*this)(j, c));
    }

    void require_same_shape(const CMatrix& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument(std::string("CMatrix: shape mismatch in ") + op);
    }

    int rows_ = 0, cols_ = 0;
    std::vector<Complex> e_;
};

// Unit matrix E^i_j (1 in row i, column j, both 1-based), the building block
// of every closed-form expression in projective_space.hpp.
inline CMatrix elementary(int i, int j, int dim) {
    if (i < 1 || i > dim || j < 1 || j > dim)
        throw std::invalid_argument("elementary: indices are 1-based and must lie in [1, dim]");
    CMatrix m(dim, dim);
    m(i - 1, j - 1) = 1.0;
    return m;
}

// J X^T J with J the antidiagonal permutation: transpose across the
// antidiagonal.  Maps a right-multiplication solution to the matrix acting on
// basis-reversed column vectors.
inline CMatrix anti_transpose(const CMatrix& x) {
    if (!x.is_square())
        throw std::invalid_argument("anti_transpose: square matrices only");
    const int n = x.rows();
    CMatrix r(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r(i, j) = x(n - 1 - j, n - 1 - i);
    return r;
}

// J X J: reverse the basis order on both sides (no transpose).
inline CMatrix reverse_basis(const CMatrix& x) {
    if (!x.is_square())
        throw std::invalid_argument("reverse_basis: square matrices only");
    const int n = x.rows();
    CMatrix r(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r(i, j) = x(n - 1 - i, n - 1 - j);
    return r;
}

inline double max_diff(const CMatrix& a, const CMatrix& b) { return (a - b).max_norm(); }

}  // namespace dubrovin
