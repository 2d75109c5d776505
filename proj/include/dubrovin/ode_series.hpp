#pragma once

// Series solutions of B' = (A + sum_i e^{a_i t} C_i) B   (left systems) and
//                     B' = B (A + sum_i e^{a_i t} C_i)   (right systems),
// always normalized to B(0) = Id, via three substitutions:
//
//   * powers of (e^t - alpha), alpha = e^{t0}   (single term, a = 1):
//       three-term coefficient recursion, radius |e^{t - t0} - 1| < 1;
//   * the doubly indexed basis e^{kt} t^j / j!-free table (any finite set of
//       positive integer exponents, both sides): row recursion in j for each
//       k, entire in t at fixed truncation;
//   * a single finite block-operator exponential whose first block row
//       (resp. column) sums to the solution.
//
// The same table transposes to the big-quantum normalization B' = B(A + sum
// t^{n} C_n / n-ish) handled at the end of this header by plain power series
// plus a constant companion-matrix cross-check.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "block_matrix.hpp"
#include "complex_matrix.hpp"
#include "matrix_exp.hpp"

namespace dubrovin {

enum class Side { left, right };

struct ExpTerm {
    int exponent = 1;  // positive integer a in e^{a t}
    CMatrix coeff;
};

struct ExpOdeSystem {
    int dim = 0;
    CMatrix A;
    std::vector<ExpTerm> terms;
    Side side = Side::left;
};

inline void validate(const ExpOdeSystem& sys) {
    if (sys.dim <= 0) throw std::invalid_argument("ExpOdeSystem: dim must be positive");
    if (sys.A.rows() != sys.dim || sys.A.cols() != sys.dim)
        throw std::invalid_argument("ExpOdeSystem: A has wrong shape");
    for (const auto& tm : sys.terms) {
        if (tm.exponent < 1)
            throw std::invalid_argument("ExpOdeSystem: exponents must be positive integers");
        if (tm.coeff.rows() != sys.dim || tm.coeff.cols() != sys.dim)
            throw std::invalid_argument("ExpOdeSystem: term coefficient has wrong shape");
    }
}

class ConvergenceError : public std::runtime_error {
public:
    CMatrix partial;
    double tail;

    ConvergenceError(const std::string& what, CMatrix partial_result, double tail_norm)
        : std::runtime_error(what), partial(std::move(partial_result)), tail(tail_norm) {}
};

struct Evaluation {
    CMatrix value;
    double tail_norm = 0.0;  // norm of the last retained term, the truncation indicator
    bool in_domain = true;
};

// ---------------------------------------------------------------------------
// Substitution in powers of (e^t - alpha), alpha = e^{t0}

struct ExpShiftedSeries {
    Complex alpha{1.0, 0.0};
    Complex t0{0.0, 0.0};
    std::vector<CMatrix> coeffs;  // B(t) = sum_n coeffs[n] (e^t - alpha)^n
};

// Single-term a=1 left systems only: with x = e^t - alpha the ODE becomes
// (x + alpha) B_x = (A + C x + C alpha) B, whence
//   (n+1) alpha B_{n+1} = (A + alpha C - n) B_n + C B_{n-1}.
inline ExpShiftedSeries exp_shifted_series(const ExpOdeSystem& sys, Complex t0, int order) {
    validate(sys);
    if (sys.side != Side::left)
        throw std::invalid_argument("exp_shifted_series: left systems only");
    if (sys.terms.size() != 1 || sys.terms[0].exponent != 1)
        throw std::invalid_argument(
            "exp_shifted_series: exactly one exponential term with exponent 1 required");
    if (order < 0) throw std::invalid_argument("exp_shifted_series: negative order");

    ExpShiftedSeries s;
    s.t0 = t0;
    s.alpha = std::exp(t0);
    const CMatrix& c = sys.terms[0].coeff;
    const CMatrix base = sys.A + s.alpha * c;  // A + alpha C

    s.coeffs.reserve(static_cast<std::size_t>(order) + 1);
    s.coeffs.push_back(CMatrix::identity(sys.dim));
    for (int n = 0; n < order; ++n) {
        CMatrix next = base * s.coeffs[n];
        for (int d = 0; d < sys.dim; ++d)
            for (int j = 0; j < sys.dim; ++j) next(d, j) -= double(n) * s.coeffs[n](d, j);
        if (n >= 1) next += c * s.coeffs[n - 1];
        next *= 1.0 / (Complex(double(n + 1), 0.0) * s.alpha);
        s.coeffs.push_back(std::move(next));
    }
    return s;
}

inline ExpShiftedSeries exp_shifted_series(const ExpOdeSystem& sys, int order) {
    return exp_shifted_series(sys, Complex(0.0, 0.0), order);
}

inline bool exp_shifted_domain(Complex t, Complex t0 = Complex(0.0, 0.0)) {
    return std::abs(std::exp(t - t0) - 1.0) < 1.0;
}

inline Evaluation evaluate(const ExpShiftedSeries& s, Complex t) {
    const Complex x = std::exp(t) - s.alpha;
    const int n = static_cast<int>(s.coeffs.size());
    CMatrix v = s.coeffs[n - 1];
    for (int k = n - 2; k >= 0; --k) v = v * x + s.coeffs[k];
    Evaluation ev;
    ev.value = std::move(v);
    ev.tail_norm = s.coeffs[n - 1].max_norm() * std::pow(std::abs(x), n - 1);
    ev.in_domain = exp_shifted_domain(t, s.t0);
    return ev;
}

// ---------------------------------------------------------------------------
// Substitution in the doubly indexed basis e^{kt} t^j

struct ExpLogSeries {
    int kmax = 0, jmax = 0;
    Side side = Side::left;
    std::vector<std::vector<CMatrix>> table;  // table[k][j], B(t) = sum e^{kt} t^j table[k][j]
};

// Matching e^{kt} t^j coefficients gives, for each k,
//   (j+1) B_{k,j+1} = (A - k) B_{k,j} + sum_i C_i B_{k - a_i, j}      (left)
//   (j+1) B_{k,j+1} = B_{k,j} (A - k) + sum_i B_{k - a_i, j} C_i      (right)
// with B_{k,0} = Id for k = 0 and 0 otherwise (so B(0) = Id holds exactly).
inline ExpLogSeries exp_log_series(const ExpOdeSystem& sys, int kmax, int jmax) {
    validate(sys);
    if (kmax < 0 || jmax < 0)
        throw std::invalid_argument("exp_log_series: negative truncation");

    ExpLogSeries s;
    s.kmax = kmax;
    s.jmax = jmax;
    s.side = sys.side;
    s.table.assign(static_cast<std::size_t>(kmax) + 1,
                   std::vector<CMatrix>(static_cast<std::size_t>(jmax) + 1,
                                        CMatrix(sys.dim, sys.dim)));
    s.table[0][0] = CMatrix::identity(sys.dim);

    for (int k = 0; k <= kmax; ++k) {
        for (int j = 0; j < jmax; ++j) {
            CMatrix next = (sys.side == Side::left) ? sys.A * s.table[k][j]
                                                    : s.table[k][j] * sys.A;
            for (int d = 0; d < sys.dim; ++d)
                for (int c = 0; c < sys.dim; ++c)
                    next(d, c) -= double(k) * s.table[k][j](d, c);
            for (const auto& tm : sys.terms) {
                if (tm.exponent > k) continue;
                const CMatrix& prev = s.table[k - tm.exponent][j];
                next += (sys.side == Side::left) ? tm.coeff * prev : prev * tm.coeff;
            }
            next *= Complex(1.0 / (j + 1), 0.0);
            s.table[k][j + 1] = std::move(next);
        }
    }
    return s;
}

// The truncation indicator must watch both edges of the table: the last
// exponential row can vanish identically for nilpotent structure matrices
// while the polynomial truncation is still badly short, and vice versa.
inline Evaluation evaluate(const ExpLogSeries& s, Complex t) {
    const int dim = s.table[0][0].rows();
    const double tj = std::pow(std::abs(t), s.jmax);
    CMatrix v(dim, dim);
    double tail = 0.0;
    for (int k = 0; k <= s.kmax; ++k) {
        CMatrix inner = s.table[k][s.jmax];
        for (int j = s.jmax - 1; j >= 0; --j) inner = inner * t + s.table[k][j];
        const double w = std::abs(std::exp(double(k) * t));
        tail = std::max(tail, s.table[k][s.jmax].max_norm() * tj * w);
        if (k == s.kmax) tail = std::max(tail, inner.max_norm() * w);
        v += std::exp(double(k) * t) * inner;
    }
    Evaluation ev;
    ev.value = std::move(v);
    ev.tail_norm = tail;
    ev.in_domain = true;  // entire at fixed truncation
    return ev;
}

// The e^{a t} t^1 coefficient is exactly the sum of the C_i with exponent a:
// reading the j = 0 recursion row at k = a returns the structure constants
// that generated the system.
inline CMatrix recover_structure_matrix(const ExpLogSeries& s, int exponent) {
    if (exponent < 1 || exponent > s.kmax || s.jmax < 1)
        throw std::invalid_argument(
            "recover_structure_matrix: need kmax >= exponent >= 1 and jmax >= 1");
    return s.table[exponent][1];
}

inline CMatrix recover_structure_matrix(const ExpLogSeries& s) {
    return recover_structure_matrix(s, 1);
}

// ---------------------------------------------------------------------------
// Block operator view

// The (K+1)^2-block matrix with diagonal A-K, ..., A-1, A (top-left to
// bottom-right) and each C_i on the a_i-th block superdiagonal for left
// systems / subdiagonal for right systems.  Its powers generate the series
// table: table[k][j] = (1/j!) [block_operator(sys, k)^j] at block (1, k+1)
// (left) or (k+1, 1) (right), 1-based, with the truncation level equal to
// the k being extracted.
inline BlockMatrix block_operator(const ExpOdeSystem& sys, int K) {
    validate(sys);
    if (K < 0) throw std::invalid_argument("block_operator: negative truncation");
    BlockMatrix d(K + 1, K + 1, sys.dim);
    for (int p = 0; p <= K; ++p) {
        d.block(p, p) = sys.A;
        for (int i = 0; i < sys.dim; ++i) d.block(p, p)(i, i) -= double(K - p);
    }
    for (const auto& tm : sys.terms)
        for (int p = 0; p + tm.exponent <= K; ++p) {
            if (sys.side == Side::left)
                d.block(p, p + tm.exponent) += tm.coeff;
            else
                d.block(p + tm.exponent, p) += tm.coeff;
        }
    return d;
}

// One exponential for the whole truncated solution.  Shifting the diagonal by
// +K Id turns the display operator into the ascending truncation D = diag(A,
// A+1, ..., A+K) with the same off-diagonal terms; block triangularity gives
// [exp(tD)] block (1, k+1) = e^{kt} [exp(t block_operator(sys, k))] block
// (1, k+1), so summing the first block row (left; first block column when
// right) over k = 0..K evaluates the series.  The k = K block is the
// reported tail.
inline CMatrix solve_via_block_exp(const ExpOdeSystem& sys, Complex t, int K,
                                   double tol = 1e-8) {
    BlockMatrix d = block_operator(sys, K);
    d.shift_diagonal(Complex(double(K), 0.0));
    const CMatrix full = mat_exp(d.flatten() * t, std::min(tol * 1e-3, 1e-13));

    CMatrix b(sys.dim, sys.dim);
    CMatrix last(sys.dim, sys.dim);
    for (int k = 0; k <= K; ++k) {
        const CMatrix blk = (sys.side == Side::left)
                                ? extract_block(full, sys.dim, 1, k + 1)
                                : extract_block(full, sys.dim, k + 1, 1);
        b += blk;
        if (k == K) last = blk;
    }
    const double tail = last.max_norm();
    if (tail > tol)
        throw ConvergenceError("solve_via_block_exp: tail " + std::to_string(tail) +
                                   " above tolerance; raise the truncation",
                               b, tail);
    return b;
}

// ---------------------------------------------------------------------------
// Big-quantum normalization: B' = B (A + sum_{n>=1} t^n / n! -free C_n ...)
// stored as plain matrix power series.  The recursion matches t^{k-1}
// coefficients of B' = B (A + sum_n C_n t^n):
//   k B_k = B_{k-1} A + sum_{n>=1, n<k} B_{k-1-n} C_n.

struct PowerSeries {
    std::vector<CMatrix> coeffs;  // B(t) = sum_k coeffs[k] t^k
    double companion_residual = 0.0;
};

// Constant companion encoding of the same recursion: on the grid of block
// indices 0..K put A on every diagonal block, (p+1) Id at (p, p+1), and C_n
// at (p+n, p).  Then B_k = (1/k!) [alpha^k] at block (1,1) exactly whenever
// K >= k.  (The weight p+1 on the superdiagonal carries the binomial
// bookkeeping that a plain unweighted companion matrix drops.)
inline BlockMatrix big_quantum_companion(const CMatrix& A, const std::vector<CMatrix>& Cs,
                                         int K) {
    if (!A.is_square()) throw std::invalid_argument("big_quantum_companion: A not square");
    const int dim = A.rows();
    for (const auto& c : Cs)
        if (c.rows() != dim || c.cols() != dim)
            throw std::invalid_argument("big_quantum_companion: C_n has wrong shape");
    if (K < 0) throw std::invalid_argument("big_quantum_companion: negative truncation");

    BlockMatrix a(K + 1, K + 1, dim);
    for (int p = 0; p <= K; ++p) {
        a.block(p, p) = A;
        if (p + 1 <= K)
            for (int i = 0; i < dim; ++i) a.block(p, p + 1)(i, i) = double(p + 1);
        for (int n = 1; n <= static_cast<int>(Cs.size()); ++n)
            if (p + n <= K) a.block(p + n, p) += Cs[static_cast<std::size_t>(n) - 1];
    }
    return a;
}

inline PowerSeries big_quantum_series(const CMatrix& A, const std::vector<CMatrix>& Cs,
                                      int order) {
    if (!A.is_square()) throw std::invalid_argument("big_quantum_series: A not square");
    const int dim = A.rows();
    for (const auto& c : Cs)
        if (c.rows() != dim || c.cols() != dim)
            throw std::invalid_argument("big_quantum_series: C_n has wrong shape");
    if (order < 0) throw std::invalid_argument("big_quantum_series: negative order");

    PowerSeries s;
    s.coeffs.reserve(static_cast<std::size_t>(order) + 1);
    s.coeffs.push_back(CMatrix::identity(dim));
    for (int k = 1; k <= order; ++k) {
        CMatrix next = s.coeffs[static_cast<std::size_t>(k) - 1] * A;
        for (int n = 1; n <= static_cast<int>(Cs.size()) && n < k; ++n)
            next += s.coeffs[static_cast<std::size_t>(k - 1 - n)] *
                    Cs[static_cast<std::size_t>(n) - 1];
        next *= Complex(1.0 / k, 0.0);
        s.coeffs.push_back(std::move(next));
    }

    // cross-check the recursion against powers of the companion encoding
    const BlockMatrix alpha = big_quantum_companion(A, Cs, order);
    const CMatrix flat = alpha.flatten();
    CMatrix pw = CMatrix::identity(flat.rows());
    double fact = 1.0, resid = 0.0;
    for (int k = 0; k <= order; ++k) {
        if (k > 0) {
            pw = pw * flat;
            fact *= k;
        }
        const CMatrix corner = extract_block(pw, dim, 1, 1) * Complex(1.0 / fact, 0.0);
        resid = std::max(resid, max_diff(corner, s.coeffs[static_cast<std::size_t>(k)]));
    }
    s.companion_residual = resid;
    return s;
}

inline Evaluation evaluate(const PowerSeries& s, Complex t) {
    const int n = static_cast<int>(s.coeffs.size());
    CMatrix v = s.coeffs[static_cast<std::size_t>(n) - 1];
    for (int k = n - 2; k >= 0; --k) v = v * t + s.coeffs[static_cast<std::size_t>(k)];
    Evaluation ev;
    ev.value = std::move(v);
    ev.tail_norm =
        s.coeffs[static_cast<std::size_t>(n) - 1].max_norm() * std::pow(std::abs(t), n - 1);
    ev.in_domain = true;
    return ev;
}

}  // namespace dubrovin
