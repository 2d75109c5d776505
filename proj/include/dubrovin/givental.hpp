#pragma once

// Degree-truncated hypergeometric solution for projective m-space.  The
// generating class satisfies a scalar (m+1)-st order equation whose solution
// has the degree expansion sum_d e^{dt} Q_d(H) e^{H t ...} with
//   Q_0 = 1,   Q_d = Q_{d-1} / (H - d/hbar)^{m+1}   (mod H^{m+1}),
// H nilpotent of order m+1.  The matrix assembled from its H-components and
// scaled derivative tower solves the same first-order system as the closed
// form, which yields a cross-identity between the two solutions checked by
// givental_identity_residual.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "complex_matrix.hpp"
#include "projective_space.hpp"

namespace dubrovin {

namespace detail {

// all polynomials live in C[H]/(H^{m+1}): plain coefficient vectors of
// length m+1
inline std::vector<Complex> poly_mul(const std::vector<Complex>& a,
                                     const std::vector<Complex>& b) {
    const std::size_t n = a.size();
    std::vector<Complex> r(n, Complex(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] == 0.0) continue;
        for (std::size_t j = 0; i + j < n; ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}

// (H - c)^{-1} = -(1/c) (1 + H/c + (H/c)^2 + ...) truncated
inline std::vector<Complex> poly_inv_linear(Complex c, int m) {
    if (c == 0.0)
        throw std::invalid_argument("poly_inv_linear: pole at zero constant term");
    std::vector<Complex> r(static_cast<std::size_t>(m) + 1);
    r[0] = Complex(-1.0, 0.0) / c;
    for (int i = 1; i <= m; ++i)
        r[static_cast<std::size_t>(i)] = r[static_cast<std::size_t>(i) - 1] / c;
    return r;
}

}  // namespace detail

struct GiventalTruncation {
    int m = 1;
    Complex hbar{0.0, 1.0};
    int d_max = 0;
    std::vector<std::vector<Complex>> q;  // q[d] = Q_d as H-coefficients
};

inline GiventalTruncation givental_truncation(int m, Complex hbar, int d_max) {
    if (m < 1) throw std::invalid_argument("givental_truncation: m must be >= 1");
    if (d_max < 0) throw std::invalid_argument("givental_truncation: d_max must be >= 0");
    if (hbar == 0.0) throw std::invalid_argument("givental_truncation: hbar must be nonzero");

    GiventalTruncation g;
    g.m = m;
    g.hbar = hbar;
    g.d_max = d_max;
    std::vector<Complex> one(static_cast<std::size_t>(m) + 1, Complex(0.0, 0.0));
    one[0] = 1.0;
    g.q.push_back(one);
    for (int d = 1; d <= d_max; ++d) {
        const auto inv1 = detail::poly_inv_linear(Complex(double(d), 0.0) / hbar, m);
        std::vector<Complex> cur = g.q.back();
        for (int p = 0; p <= m; ++p) cur = detail::poly_mul(cur, inv1);
        g.q.push_back(std::move(cur));
    }
    return g;
}

// Matrix of solution components: row b (H-coefficient index), column s
// (derivative index),
//   M(b, s) = sum_d e^{dt} (m-b)! [H^{m-b}] (H - d/hbar)^{m-s} Q_d(H) X(t),
// with X(t) = sum_{r<=m} (-hbar t)^r H^r / r!.  Each row solves the right
// system row' = row * (-hbar (A + e^t C)) built from pm_system matrices.
inline CMatrix givental_matrix(const GiventalTruncation& g, Complex t) {
    const int m = g.m, dim = m + 1;
    std::vector<Complex> xt(static_cast<std::size_t>(m) + 1);
    xt[0] = 1.0;
    for (int r = 1; r <= m; ++r)
        xt[static_cast<std::size_t>(r)] =
            xt[static_cast<std::size_t>(r) - 1] * (-g.hbar * t) / double(r);

    std::vector<double> fact(static_cast<std::size_t>(m) + 1, 1.0);
    for (int r = 1; r <= m; ++r)
        fact[static_cast<std::size_t>(r)] = fact[static_cast<std::size_t>(r) - 1] * r;

    CMatrix out(dim, dim);
    for (int d = 0; d <= g.d_max; ++d) {
        const Complex ed = std::exp(double(d) * t);
        const auto base = detail::poly_mul(g.q[static_cast<std::size_t>(d)], xt);
        // ascending powers of (H - d/hbar)
        std::vector<Complex> lin(static_cast<std::size_t>(m) + 1, Complex(0.0, 0.0));
        lin[0] = -Complex(double(d), 0.0) / g.hbar;
        if (m >= 1) lin[1] = 1.0;
        std::vector<Complex> cur(static_cast<std::size_t>(m) + 1, Complex(0.0, 0.0));
        cur[0] = 1.0;
        for (int e = 0; e <= m; ++e) {  // e = m - s
            const int s = m - e;
            const auto p2 = detail::poly_mul(base, cur);
            for (int b = 0; b <= m; ++b)
                out(b, s) += ed * fact[static_cast<std::size_t>(m - b)] *
                             p2[static_cast<std::size_t>(m - b)];
            if (e < m) cur = detail::poly_mul(cur, lin);
        }
    }
    return out;
}

// Both solution families solve the same right system, so M(t) must equal
// M(0) times the basis solution.  The basis solution is the anti-transpose
// of the closed form taken at the flatness weight alpha = -1/hbar (the
// model matrices are persymmetric).  The returned residual decreases with
// both the degree truncation d_max and the series order.
inline double givental_identity_residual(const GiventalTruncation& g, const PmSystem& sys,
                                         Complex t, int order) {
    if (g.m != sys.m)
        throw std::invalid_argument("givental_identity_residual: rank mismatch");
    if (std::abs(g.hbar - sys.hbar) > 1e-12)
        throw std::invalid_argument("givental_identity_residual: weight mismatch");
    PmSystem flat = sys;
    flat.alpha = Complex(-1.0, 0.0) / sys.hbar;
    const CMatrix r = anti_transpose(pm_closed_form(flat, t, order));
    const CMatrix m0 = givental_matrix(g, Complex(0.0, 0.0));
    const CMatrix mt = givental_matrix(g, t);
    return max_diff(m0 * r, mt);
}

}  // namespace dubrovin
