#pragma once

// The rank m+1 model system attached to complex projective m-space: with
//   A = sum_{i=1}^{m} E^i_{i+1}   (superdiagonal),   C = E^{m+1}_1  (corner),
// the left system B' = alpha^{-1} (A + e^t C) B, B(0) = Id, has an explicit
// everywhere-convergent solution assembled from composition sums:
//
//   B(t) = A(t) + sum_{n>=2} (t^n/n!) sum_{k>=1} sum_{j=1}^{m+1} [
//            alpha^{-((k-1)m+k+j-1)} S1_k(n-k-j+1) E^{m+2-j}_1
//          + sum_{l=1}^{m+1}
//            alpha^{-((k-1)m+k+j+l-2)} S2_{k,l}(n-k-j+1) E^{m-j+2}_l ],
//
// where A(t) is the upper-triangular Toeplitz matrix with (alpha^{-1}t)^r/r!
// on the r-th superdiagonal plus alpha^{-1} t in the bottom-left corner, and
// the composition sums over ordered tuples of positive parts are
//   S1_k(R) = sum_{P(k-1,R)} prod_{s=1}^{k-1} binom(r_s, m) s^{r_s-m},
//   S2_{k,l}(R) = sum_{P(k,R)} [prod_{s=1}^{k-1} binom(r_s, m) s^{r_s-m}]
//                              * binom(r_k, l-1) k^{r_k-l+1}.
// Every term is a nonnegative combinatorial weight times a pure power of
// alpha^{-1}; parts below m (below l-1 in the last slot) vanish through the
// binomial factor.  The full-parameter flat frames for the quantum product
// are built on top by basis reversal and a commuting constant prefactor.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "complex_matrix.hpp"
#include "matrix_exp.hpp"
#include "ode_series.hpp"
#include "product_algebra.hpp"

namespace dubrovin {

struct PmSystem {
    int m = 1;
    CMatrix A, C;
    Complex hbar{0.0, 1.0};
    Complex alpha{1.0, 0.0};  // the weight the closed form divides by
};

inline PmSystem pm_system(int m, Complex hbar) {
    if (m < 1) throw std::invalid_argument("pm_system: m must be >= 1");
    PmSystem s;
    s.m = m;
    s.hbar = hbar;
    s.alpha = Complex(0.0, -1.0) * hbar;
    s.A = CMatrix(m + 1, m + 1);
    for (int i = 1; i <= m; ++i) s.A += elementary(i, i + 1, m + 1);
    s.C = elementary(m + 1, 1, m + 1);
    return s;
}

// The left system B' = alpha^{-1}(A + e^t C) B solved by the closed form.
inline ExpOdeSystem pm_ode_system(const PmSystem& s) {
    const Complex ainv = 1.0 / s.alpha;
    ExpOdeSystem sys;
    sys.dim = s.m + 1;
    sys.side = Side::left;
    sys.A = ainv * s.A;
    sys.terms.push_back({1, ainv * s.C});
    return sys;
}

inline CMatrix pm_closed_form(const PmSystem& s, Complex t, int order) {
    if (order < 1) throw std::invalid_argument("pm_closed_form: order must be >= 1");
    const int m = s.m, dim = m + 1, N = order;
    const Complex ainv = 1.0 / s.alpha;

    // A(t): Toeplitz part plus the corner
    CMatrix b(dim, dim);
    {
        std::vector<Complex> pw(static_cast<std::size_t>(m) + 1);
        pw[0] = 1.0;
        for (int r = 1; r <= m; ++r)
            pw[static_cast<std::size_t>(r)] =
                pw[static_cast<std::size_t>(r) - 1] * ainv * t / double(r);
        for (int i = 0; i < dim; ++i)
            for (int r = 0; i + r < dim; ++r)
                b(i, i + r) = pw[static_cast<std::size_t>(r)];
        b(m, 0) += ainv * t;
    }

    // binomials binom[r][q] for q <= m+1 and inverse alpha powers
    std::vector<std::vector<double>> binom(static_cast<std::size_t>(N) + 1,
                                           std::vector<double>(static_cast<std::size_t>(m) + 2,
                                                               0.0));
    for (int r = 0; r <= N; ++r) {
        binom[static_cast<std::size_t>(r)][0] = 1.0;
        for (int q = 1; q <= m + 1 && q <= r; ++q)
            binom[static_cast<std::size_t>(r)][static_cast<std::size_t>(q)] =
                binom[static_cast<std::size_t>(r) - 1][static_cast<std::size_t>(q) - 1] +
                binom[static_cast<std::size_t>(r) - 1][static_cast<std::size_t>(q)];
    }
    std::vector<Complex> apow(static_cast<std::size_t>(N + 2 * m + 3));
    apow[0] = 1.0;
    for (std::size_t e = 1; e < apow.size(); ++e) apow[e] = apow[e - 1] * ainv;

    std::vector<CMatrix> coef(static_cast<std::size_t>(N) + 1, CMatrix(dim, dim));
    const int min_part = std::max(1, m);  // parts below m contribute nothing

    for (int k = 1; (k - 1) * min_part <= N - k; ++k) {
        const int Rmax = N - k;  // j >= 1 limits the reachable partial sum

        // position powers d^e, d = 1..k, e = 0..Rmax+1: the hot loops below
        // only do table lookups
        std::vector<std::vector<double>> dpow(static_cast<std::size_t>(k) + 1);
        for (int d = 1; d <= k; ++d) {
            auto& row = dpow[static_cast<std::size_t>(d)];
            row.assign(static_cast<std::size_t>(Rmax) + 2, 1.0);
            for (std::size_t e = 1; e < row.size(); ++e) row[e] = row[e - 1] * d;
        }

        // S1 buckets by sum: one depth-first pass over all prefixes of k-1
        // position-weighted parts, sharing partial products
        std::vector<double> s1(static_cast<std::size_t>(Rmax) + 1, 0.0);
        if (k == 1) {
            s1[0] = 1.0;
        } else {
            auto rec = [&](auto&& self, int depth, int sum, double product) -> void {
                const int room = (k - 1 - depth) * min_part;  // parts still to place
                const auto& pw = dpow[static_cast<std::size_t>(depth)];
                for (int r = min_part; sum + r + room <= Rmax; ++r) {
                    const double p = product *
                                     binom[static_cast<std::size_t>(r)]
                                          [static_cast<std::size_t>(m)] *
                                     pw[static_cast<std::size_t>(r - m)];
                    if (depth == k - 1)
                        s1[static_cast<std::size_t>(sum + r)] += p;
                    else
                        self(self, depth + 1, sum + r, p);
                }
            };
            rec(rec, 1, 0, 1.0);
        }

        // first sum: row m+2-j, column 1
        for (int j = 1; j <= m + 1; ++j) {
            const int e1 = (k - 1) * m + k + j - 1;
            for (int R = 0; R <= N - k - j + 1; ++R) {
                const double v = s1[static_cast<std::size_t>(R)];
                if (v == 0.0) continue;
                const int n = R + k + j - 1;
                if (n < 2) continue;
                coef[static_cast<std::size_t>(n)](m + 1 - j, 0) +=
                    apow[static_cast<std::size_t>(e1)] * v;
            }
        }

        // second sum: last part carries binom(r_k, l-1) k^{r_k-l+1}
        for (int l = 1; l <= m + 1; ++l) {
            for (int R = 1; R <= Rmax; ++R) {
                double s2 = 0.0;
                const auto& kpw = dpow[static_cast<std::size_t>(k)];
                for (int r = std::max(1, l - 1); r <= R; ++r) {
                    const double prefix = s1[static_cast<std::size_t>(R - r)];
                    if (prefix == 0.0) continue;
                    s2 += prefix *
                          binom[static_cast<std::size_t>(r)][static_cast<std::size_t>(l) - 1] *
                          kpw[static_cast<std::size_t>(r - l + 1)];
                }
                if (s2 == 0.0) continue;
                for (int j = 1; j <= m + 1; ++j) {
                    const int n = R + k + j - 1;
                    if (n < 2 || n > N) continue;
                    const int e2 = (k - 1) * m + k + j + l - 2;
                    coef[static_cast<std::size_t>(n)](m + 1 - j, l - 1) +=
                        apow[static_cast<std::size_t>(e2)] * s2;
                }
            }
        }
    }

    Complex tn = t;  // t^n / n!
    for (int n = 2; n <= N; ++n) {
        tn *= t / double(n);
        b += tn * coef[static_cast<std::size_t>(n)];
    }
    return b;
}

// ---------------------------------------------------------------------------
// Flat frames for the quantum product of projective space

// One-parameter frame in the deformation direction: the closed form with the
// flatness weight alpha = -1/hbar, carried to connection coordinates by
// reversing the basis order on both sides.  Columns satisfy
//   d/dt g_inv + hbar (S_1 + e^t E^1_{m+1}-transposed ...) g_inv = 0
// for the multiplication operator of the degree-2 class.
inline FlatFrame pm_flat_frame(int m, Complex hbar, Complex t1, int order) {
    PmSystem s = pm_system(m, hbar);
    s.alpha = Complex(-1.0, 0.0) / hbar;
    FlatFrame f;
    f.g_inv = reverse_basis(pm_closed_form(s, t1, order));
    f.g = f.g_inv.inverse();
    return f;
}

// shift operator with 1 on the l-th subdiagonal: multiplication by the
// degree-2l class in the constant product
inline CMatrix pm_shift(int m, int l) {
    CMatrix s(m + 1, m + 1);
    for (int j = 0; l + j <= m; ++j) s(l + j, j) = 1.0;
    return s;
}

// Full-parameter frame: commuting constant prefactor for the directions with
// no exponential correction times the one-parameter frame.  Genuinely flat in
// every direction for m = 1 (and always in the unit and deformation
// directions); for m >= 2 the remaining directions pick up deformation
// corrections this product ignores, so it is a model frame, not a flat one.
inline FlatFrame pm_full_frame(int m, Complex hbar, const std::vector<Complex>& t,
                               int order) {
    if (t.size() != static_cast<std::size_t>(m) + 1)
        throw std::invalid_argument("pm_full_frame: need m+1 parameters");
    CMatrix s(m + 1, m + 1);
    for (int l = 0; l <= m; ++l) {
        if (l == 1) continue;
        s += t[static_cast<std::size_t>(l)] * pm_shift(m, l);
    }
    const FlatFrame base = pm_flat_frame(m, hbar, t[1], order);
    FlatFrame f;
    f.g_inv = mat_exp(-hbar * s) * base.g_inv;
    f.g = f.g_inv.inverse();
    return f;
}

// ---------------------------------------------------------------------------
// The product tables

inline ProductTable pm_cup_table(int m) {
    if (m < 1) throw std::invalid_argument("pm_cup_table: m must be >= 1");
    const int dim = m + 1;
    CMatrix pairing(dim, dim);
    for (int a = 0; a < dim; ++a) pairing(a, m - a) = 1.0;
    ProductTable t = make_product_table(dim, pairing);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; i + j < dim; ++j) t.set_gamma(i, j, i + j, 1.0);
    return t;
}

// Quantum deformation data: one curve class of degree 1 whose triple
// invariants are 1 exactly when the three cohomology degrees sum to the
// dimension count 2m+1, zero otherwise.
inline GwData pm_gw_data(int m) {
    GwData d;
    d.dim = m + 1;
    d.h2_rank = 1;
    d.cup = pm_cup_table(m);
    GwClass cl;
    cl.exponents = {1};
    cl.invariants.assign(static_cast<std::size_t>(d.dim) * d.dim * d.dim,
                         Complex(0.0, 0.0));
    for (int j = 0; j <= m; ++j)
        for (int i = 0; i <= m; ++i)
            for (int l = 0; l <= m; ++l)
                if (j + i + l == 2 * m + 1)
                    cl.invariants[d.cup.g_index(j, i, l)] = 1.0;
    d.classes.push_back(std::move(cl));
    return d;
}

}  // namespace dubrovin
