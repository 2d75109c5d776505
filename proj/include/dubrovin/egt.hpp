#pragma once

// Factorization route for the single-term (a = 1) block operator: conjugating
// the ascending truncation D = diag(A, A+1, ..., A+K) + C-superdiagonal by
// the upper unitriangular E with blocks (-C)^{q-p}/(q-p)! splits it as
//   E D = (G + T E^{-1} ... ) E   with   G = diag(A, A+1, ..., A+K),
//   T_{p,q} = [(-C)^{q-p}/(q-p)!, A]   (q > p),
// exactly on the retained band: E D = G E + T, so D = E^{-1}(G + T E^{-1})E.
// The solution is recovered from exp(t(G + T E^{-1})) by contracting with the
// explicit E^{-1} first block row and the E column sums, with no further
// matrix exponentials or inversions.

#include <stdexcept>

#include "block_matrix.hpp"
#include "complex_matrix.hpp"
#include "matrix_exp.hpp"
#include "ode_series.hpp"

namespace dubrovin {

struct EgtFactorization {
    int truncation = 0;  // K: blocks are indexed 0..K
    BlockMatrix E, E_inv, G, T;
};

namespace detail {

// sys must be a left system with exactly one term of exponent 1
inline const CMatrix& egt_term(const ExpOdeSystem& sys) {
    validate(sys);
    if (sys.terms.size() != 1 || sys.terms[0].exponent != 1)
        throw std::invalid_argument(
            "egt: exactly one exponential term with exponent 1 required");
    return sys.terms[0].coeff;
}

}  // namespace detail

inline EgtFactorization egt_factorize(const ExpOdeSystem& sys, int K) {
    if (sys.side != Side::left)
        throw std::invalid_argument("egt_factorize: left systems only");
    const CMatrix& c = detail::egt_term(sys);
    if (K < 0) throw std::invalid_argument("egt_factorize: negative truncation");
    const int dim = sys.dim;

    EgtFactorization f;
    f.truncation = K;
    f.E = BlockMatrix(K + 1, K + 1, dim);
    f.E_inv = BlockMatrix(K + 1, K + 1, dim);
    f.G = BlockMatrix(K + 1, K + 1, dim);
    f.T = BlockMatrix(K + 1, K + 1, dim);

    // powers of C divided by factorials, once
    std::vector<CMatrix> cpow{CMatrix::identity(dim)};
    for (int s = 1; s <= K; ++s)
        cpow.push_back(cpow.back() * c * Complex(1.0 / s, 0.0));

    for (int p = 0; p <= K; ++p) {
        f.G.block(p, p) = sys.A;
        for (int i = 0; i < dim; ++i) f.G.block(p, p)(i, i) += double(p);
        for (int q = p; q <= K; ++q) {
            const int r = q - p;
            const double sign = (r % 2 == 0) ? 1.0 : -1.0;
            f.E.block(p, q) = cpow[r] * Complex(sign, 0.0);
            f.E_inv.block(p, q) = cpow[r];
            if (r > 0)
                f.T.block(p, q) =
                    (cpow[r] * sys.A - sys.A * cpow[r]) * Complex(sign, 0.0);
        }
    }
    return f;
}

// Solve by one exponential of M = G + T E^{-1} (block upper triangular).  The
// truncated solution sum_{k<=K} [exp(tD)] block (1, k+1) becomes
//   sum_{p,q} (C^p/p!) [exp(tM)]_{p,q} w_q,  w_q = sum_{s<=K-q} (-C)^s/s!,
// and the tail indicator is the reconstructed k = K block of exp(tD).
// Right systems are handled by transposing to a left system and back.
inline CMatrix solve_via_egt(const ExpOdeSystem& sys, Complex t, int K, double tol = 1e-8) {
    if (sys.side == Side::right) {
        ExpOdeSystem flipped;
        flipped.dim = sys.dim;
        flipped.A = sys.A.transpose();
        for (const auto& tm : sys.terms)
            flipped.terms.push_back({tm.exponent, tm.coeff.transpose()});
        flipped.side = Side::left;
        return solve_via_egt(flipped, t, K, tol).transpose();
    }

    const EgtFactorization f = egt_factorize(sys, K);
    const int dim = sys.dim;

    BlockMatrix m = f.G + f.T * f.E_inv;
    const CMatrix x = mat_exp(m.flatten() * t, std::min(tol * 1e-3, 1e-13));

    // w_q = sum of E blocks (q, k) over retained k
    std::vector<CMatrix> w(static_cast<std::size_t>(K) + 1, CMatrix(dim, dim));
    for (int q = 0; q <= K; ++q)
        for (int k = q; k <= K; ++k) w[q] += f.E.block(q, k);

    CMatrix b(dim, dim);
    CMatrix tail_block(dim, dim);
    for (int p = 0; p <= K; ++p) {
        const CMatrix& left = f.E_inv.block(0, p);  // C^p / p!
        for (int q = p; q <= K; ++q) {  // exp(tM) is block upper triangular
            const CMatrix xb = extract_block(x, dim, p + 1, q + 1);
            b += left * xb * w[q];
            tail_block += left * xb * f.E.block(q, K);
        }
    }

    const double tail = tail_block.max_norm();
    if (tail > tol)
        throw ConvergenceError("solve_via_egt: tail " + std::to_string(tail) +
                                   " above tolerance; raise the truncation",
                               b, tail);
    return b;
}

}  // namespace dubrovin
