#pragma once

// Matrix exponential by scaling-and-squaring over a plain Taylor sum.  The
// argument is scaled by 2^-s until its max-entry norm is at most 1/4, the
// series is summed until the term norm drops below a tolerance tightened to
// absorb the s squarings, then the result is squared back up.

#include <cmath>
#include <stdexcept>

#include "complex_matrix.hpp"

namespace dubrovin {

inline CMatrix mat_exp(const CMatrix& m, double tol = 1e-14) {
    if (!m.is_square())
        throw std::invalid_argument("mat_exp: square matrices only");
    if (!(tol > 0.0))
        throw std::invalid_argument("mat_exp: tolerance must be positive");

    int s = 0;
    double norm = m.max_norm();
    while (norm > 0.25 && s < 64) { norm *= 0.5; ++s; }

    CMatrix a = m * Complex(std::ldexp(1.0, -s), 0.0);

    // each squaring roughly doubles the absolute error, so leave headroom
    const double term_tol = std::max(tol * std::ldexp(1.0, -s) * 0.1, 1e-300);

    const int n = m.rows();
    CMatrix sum = CMatrix::identity(n);
    CMatrix term = CMatrix::identity(n);
    bool converged = false;
    for (int k = 1; k <= 300; ++k) {
        term = term * a;
        term *= Complex(1.0 / k, 0.0);
        sum += term;
        if (term.max_norm() < term_tol) { converged = true; break; }
    }
    if (!converged)
        throw std::runtime_error("mat_exp: Taylor sum failed to converge");

    for (int i = 0; i < s; ++i) sum = sum * sum;
    return sum;
}

}  // namespace dubrovin
