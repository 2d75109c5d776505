#pragma once

// Independent check: classical fourth-order Runge-Kutta along a straight
// segment from 0 to the evaluation point, with a step-doubling error
// estimate.  Shares nothing with the series machinery beyond the system
// container, so agreement is meaningful.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "complex_matrix.hpp"
#include "ode_series.hpp"

namespace dubrovin {

struct OdePath {
    Complex end{0.0, 0.0};
    int steps = 256;
};

struct RkResult {
    CMatrix value;
    double error_estimate = 0.0;  // Richardson estimate from step doubling
};

namespace detail {

template <typename Coeff>
CMatrix rk4_run(int dim, Side side, const Coeff& coeff_at, Complex end, int steps) {
    const Complex h = end / double(steps);
    CMatrix b = CMatrix::identity(dim);
    auto rhs = [&](Complex t, const CMatrix& y) {
        const CMatrix f = coeff_at(t);
        return (side == Side::left) ? f * y : y * f;
    };
    for (int n = 0; n < steps; ++n) {
        const Complex t0 = h * double(n);
        const CMatrix k1 = rhs(t0, b);
        const CMatrix k2 = rhs(t0 + 0.5 * h, b + 0.5 * h * k1);
        const CMatrix k3 = rhs(t0 + 0.5 * h, b + 0.5 * h * k2);
        const CMatrix k4 = rhs(t0 + h, b + h * k3);
        b += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return b;
}

}  // namespace detail

inline RkResult rk_solve(const ExpOdeSystem& sys, const OdePath& path) {
    validate(sys);
    if (path.steps < 16)
        throw std::invalid_argument("rk_solve: need at least 16 steps");
    auto coeff = [&sys](Complex t) {
        CMatrix f = sys.A;
        for (const auto& tm : sys.terms)
            f += std::exp(double(tm.exponent) * t) * tm.coeff;
        return f;
    };
    const CMatrix coarse = detail::rk4_run(sys.dim, sys.side, coeff, path.end, path.steps);
    const CMatrix fine = detail::rk4_run(sys.dim, sys.side, coeff, path.end, 2 * path.steps);
    RkResult r;
    r.error_estimate = max_diff(fine, coarse) / 15.0;
    r.value = fine;
    return r;
}

inline CMatrix rk_integrate(const ExpOdeSystem& sys, const OdePath& path, double tol) {
    RkResult r = rk_solve(sys, path);
    if (r.error_estimate > tol)
        throw ConvergenceError("rk_integrate: step-doubling estimate " +
                                   std::to_string(r.error_estimate) +
                                   " above tolerance; increase steps",
                               r.value, r.error_estimate);
    return r.value;
}

// Same oracle for polynomial coefficients B' = B (A + sum_n t^n C_n): the
// big-quantum normalization.
inline RkResult rk_solve_poly(const CMatrix& A, const std::vector<CMatrix>& Cs,
                              const OdePath& path) {
    if (!A.is_square()) throw std::invalid_argument("rk_solve_poly: A not square");
    if (path.steps < 16)
        throw std::invalid_argument("rk_solve_poly: need at least 16 steps");
    auto coeff = [&](Complex t) {
        CMatrix f = A;
        Complex tn = 1.0;
        for (const auto& c : Cs) {
            tn *= t;
            f += tn * c;
        }
        return f;
    };
    const CMatrix coarse = detail::rk4_run(A.rows(), Side::right, coeff, path.end, path.steps);
    const CMatrix fine =
        detail::rk4_run(A.rows(), Side::right, coeff, path.end, 2 * path.steps);
    RkResult r;
    r.error_estimate = max_diff(fine, coarse) / 15.0;
    r.value = fine;
    return r;
}

inline CMatrix rk_integrate_poly(const CMatrix& A, const std::vector<CMatrix>& Cs,
                                 const OdePath& path, double tol) {
    RkResult r = rk_solve_poly(A, Cs, path);
    if (r.error_estimate > tol)
        throw ConvergenceError("rk_integrate_poly: step-doubling estimate " +
                                   std::to_string(r.error_estimate) +
                                   " above tolerance; increase steps",
                               r.value, r.error_estimate);
    return r.value;
}

}  // namespace dubrovin
