#pragma once

// Flat frame of the deformed connection by chaining one-direction solves.
// Columns of g_inv must satisfy d/dt^i g_inv = -hbar Gamma_i(t) g_inv.  Each
// quantum_ode_system is a right system for the transposed matrices, so the
// chain accumulates right solutions built with weight -hbar,
//     M(t^1, ..., t^p) = B1(t^1) ... with  M <- M * Bi(t^i),
// where Bi comes from the direction-i system with t^1..t^{i-1} frozen, and
// returns g_inv = M^T.  Flatness of the underlying product makes the result
// independent of the chaining order; tests check this directly.

#include <stdexcept>
#include <vector>

#include "complex_matrix.hpp"
#include "ode_series.hpp"
#include "product_algebra.hpp"

namespace dubrovin {

struct ChainParams {
    int kmax = 25;
    int jmax = 25;
    double tol = 1e-8;
};

inline FlatFrame frobenius_chain(const GwData& data, const std::vector<Complex>& t,
                                 Complex hbar, const ChainParams& params = {}) {
    validate(data);
    if (t.size() != static_cast<std::size_t>(data.h2_rank))
        throw std::invalid_argument("frobenius_chain: need one parameter per direction");
    if (params.kmax < 1 || params.jmax < 1)
        throw std::invalid_argument("frobenius_chain: truncations must be >= 1");

    CMatrix m = CMatrix::identity(data.dim);
    for (int i = 1; i <= data.h2_rank; ++i) {
        std::vector<Complex> frozen(t.begin(), t.begin() + (i - 1));
        const ExpOdeSystem sys = quantum_ode_system(data, i, frozen, -hbar);
        const ExpLogSeries series = exp_log_series(sys, params.kmax, params.jmax);
        const Evaluation ev = evaluate(series, t[static_cast<std::size_t>(i) - 1]);
        if (ev.tail_norm > params.tol)
            throw ConvergenceError("frobenius_chain: direction " + std::to_string(i) +
                                       " tail " + std::to_string(ev.tail_norm) +
                                       " above tolerance",
                                   m, ev.tail_norm);
        m = m * ev.value;
    }

    FlatFrame f;
    f.g_inv = m.transpose();
    f.g = f.g_inv.inverse();
    return f;
}

}  // namespace dubrovin
