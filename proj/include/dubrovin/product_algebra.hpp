#pragma once

// Products on a finite-dimensional vector space with basis T_0, ..., T_{dim-1}
// (T_0 the unit), their one-form of multiplication operators, and the flat
// frames of the associated first-order systems.
//
// Storage conventions, used everywhere downstream:
//   * structure constants gamma(i, j, k): coefficient of T_k in T_i * T_j;
//   * connection_matrices()[l] has (row i, col j) = gamma(l, j, i) — i.e. the
//     matrix of multiplication by T_l acting on column coordinate vectors;
//   * a frame F is flat for parameters t and weight hbar when
//     d/dt^l F + hbar * Gamma_l(t) F = 0 columnwise.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "complex_matrix.hpp"
#include "matrix_exp.hpp"
#include "ode_series.hpp"

namespace dubrovin {

struct ProductTable {
    int dim = 0;
    std::vector<Complex> gamma;  // [(i*dim + j)*dim + k]
    CMatrix pairing, pairing_inv;

    Complex gamma_at(int i, int j, int k) const { return gamma[g_index(i, j, k)]; }
    void set_gamma(int i, int j, int k, Complex v) { gamma[g_index(i, j, k)] = v; }

    std::size_t g_index(int i, int j, int k) const {
        if (i < 0 || j < 0 || k < 0 || i >= dim || j >= dim || k >= dim)
            throw std::out_of_range("ProductTable: structure constant index out of range");
        return (static_cast<std::size_t>(i) * dim + j) * dim + k;
    }
};

// Allocates the table and inverts the pairing; the pairing must be symmetric
// and invertible.  Commutativity / associativity / unitality are properties
// to test (check_frobenius), not construction preconditions, so that
// deliberately broken tables can be built and rejected downstream.
inline ProductTable make_product_table(int dim, const CMatrix& pairing) {
    if (dim <= 0) throw std::invalid_argument("make_product_table: dim must be positive");
    if (pairing.rows() != dim || pairing.cols() != dim)
        throw std::invalid_argument("make_product_table: pairing has wrong shape");
    if (max_diff(pairing, pairing.transpose()) > 1e-12)
        throw std::invalid_argument("make_product_table: pairing must be symmetric");
    ProductTable t;
    t.dim = dim;
    t.gamma.assign(static_cast<std::size_t>(dim) * dim * dim, Complex(0.0, 0.0));
    t.pairing = pairing;
    t.pairing_inv = pairing.inverse();
    return t;
}

// Multiplication operators: matrices[l](i, j) = gamma(l, j, i).
inline std::vector<CMatrix> connection_matrices(const ProductTable& t) {
    std::vector<CMatrix> ms;
    ms.reserve(static_cast<std::size_t>(t.dim));
    for (int l = 0; l < t.dim; ++l) {
        CMatrix m(t.dim, t.dim);
        for (int i = 0; i < t.dim; ++i)
            for (int j = 0; j < t.dim; ++j) m(i, j) = t.gamma_at(l, j, i);
        ms.push_back(std::move(m));
    }
    return ms;
}

struct FrobeniusCheck {
    bool ok = false;
    double max_residual = 0.0;
};

// The constant one-form sum Gamma_l dt^l is flat iff all multiplication
// operators commute; together with unitality (Gamma_0 = Id) and symmetry of
// the lowered tensor gamma(i,j,k') pairing(k',k) this is the full Frobenius
// package for a constant product.
inline FrobeniusCheck check_frobenius(const ProductTable& t, double tol = 1e-10) {
    const auto ms = connection_matrices(t);
    double r = 0.0;
    // unit
    r = std::max(r, max_diff(ms[0], CMatrix::identity(t.dim)));
    // commuting multiplications (equivalently d(Gamma) = 0 and Gamma ^ Gamma = 0)
    for (std::size_t a = 0; a < ms.size(); ++a)
        for (std::size_t b = a + 1; b < ms.size(); ++b)
            r = std::max(r, max_diff(ms[a] * ms[b], ms[b] * ms[a]));
    // total symmetry of the lowered triple product
    for (int i = 0; i < t.dim; ++i)
        for (int j = 0; j < t.dim; ++j)
            for (int k = 0; k < t.dim; ++k) {
                Complex low = 0.0, low_jik = 0.0, low_ikj = 0.0;
                for (int s = 0; s < t.dim; ++s) {
                    low += t.gamma_at(i, j, s) * t.pairing(s, k);
                    low_jik += t.gamma_at(j, i, s) * t.pairing(s, k);
                    low_ikj += t.gamma_at(i, k, s) * t.pairing(s, j);
                }
                r = std::max(r, std::abs(low - low_jik));
                r = std::max(r, std::abs(low - low_ikj));
            }
    return {r <= tol, r};
}

struct ConnectionForm {
    std::vector<CMatrix> gammas;
    Complex hbar{0.0, 1.0};
};

inline ConnectionForm connection_form(const ProductTable& t, Complex hbar) {
    return {connection_matrices(t), hbar};
}

struct FlatFrame {
    CMatrix g;      // solves dg = hbar (sum Gamma_l dt^l) g
    CMatrix g_inv;  // columns are flat sections: d(g_inv) + hbar Gamma g_inv = 0
};

// For commuting constant Gamma_l the frame is a single exponential.
inline FlatFrame constant_flat_frame(const std::vector<Complex>& t, const ConnectionForm& form,
                                     double tol = 1e-10) {
    if (form.gammas.empty())
        throw std::invalid_argument("constant_flat_frame: empty connection form");
    if (t.size() != form.gammas.size())
        throw std::invalid_argument(
            "constant_flat_frame: parameter count must match the number of directions");
    const int dim = form.gammas[0].rows();
    double r = 0.0;
    for (std::size_t a = 0; a < form.gammas.size(); ++a)
        for (std::size_t b = a + 1; b < form.gammas.size(); ++b)
            r = std::max(r, max_diff(form.gammas[a] * form.gammas[b],
                                     form.gammas[b] * form.gammas[a]));
    if (r > tol)
        throw std::domain_error(
            "constant_flat_frame: connection matrices do not commute (residual " +
            std::to_string(r) + "); the constant frame would not be flat");

    CMatrix s(dim, dim);
    for (std::size_t l = 0; l < t.size(); ++l) s += t[l] * form.gammas[l];
    FlatFrame f;
    f.g = mat_exp(form.hbar * s);
    f.g_inv = mat_exp(-form.hbar * s);
    return f;
}

// ---------------------------------------------------------------------------
// Quantum deformation data

struct GwClass {
    std::vector<int> exponents;       // degrees a_1..a_p against the deformation directions
    std::vector<Complex> invariants;  // rank-3 tensor [j][i][l], dim^3 entries
};

struct GwData {
    int dim = 0;
    int h2_rank = 0;  // deformation directions are basis slots 1..h2_rank
    ProductTable cup;
    std::vector<GwClass> classes;

    Complex inv_at(std::size_t c, int j, int i, int l) const {
        return classes[c].invariants[cup.g_index(j, i, l)];
    }
};

inline void validate(const GwData& data) {
    if (data.dim <= 0 || data.h2_rank < 1 || data.h2_rank >= data.dim)
        throw std::invalid_argument("GwData: need dim > 0 and 1 <= h2_rank < dim");
    if (data.cup.dim != data.dim)
        throw std::invalid_argument("GwData: cup table dimension mismatch");
    for (const auto& cl : data.classes) {
        if (static_cast<int>(cl.exponents.size()) != data.h2_rank)
            throw std::invalid_argument("GwData: class needs one exponent per direction");
        for (int a : cl.exponents)
            if (a < 1) throw std::invalid_argument("GwData: class exponents must be >= 1");
        if (cl.invariants.size() !=
            static_cast<std::size_t>(data.dim) * data.dim * data.dim)
            throw std::invalid_argument("GwData: invariant tensor has wrong size");
    }
}

// The right system solved by the deformation in direction i (1-based), with
// the earlier parameters t^1..t^{i-1} frozen:  A(j, r) = hbar * (T_i cup
// T_j)^r and, per class with a nonzero slice in direction i,
//   C(j, r) = hbar * exp(sum_{s<i} a_s t^s) * sum_l I(T_j, T_i, T_l) h^{lr},
// attached to exponent a_i.  Classes whose invariant slice in direction i
// vanishes identically are dropped.
inline ExpOdeSystem quantum_ode_system(const GwData& data, int direction,
                                       const std::vector<Complex>& frozen, Complex hbar) {
    validate(data);
    if (direction < 1 || direction > data.h2_rank)
        throw std::invalid_argument("quantum_ode_system: direction out of range");
    if (frozen.size() != static_cast<std::size_t>(direction) - 1)
        throw std::invalid_argument(
            "quantum_ode_system: need exactly direction-1 frozen parameters");

    ExpOdeSystem sys;
    sys.dim = data.dim;
    sys.side = Side::right;
    sys.A = CMatrix(data.dim, data.dim);
    for (int j = 0; j < data.dim; ++j)
        for (int r = 0; r < data.dim; ++r)
            sys.A(j, r) = hbar * data.cup.gamma_at(direction, j, r);

    for (std::size_t c = 0; c < data.classes.size(); ++c) {
        const GwClass& cl = data.classes[c];
        bool nonzero = false;
        for (int j = 0; j < data.dim && !nonzero; ++j)
            for (int l = 0; l < data.dim && !nonzero; ++l)
                if (data.inv_at(c, j, direction, l) != 0.0) nonzero = true;
        if (!nonzero) continue;

        Complex scale = hbar;
        for (int s = 1; s < direction; ++s)
            scale *= std::exp(double(cl.exponents[static_cast<std::size_t>(s) - 1]) *
                              frozen[static_cast<std::size_t>(s) - 1]);

        CMatrix cm(data.dim, data.dim);
        for (int j = 0; j < data.dim; ++j)
            for (int r = 0; r < data.dim; ++r) {
                Complex v = 0.0;
                for (int l = 0; l < data.dim; ++l)
                    v += data.inv_at(c, j, direction, l) * data.cup.pairing_inv(l, r);
                cm(j, r) = scale * v;
            }
        sys.terms.push_back({cl.exponents[static_cast<std::size_t>(direction) - 1],
                             std::move(cm)});
    }
    return sys;
}

// Multiplication operators of the deformed product at parameter t (length
// h2_rank), one per direction, acting on column vectors.  Every class enters
// with its full weight exp(sum over all directions a_alpha t^alpha); the
// one-direction systems above split that weight into frozen and active
// factors, and chaining them recovers exactly these matrices.
inline std::vector<CMatrix> quantum_connection_matrices(const GwData& data,
                                                        const std::vector<Complex>& t) {
    validate(data);
    if (t.size() != static_cast<std::size_t>(data.h2_rank))
        throw std::invalid_argument(
            "quantum_connection_matrices: need one parameter per direction");

    std::vector<Complex> weight;
    for (const auto& cl : data.classes) {
        Complex e = 0.0;
        for (int a = 0; a < data.h2_rank; ++a)
            e += double(cl.exponents[static_cast<std::size_t>(a)]) *
                 t[static_cast<std::size_t>(a)];
        weight.push_back(std::exp(e));
    }

    std::vector<CMatrix> out;
    for (int i = 1; i <= data.h2_rank; ++i) {
        CMatrix m(data.dim, data.dim);
        for (int j = 0; j < data.dim; ++j)
            for (int r = 0; r < data.dim; ++r) {
                Complex v = data.cup.gamma_at(i, j, r);
                for (std::size_t c = 0; c < data.classes.size(); ++c) {
                    Complex corr = 0.0;
                    for (int l = 0; l < data.dim; ++l)
                        corr += data.inv_at(c, j, i, l) * data.cup.pairing_inv(l, r);
                    v += weight[c] * corr;
                }
                m(j, r) = v;
            }
        out.push_back(m.transpose());
    }
    return out;
}

// Finite-difference flatness residual: max over directions of
//   || (F(t + h e_i) - F(t - h e_i)) / 2h + hbar Gamma_i(t) F(t) ||.
inline double nabla_residual(
    const std::function<CMatrix(const std::vector<Complex>&)>& frame,
    const std::function<std::vector<CMatrix>(const std::vector<Complex>&)>& gammas,
    const std::vector<Complex>& t, Complex hbar, double step = 1e-5) {
    if (t.empty()) throw std::invalid_argument("nabla_residual: empty parameter vector");
    const CMatrix f0 = frame(t);
    const std::vector<CMatrix> gs = gammas(t);
    if (gs.size() != t.size())
        throw std::invalid_argument(
            "nabla_residual: one connection matrix per direction required");
    double r = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::vector<Complex> tp = t, tm = t;
        tp[i] += step;
        tm[i] -= step;
        const CMatrix diff = (frame(tp) - frame(tm)) * Complex(1.0 / (2.0 * step), 0.0);
        r = std::max(r, (diff + hbar * (gs[i] * f0)).max_norm());
    }
    return r;
}

}  // namespace dubrovin
