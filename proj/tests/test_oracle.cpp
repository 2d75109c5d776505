#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace dubrovin;
using testsup::rand_complex;
using testsup::rand_matrix;

namespace {

ExpOdeSystem scalar_system(Complex a, Complex c) {
    ExpOdeSystem sys;
    sys.dim = 1;
    sys.A = CMatrix(1, 1);
    sys.A(0, 0) = a;
    CMatrix cm(1, 1);
    cm(0, 0) = c;
    sys.terms.push_back({1, cm});
    sys.side = Side::left;
    return sys;
}

Complex scalar_exact(Complex a, Complex c, Complex t) {
    return std::exp(a * t + c * (std::exp(t) - 1.0));
}

}  // namespace

TEST_CASE("constant-coefficient runs reduce to the matrix exponential") {
    const CMatrix a = rand_matrix(3, 3, 0.8);
    ExpOdeSystem sys;
    sys.dim = 3;
    sys.A = a;
    for (Side side : {Side::left, Side::right}) {
        sys.side = side;
        const Complex t(0.7, -0.4);
        const RkResult r = rk_solve(sys, {t, 512});
        REQUIRE(max_diff(r.value, mat_exp(a * t)) < 1e-12);
        REQUIRE(r.error_estimate < 1e-12);
    }
}

TEST_CASE("fourth-order convergence on the scalar model") {
    const Complex a(0.31, 0.2), c(0.4, -0.1);
    const ExpOdeSystem sys = scalar_system(a, c);
    const Complex t(1.2, 0.0);
    const Complex exact = scalar_exact(a, c, t);

    auto err = [&](int steps) {
        return std::abs(rk_solve(sys, {t, steps}).value(0, 0) - exact);
    };
    const double e16 = err(16), e32 = err(32), e64 = err(64);
    REQUIRE(e16 > 1e-12);  // errors resolvable above roundoff
    REQUIRE(e16 / e32 > 8.0);
    REQUIRE(e16 / e32 < 32.0);
    REQUIRE(e32 / e64 > 8.0);
    REQUIRE(e32 / e64 < 32.0);
}

TEST_CASE("step-doubling estimate brackets the true error") {
    const Complex a(0.31, 0.2), c(0.4, -0.1);
    const ExpOdeSystem sys = scalar_system(a, c);
    const Complex t(1.5, 0.3);
    const Complex exact = scalar_exact(a, c, t);
    for (int steps : {16, 32, 64}) {
        const RkResult r = rk_solve(sys, {t, steps});
        const double actual = std::abs(r.value(0, 0) - exact);
        REQUIRE(actual < 10.0 * r.error_estimate + 1e-13);
        REQUIRE(r.error_estimate < 100.0 * actual + 1e-13);
    }
}

TEST_CASE("the integration side is honored") {
    // non-commuting coefficients: left and right fundamental solutions differ,
    // and transposing the system swaps them
    const CMatrix a = rand_matrix(3, 3, 0.9), c = rand_matrix(3, 3, 0.9);
    ExpOdeSystem left;
    left.dim = 3;
    left.A = a;
    left.terms.push_back({1, c});
    left.side = Side::left;

    ExpOdeSystem right_t;
    right_t.dim = 3;
    right_t.A = a.transpose();
    right_t.terms.push_back({1, c.transpose()});
    right_t.side = Side::right;

    ExpOdeSystem right = left;
    right.side = Side::right;

    const Complex t(0.8, 0.2);
    const CMatrix bl = rk_solve(left, {t, 512}).value;
    const CMatrix br_t = rk_solve(right_t, {t, 512}).value;
    const CMatrix br = rk_solve(right, {t, 512}).value;
    REQUIRE(max_diff(bl, br_t.transpose()) < 1e-10);
    REQUIRE(max_diff(bl, br) > 1e-3);
}

TEST_CASE("argument and tolerance failures") {
    const ExpOdeSystem sys = scalar_system(Complex(0.2, 0.1), Complex(0.3, 0.0));
    REQUIRE_THROWS_AS(rk_solve(sys, {Complex(0.5, 0.0), 8}), std::invalid_argument);

    ExpOdeSystem bad = sys;
    bad.terms[0].exponent = -1;
    REQUIRE_THROWS_AS(rk_solve(bad, {Complex(0.5, 0.0), 64}), std::invalid_argument);

    try {
        rk_integrate(sys, {Complex(2.0, 0.0), 16}, 1e-30);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        REQUIRE(e.partial.rows() == 1);
        REQUIRE(e.tail > 1e-30);
        const Complex exact =
            scalar_exact(Complex(0.2, 0.1), Complex(0.3, 0.0), Complex(2.0, 0.0));
        REQUIRE(std::abs(e.partial(0, 0) - exact) < 0.05 * std::abs(exact));
    }

    REQUIRE_NOTHROW(rk_integrate(sys, {Complex(0.5, 0.0), 256}, 1e-8));
}

TEST_CASE("polynomial-coefficient oracle") {
    // scalar closed form: B = exp(a t + sum_n c_n t^{n+1} / (n+1))
    CMatrix a(1, 1);
    a(0, 0) = rand_complex();
    std::vector<CMatrix> cs;
    std::vector<Complex> cv;
    for (int n = 1; n <= 3; ++n) {
        CMatrix c(1, 1);
        c(0, 0) = rand_complex();
        cs.push_back(c);
        cv.push_back(c(0, 0));
    }
    const Complex t(0.6, -0.3);
    Complex phase = a(0, 0) * t;
    Complex tp = t;
    for (int n = 1; n <= 3; ++n) {
        tp *= t;
        phase += cv[static_cast<std::size_t>(n) - 1] * tp / double(n + 1);
    }
    const RkResult r = rk_solve_poly(a, cs, {t, 256});
    REQUIRE(std::abs(r.value(0, 0) - std::exp(phase)) < 1e-12);

    REQUIRE_THROWS_AS(rk_solve_poly(rand_matrix(2, 3), cs, {t, 64}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(rk_solve_poly(a, cs, {t, 4}), std::invalid_argument);
    REQUIRE_THROWS_AS(rk_integrate_poly(a, cs, {Complex(4.0, 0.0), 16}, 1e-30),
                      ConvergenceError);
}
