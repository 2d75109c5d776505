#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace dubrovin;
using testsup::rand_matrix;
using testsup::rand_nilpotent;

TEST_CASE("matrix construction and indexing") {
    CMatrix m(2, 3);
    REQUIRE(m.rows() == 2);
    REQUIRE(m.cols() == 3);
    REQUIRE(m.max_norm() == 0.0);
    m(1, 2) = Complex(3.0, -4.0);
    REQUIRE(m(1, 2) == Complex(3.0, -4.0));
    REQUIRE(m.max_norm() == Catch::Approx(5.0));
    REQUIRE_THROWS_AS(m(2, 0), std::out_of_range);
    REQUIRE_THROWS_AS(m(0, 3), std::out_of_range);
    REQUIRE_THROWS_AS(CMatrix(0, 2), std::invalid_argument);

    const CMatrix id = CMatrix::identity(3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) REQUIRE(id(i, j) == (i == j ? 1.0 : 0.0));
}

TEST_CASE("arithmetic and shape rules") {
    const CMatrix a = rand_matrix(3, 3), b = rand_matrix(3, 3);
    REQUIRE(max_diff(a + b, b + a) == 0.0);
    REQUIRE(max_diff((a + b) - b, a) < 1e-15);
    REQUIRE(max_diff(Complex(2.0, 0.0) * a, a + a) < 1e-15);

    // product against hand-expanded entries
    CMatrix p(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) p(i, j) += a(i, k) * b(k, j);
    REQUIRE(max_diff(a * b, p) < 1e-15);

    const CMatrix r23 = rand_matrix(2, 3);
    REQUIRE_THROWS_AS(r23 + a, std::invalid_argument);
    REQUIRE_THROWS_AS(a * r23.transpose() * r23 * r23, std::invalid_argument);
}

TEST_CASE("transpose, antitranspose, basis reversal") {
    const CMatrix a = rand_matrix(4, 4), b = rand_matrix(4, 4);
    REQUIRE(max_diff(a.transpose().transpose(), a) == 0.0);
    REQUIRE(max_diff(anti_transpose(anti_transpose(a)), a) == 0.0);
    REQUIRE(max_diff(reverse_basis(reverse_basis(a)), a) == 0.0);

    // J X^T J spelled out with the antidiagonal permutation
    CMatrix j4(4, 4);
    for (int i = 0; i < 4; ++i) j4(i, 3 - i) = 1.0;
    REQUIRE(max_diff(anti_transpose(a), j4 * a.transpose() * j4) < 1e-15);
    REQUIRE(max_diff(reverse_basis(a), j4 * a * j4) < 1e-15);

    // antitransposition reverses products
    REQUIRE(max_diff(anti_transpose(a * b), anti_transpose(b) * anti_transpose(a)) <
            1e-14);
    REQUIRE_THROWS_AS(anti_transpose(rand_matrix(2, 3)), std::invalid_argument);
}

TEST_CASE("inverse") {
    CMatrix a = rand_matrix(5, 5);
    for (int i = 0; i < 5; ++i) a(i, i) += 3.0;  // keep it well conditioned
    REQUIRE(max_diff(a * a.inverse(), CMatrix::identity(5)) < 1e-13);
    REQUIRE(max_diff(a.inverse() * a, CMatrix::identity(5)) < 1e-13);

    CMatrix sing(2, 2);
    sing(0, 0) = 1.0;
    sing(0, 1) = 2.0;  // second row zero
    REQUIRE_THROWS_AS(sing.inverse(), std::runtime_error);
    REQUIRE_THROWS_AS(rand_matrix(2, 3).inverse(), std::invalid_argument);
}

TEST_CASE("elementary matrices are 1-based") {
    const CMatrix e = elementary(2, 3, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            REQUIRE(e(i, j) == ((i == 1 && j == 2) ? 1.0 : 0.0));
    REQUIRE_THROWS_AS(elementary(0, 1, 3), std::invalid_argument);
    REQUIRE_THROWS_AS(elementary(1, 4, 3), std::invalid_argument);
    // E^i_j E^k_l = delta_jk E^i_l
    REQUIRE(max_diff(elementary(1, 2, 3) * elementary(2, 3, 3), elementary(1, 3, 3)) ==
            0.0);
    REQUIRE((elementary(1, 2, 3) * elementary(3, 1, 3)).max_norm() == 0.0);
}

TEST_CASE("matrix exponential basics") {
    REQUIRE(max_diff(mat_exp(CMatrix(3, 3)), CMatrix::identity(3)) == 0.0);

    // diagonal case is the entrywise scalar exponential
    CMatrix d(3, 3);
    d(0, 0) = Complex(0.3, -1.2);
    d(1, 1) = Complex(-2.0, 0.4);
    d(2, 2) = 1.7;
    const CMatrix ed = mat_exp(d);
    for (int i = 0; i < 3; ++i) REQUIRE(std::abs(ed(i, i) - std::exp(d(i, i))) < 1e-13);
    REQUIRE(std::abs(ed(0, 1)) == 0.0);

    // nilpotent case is the finite Taylor polynomial
    const CMatrix n = rand_nilpotent(4);
    CMatrix poly = CMatrix::identity(4) + n + Complex(0.5, 0.0) * (n * n) +
                   Complex(1.0 / 6.0, 0.0) * (n * n * n);
    REQUIRE(max_diff(mat_exp(n), poly) < 1e-15);
}

TEST_CASE("matrix exponential properties") {
    const CMatrix a = rand_matrix(4, 4, 0.8);
    // exp(a) exp(-a) = 1
    REQUIRE(max_diff(mat_exp(a) * mat_exp(Complex(-1.0, 0.0) * a), CMatrix::identity(4)) <
            1e-13);
    // squaring consistency exercises the scaling path: exp(8a) = exp(a)^8
    CMatrix p = mat_exp(a);
    for (int i = 0; i < 3; ++i) p = p * p;
    REQUIRE(max_diff(mat_exp(Complex(8.0, 0.0) * a), p) < 1e-10);
    // transpose commutes with exp
    REQUIRE(max_diff(mat_exp(a.transpose()), mat_exp(a).transpose()) < 1e-13);

    REQUIRE_THROWS_AS(mat_exp(rand_matrix(2, 3)), std::invalid_argument);
    REQUIRE_THROWS_AS(mat_exp(a, 0.0), std::invalid_argument);
}

TEST_CASE("block matrix flatten and product") {
    BlockMatrix bm(2, 3, 2);
    bm.block(0, 1) = rand_matrix(2, 2);
    bm.block(1, 2) = rand_matrix(2, 2);
    const CMatrix flat = bm.flatten();
    REQUIRE(flat.rows() == 4);
    REQUIRE(flat.cols() == 6);
    REQUIRE(max_diff(extract_block(flat, 2, 1, 2), bm.block(0, 1)) == 0.0);
    REQUIRE(max_diff(extract_block(flat, 2, 2, 3), bm.block(1, 2)) == 0.0);
    REQUIRE(extract_block(flat, 2, 1, 1).max_norm() == 0.0);

    BlockMatrix other(3, 2, 2);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) other.block(i, j) = rand_matrix(2, 2);
    // block product agrees with the flattened product
    REQUIRE(max_diff((bm * other).flatten(), bm.flatten() * other.flatten()) < 1e-14);
    REQUIRE_THROWS_AS(other * other, std::invalid_argument);

    BlockMatrix sq(2, 2, 2);
    const CMatrix seed = rand_matrix(2, 2);
    sq.block(0, 0) = seed;
    sq.shift_diagonal(Complex(0.0, 2.5));
    REQUIRE(sq.block(0, 0)(0, 0) == seed(0, 0) + Complex(0.0, 2.5));
    REQUIRE(sq.block(0, 0)(0, 1) == seed(0, 1));
    REQUIRE(sq.block(1, 1)(0, 0) == Complex(0.0, 2.5));
    REQUIRE(sq.block(0, 1).max_norm() == 0.0);
}

TEST_CASE("block corner helpers match the full matrix") {
    BlockMatrix d(3, 3, 2);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) d.block(i, j) = rand_matrix(2, 2, 0.6);
    const Complex t(0.4, -0.3);

    const CMatrix full = mat_exp(d.flatten() * t);
    for (int r = 1; r <= 3; ++r)
        for (int c = 1; c <= 3; ++c)
            REQUIRE(max_diff(block_entry_exp(d, t, r, c), extract_block(full, 2, r, c)) <
                    1e-12);

    // powers with the 1/j! normalization
    const CMatrix f3 = d.flatten() * d.flatten() * d.flatten();
    REQUIRE(max_diff(block_entry_power(d, 3, 2, 1),
                     extract_block(f3, 2, 2, 1) * Complex(1.0 / 6.0, 0.0)) < 1e-14);
    REQUIRE(max_diff(block_entry_power(d, 0, 1, 1), CMatrix::identity(2)) == 0.0);
    REQUIRE_THROWS_AS(block_entry_power(d, -1, 1, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(extract_block(d.flatten(), 2, 4, 1), std::invalid_argument);
}

TEST_CASE("composition conventions") {
    // zero parts: exactly the empty composition of zero
    REQUIRE(compositions(0, 0).size() == 1);
    REQUIRE(compositions(0, 0)[0].empty());
    REQUIRE(compositions(0, 3).empty());
    // sum below the part count: none
    REQUIRE(compositions(3, 2).empty());
    REQUIRE(compositions(2, -1).empty());

    const auto c24 = compositions(2, 4);
    REQUIRE(c24 == std::vector<Composition>{{1, 3}, {2, 2}, {3, 1}});

    // counts against the closed form, and the callback agrees with the
    // materialized list
    for (int parts = 0; parts <= 5; ++parts)
        for (int total = 0; total <= 9; ++total) {
            const auto all = compositions(parts, total);
            REQUIRE(all.size() == composition_count(parts, total));
            std::size_t seen = 0;
            for_each_composition(parts, total, [&](const Composition& c) {
                REQUIRE(c == all[seen]);
                int s = 0;
                for (int v : c) {
                    REQUIRE(v >= 1);
                    s += v;
                }
                if (parts > 0) REQUIRE(s == total);
                ++seen;
            });
            REQUIRE(seen == all.size());
        }
    REQUIRE(composition_count(3, 10) == 36);  // binom(9, 2)
}
