#include "doctest.h"

#include <random>

#include "surgerykit/linalg.hpp"
#include "oracles.hpp"

using namespace skit;

TEST_CASE("smith_decompose: identity, fixed example, zero") {
    // I_3 -> (I, I, I)
    auto sd = smith_decompose(Mat::identity(3));
    CHECK(sd.S == Mat::identity(3));
    CHECK(sd.rank == 3);

    // [[2,4],[6,8]] -> diag(2,4); expected values frozen from the gcd-reduction oracle
    Mat A{{2, 4}, {6, 8}};
    auto f = oracle::invariant_factors(A);
    REQUIRE(f.size() == 2);
    CHECK(f[0] == 2);
    CHECK(f[1] == 4);
    auto sd2 = smith_decompose(A);
    CHECK(sd2.S(0, 0) == 2);
    CHECK(sd2.S(1, 1) == 4);
    CHECK(sd2.U * A * sd2.V == sd2.S);

    Mat Z{{0}};
    auto sd3 = smith_decompose(Z);
    CHECK(sd3.S == Z);
    CHECK(sd3.rank == 0);
}

TEST_CASE("smith_decompose: random matrices satisfy S = UAV, det +-1, chain") {
    std::mt19937_64 rng(12345);
    for (int t = 0; t < 60; ++t) {
        size_t m = 1 + (t % 5), n = 1 + ((t * 7 + 2) % 5);
        Mat A = oracle::random_matrix(rng, m, n);
        auto sd = smith_decompose(A);
        CHECK(sd.U * A * sd.V == sd.S);
        mpz_class du = det(sd.U), dv = det(sd.V);
        CHECK((du == 1 || du == -1));
        CHECK((dv == 1 || dv == -1));
        for (size_t i = 0; i + 1 < std::min(m, n); ++i) {
            if (sd.S(i + 1, i + 1) != 0) {
                REQUIRE(sd.S(i, i) != 0);
                CHECK(sd.S(i + 1, i + 1) % sd.S(i, i) == 0);
            }
        }
        for (size_t i = 0; i < m; ++i)
            for (size_t j = 0; j < n; ++j)
                if (i != j) CHECK(sd.S(i, j) == 0);
        // against the independent oracle
        auto f = oracle::invariant_factors(A);
        size_t k = 0;
        for (size_t i = 0; i < std::min(m, n); ++i)
            if (sd.S(i, i) != 0) {
                REQUIRE(k < f.size());
                CHECK(sd.S(i, i) == f[k]);
                ++k;
            }
    }
}

TEST_CASE("kernel_basis: examples and saturation") {
    // [2 4] -> basis {(2,-1)}
    Mat A{{2, 4}};
    Mat K = kernel_basis(A);
    REQUIRE(K.cols() == 1);
    CHECK((A * K).is_zero());
    // same lattice as the brute-force kernel vectors
    Mat bf = oracle::kernel_vectors_bruteforce(A, 4);
    CHECK(same_column_lattice(K, hermite_column_basis(bf)));
    // and saturated: (2,-1) primitive
    CHECK(same_column_lattice(K, Mat{{2}, {-1}}));

    // invertible square -> empty basis
    CHECK(kernel_basis(Mat{{1, 1}, {0, 1}}).cols() == 0);

    // zero m x n map -> identity n x n lattice
    CHECK(same_column_lattice(kernel_basis(Mat::zero(2, 3)), Mat::identity(3)));
}

TEST_CASE("cokernel: examples") {
    auto c1 = cokernel(Mat{{2}});
    CHECK(c1.group.free_rank == 0);
    REQUIRE(c1.group.torsion.size() == 1);
    CHECK(c1.group.torsion[0] == 2);

    // diag(2,3) -> Z/6 (oracle: invariant factors 1, 6)
    Mat d23{{2, 0}, {0, 3}};
    auto f = oracle::invariant_factors(d23);
    REQUIRE(f.size() == 2);
    CHECK(f[0] == 1);
    CHECK(f[1] == 6);
    auto c2 = cokernel(d23);
    REQUIRE(c2.group.torsion.size() == 1);
    CHECK(c2.group.torsion[0] == 6);

    // 0 x 1 map into Z^1 -> free rank 1
    auto c3 = cokernel(Mat::zero(1, 0));
    CHECK(c3.group.free_rank == 1);
    CHECK(c3.group.torsion.empty());
}

TEST_CASE("cokernel invariant factors equal nontrivial SNF diagonal") {
    std::mt19937_64 rng(777);
    for (int t = 0; t < 40; ++t) {
        Mat A = oracle::random_matrix(rng, 1 + t % 4, 1 + (t * 3) % 4);
        auto sd = smith_decompose(A);
        auto ck = cokernel(A);
        std::vector<mpz_class> want;
        for (size_t i = 0; i < std::min(A.rows(), A.cols()); ++i)
            if (sd.S(i, i) > 1) want.push_back(sd.S(i, i));
        CHECK(ck.group.torsion == want);
        // projection data: gen_rows * (columns of A) must vanish in the group
        Mat proj = ck.gen_rows * A;
        for (size_t k = 0; k < ck.group.torsion.size(); ++k)
            for (size_t j = 0; j < A.cols(); ++j)
                CHECK(proj(k, j) % ck.group.torsion[k] == 0);
        for (size_t k = ck.group.torsion.size(); k < proj.rows(); ++k)
            for (size_t j = 0; j < A.cols(); ++j) CHECK(proj(k, j) == 0);
    }
}

TEST_CASE("solve_with_denominator: examples and exponent divisibility") {
    auto s1 = solve_with_denominator(Mat{{2}}, Mat{{1}});
    REQUIRE(s1);
    CHECK(s1->s == 2);
    CHECK(Mat{{2}} * s1->g == mpz_class(2) * Mat{{1}});

    // A = diag(2,3), y = (1,1): s = 6, g = (3,2)  [oracle: try s = 1..det]
    Mat A{{2, 0}, {0, 3}};
    Mat y{{1}, {1}};
    CHECK(oracle::min_denominator_bruteforce(A, y, 6) == 6);
    auto s2 = solve_with_denominator(A, y);
    REQUIRE(s2);
    CHECK(s2->s == 6);
    CHECK(A * s2->g == mpz_class(6) * y);
    CHECK(s2->g == Mat{{3}, {2}});

    // invertible over Z -> s = 1
    auto s3 = solve_with_denominator(Mat{{1, 1}, {0, 1}}, Mat{{5}, {7}});
    REQUIRE(s3);
    CHECK(s3->s == 1);

    // no solution when y outside the rational span
    CHECK_FALSE(solve_with_denominator(Mat::zero(1, 1), Mat{{1}}).has_value());

    // s divides the exponent of the cokernel when finite
    std::mt19937_64 rng(4242);
    for (int t = 0; t < 40; ++t) {
        size_t n = 1 + t % 3;
        Mat M = oracle::random_matrix(rng, n, n);
        if (det(M) == 0) continue;
        Mat v = oracle::random_matrix(rng, n, 1, -3, 3);
        auto s = solve_with_denominator(M, v);
        REQUIRE(s);
        mpz_class e = cokernel(M).group.exponent();
        CHECK(e % s->s == 0);
    }
}

TEST_CASE("is_split_injection") {
    CHECK(is_split_injection(Mat{{1}, {0}}));
    CHECK_FALSE(is_split_injection(Mat{{2}}));
    // diag(1,3): SNF oracle says invariant factors (1,3) -> not split
    auto f = oracle::invariant_factors(Mat{{1, 0}, {0, 3}});
    CHECK(f == std::vector<mpz_class>{1, 3});
    CHECK_FALSE(is_split_injection(Mat{{1, 0}, {0, 3}}));
}

TEST_CASE("homology: examples, exact pairs, error path") {
    // B = 0, A = 0 on Z^1 -> Z
    auto h1 = homology(Mat::zero(0, 1), Mat::zero(1, 0));
    CHECK(h1.free_rank == 1);

    // B = 0 (0 x 1), A = [2] -> Z/2
    auto h2 = homology(Mat::zero(0, 1), Mat{{2}});
    CHECK(h2 == FinAbGroup{0, {2}});

    // B = [1,0], A = (0,1)^T -> 0
    auto h3 = homology(Mat{{1, 0}}, Mat{{0}, {1}});
    CHECK(h3.is_trivial());

    CHECK_THROWS(homology(Mat{{1}}, Mat{{1}}));

    // spliced exact pairs have trivial homology: 0 -> Z^k =U= Z^k -> 0
    std::mt19937_64 rng(99);
    for (int t = 0; t < 20; ++t) {
        size_t k = 1 + t % 3;
        Mat U = oracle::random_unimodular(rng, 2 * k);
        // A: Z^k -> Z^2k first k columns of U; B: Z^2k -> Z^k kills exactly im(A)
        Mat A = U.submatrix(0, 0, 2 * k, k);
        Mat Uinv = inverse_unimodular(U);
        Mat B = Uinv.submatrix(k, 0, k, 2 * k);
        REQUIRE((B * A).is_zero());
        CHECK(homology(B, A).is_trivial());
    }
}

TEST_CASE("modular rings: kernel, cokernel, homology lift to Z") {
    BaseRing z4 = BaseRing::Zmod(4);
    Mat A{{2}};
    Mat K = kernel_basis(A, z4);
    REQUIRE(K.cols() == 1);
    CHECK(K(0, 0) == 2);

    auto ck = cokernel(A, z4);  // (Z/4)/(2) = Z/2
    CHECK(ck.group == FinAbGroup{0, {2}});

    // over F_5, [2] is invertible: trivial kernel and cokernel
    BaseRing f5 = BaseRing::Fp(5);
    CHECK(kernel_basis(A, f5).cols() == 0);
    CHECK(cokernel(A, f5).group.is_trivial());

    // homology over Z/4 of 0 -> Z/4 --2--> Z/4: ker(2)/0 = Z/2
    auto h = homology(Mat::zero(0, 1), Mat::zero(1, 0), z4);
    CHECK(h == FinAbGroup{0, {4}});
    auto h2 = homology(Mat{{2}}, Mat::zero(1, 0), z4);
    CHECK(h2 == FinAbGroup{0, {2}});
}

TEST_CASE("hermite/lattice utilities") {
    std::mt19937_64 rng(31337);
    for (int t = 0; t < 30; ++t) {
        size_t m = 2 + t % 3, k = 1 + t % m;
        Mat A = oracle::random_matrix(rng, m, k, -4, 4);
        Mat U = oracle::random_unimodular(rng, k);
        CHECK(same_column_lattice(A, A * U));
        Mat sat = saturate_lattice(A);
        CHECK(lattice_contains(sat, A));
    }
    Mat P{{1, 0}, {0, 1}, {0, 0}};
    Mat C = complement_of_summand(P);
    CHECK(is_unimodular(Mat::hstack(P, C)));
}
