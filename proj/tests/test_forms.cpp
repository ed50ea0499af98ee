#include "doctest.h"

#include <random>

#include "surgerykit/forms.hpp"
#include "oracles.hpp"

using namespace skit;

namespace {

// E8: standard even unimodular Gram matrix (signature 8); quadratic
// representative takes the upper triangle with half the diagonal.
Mat e8_gram() {
    Mat g{{2, -1, 0, 0, 0, 0, 0, 0},
          {-1, 2, -1, 0, 0, 0, 0, 0},
          {0, -1, 2, -1, 0, 0, 0, 0},
          {0, 0, -1, 2, -1, 0, 0, 0},
          {0, 0, 0, -1, 2, -1, 0, -1},
          {0, 0, 0, 0, -1, 2, -1, 0},
          {0, 0, 0, 0, 0, -1, 2, 0},
          {0, 0, 0, 0, -1, 0, 0, 2}};
    return g;
}

Mat quadratic_rep_of_even(const Mat& gram) {
    Mat psi(gram.rows(), gram.cols());
    for (size_t i = 0; i < gram.rows(); ++i) {
        psi(i, i) = gram(i, i) / 2;
        for (size_t j = i + 1; j < gram.cols(); ++j) psi(i, j) = gram(i, j);
    }
    return psi;
}

}  // namespace

TEST_CASE("q_equal over Z") {
    CHECK(q_equal(Mat{{0, 1}, {0, 0}}, Mat{{0, 0}, {1, 0}}, EPS_PLUS));
    CHECK_FALSE(q_equal(Mat{{1}}, Mat{{0}}, EPS_MINUS));  // odd diagonal
    CHECK(q_equal(Mat{{3, 1}, {2, 5}}, Mat{{3, 1}, {2, 5}}, EPS_PLUS));
    CHECK(q_equal(Mat{{3, 1}, {2, 5}}, Mat{{3, 1}, {2, 5}}, EPS_MINUS));
    CHECK_THROWS(q_equal(Mat{{1}}, Mat::identity(2), EPS_PLUS));

    // the characterization over Z: eps=+1 difference skew; eps=-1 difference
    // symmetric with even diagonal
    CHECK(q_equal(Mat{{0, 2}, {-1, 0}}, Mat{{0, 1}, {0, 0}}, EPS_PLUS));
    CHECK(q_equal(Mat{{2, 1}, {1, 4}}, Mat{{0, 1}, {1, 0}}, EPS_MINUS));
    CHECK_FALSE(q_equal(Mat{{0, 1}, {1, 0}}, Mat::zero(2, 2), EPS_PLUS));
}

TEST_CASE("q_solve / q_solve_plus roundtrip") {
    std::mt19937_64 rng(2024);
    for (int t = 0; t < 40; ++t) {
        Epsilon eps = (t % 2) ? EPS_PLUS : EPS_MINUS;
        size_t n = 1 + t % 3;
        Mat chi = oracle::random_matrix(rng, n, n);
        Mat d = chi - mpz_class(eps.value) * chi.transpose();
        auto back = q_solve(d, eps);
        REQUIRE(back);
        CHECK(*back - mpz_class(eps.value) * back->transpose() == d);
        Mat dp = chi + mpz_class(eps.value) * chi.transpose();
        auto backp = q_solve_plus(dp, eps);
        REQUIRE(backp);
        CHECK(*backp + mpz_class(eps.value) * backp->transpose() == dp);
    }
}

TEST_CASE("symmetrize: hyperbolic, zero, representative independence") {
    for (Epsilon eps : {EPS_PLUS, EPS_MINUS}) {
        QuadForm h = hyperbolic_quadratic(eps, 1);
        CHECK(h.psi == Mat{{0, 1}, {0, 0}});
        SymForm s = symmetrize(h);
        CHECK(s.phi == Mat{{0, 1}, {eps.value, 0}});

        QuadForm z{BaseRing::Z(), eps, Mat::zero(2, 2)};
        CHECK(symmetrize(z).phi.is_zero());

        std::mt19937_64 rng(55 + eps.value);
        for (int t = 0; t < 20; ++t) {
            Mat psi = oracle::random_matrix(rng, 3, 3);
            Mat chi = oracle::random_matrix(rng, 3, 3);
            QuadForm a{BaseRing::Z(), eps, psi};
            QuadForm b{BaseRing::Z(), eps, psi + chi - mpz_class(eps.value) * chi.transpose()};
            CHECK(symmetrize(a).phi == symmetrize(b).phi);
        }
    }
}

TEST_CASE("hyperbolic forms") {
    CHECK(hyperbolic_quadratic(EPS_PLUS, 0).rank() == 0);
    QuadForm h = hyperbolic_symmetric(EPS_PLUS, 1, Mat{{0}});
    CHECK(h.psi == Mat{{0, 1}, {1, 0}});
    // H^eps(L, phi) = [[0,1],[eps,phi]] with phi (-eps)-symmetric; over Z a
    // 1x1 (-1)-symmetric phi must vanish, so exercise the +- cases that exist
    QuadForm hm = hyperbolic_symmetric(EPS_MINUS, 1, Mat{{3}});
    CHECK(hm.psi == Mat{{0, 1}, {-1, 3}});
    CHECK_THROWS(hyperbolic_symmetric(EPS_PLUS, 1, Mat{{3}}));
}

TEST_CASE("is_lagrangian") {
    for (Epsilon eps : {EPS_PLUS, EPS_MINUS}) {
        // first summand of H_eps(L) is a lagrangian, ranks 1..4
        for (size_t k = 1; k <= 4; ++k) {
            QuadForm h = hyperbolic_quadratic(eps, k);
            Mat j(2 * k, k);
            for (size_t i = 0; i < k; ++i) j(i, i) = 1;
            auto st = is_lagrangian(h, j);
            CHECK(st.sublagrangian);
            CHECK(st.lagrangian);
        }
    }

    // diagonal {(x,x)} in (K,theta) + (K,-theta)
    std::mt19937_64 rng(808);
    for (int t = 0; t < 15; ++t) {
        Epsilon eps = (t % 2) ? EPS_PLUS : EPS_MINUS;
        size_t k = 1 + t % 3;
        Mat theta = oracle::random_matrix(rng, k, k);
        QuadForm q{BaseRing::Z(), eps,
                   Mat::direct_sum(theta, -theta)};
        Mat diag(2 * k, k);
        for (size_t i = 0; i < k; ++i) {
            diag(i, i) = 1;
            diag(k + i, i) = 1;
        }
        // annihilator computed through kernel_basis inside is_lagrangian
        auto st = is_lagrangian(q, diag);
        CHECK(st.sublagrangian);
        // lagrangian iff the symmetrization of theta is nonsingular
        Mat lam = theta + mpz_class(eps.value) * theta.transpose();
        if (det(lam) != 0) CHECK(st.lagrangian);
    }

    // span{(2,1)} in H_{+1}(Z): not a sublagrangian (not split, pairing odd)
    auto st = is_lagrangian(hyperbolic_quadratic(EPS_PLUS, 1), Mat{{2}, {1}});
    CHECK_FALSE(st.sublagrangian);
}

TEST_CASE("arf_invariant") {
    BaseRing f2 = BaseRing::Fp(2);
    CHECK(arf_invariant(QuadForm{f2, EPS_PLUS, Mat{{0, 1}, {0, 0}}}) == 0);
    // [[1,1],[0,1]]: enumerate all 4 vectors, only x=0 vanishes -> Arf 1
    {
        int zeros = 0;
        Mat psi{{1, 1}, {0, 1}};
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                long v = a * 1 + a * b * 1 + b * 1;
                if (v % 2 == 0) ++zeros;
            }
        CHECK(zeros == 1);
        CHECK(arf_invariant(QuadForm{f2, EPS_PLUS, psi}) == 1);
    }
    // direct sum of two Arf-1 forms has Arf 0 (exhaustive over F_2^4)
    Mat a1{{1, 1}, {0, 1}};
    QuadForm sum{f2, EPS_PLUS, Mat::direct_sum(a1, a1)};
    CHECK(arf_invariant(sum) == 0);
    CHECK_THROWS(arf_invariant(QuadForm{f2, EPS_PLUS, Mat{{1, 0}, {0, 1}}}));

    // additivity mod 2, exhaustive-ish over small forms, 2g <= 6
    std::mt19937_64 rng(99);
    for (int t = 0; t < 25; ++t) {
        Mat p1 = oracle::random_matrix(rng, 2, 2, 0, 1);
        Mat p2 = oracle::random_matrix(rng, 2 + 2 * (t % 2), 2 + 2 * (t % 2), 0, 1);
        QuadForm q1{f2, EPS_PLUS, p1}, q2{f2, EPS_PLUS, p2};
        int a1v, a2v;
        try {
            a1v = arf_invariant(q1);
            a2v = arf_invariant(q2);
        } catch (const std::invalid_argument&) {
            continue;  // singular sample
        }
        QuadForm s{f2, EPS_PLUS, Mat::direct_sum(p1, p2)};
        CHECK(arf_invariant(s) == (a1v + a2v) % 2);
    }
}

TEST_CASE("signature: exact, matches principal-minor oracle") {
    CHECK(signature(Mat{{2}}) == 1);
    CHECK(signature(Mat{{0, 1}, {1, 0}}) == 0);
    CHECK(det(e8_gram()) == 1);
    CHECK(signature(e8_gram()) == 8);
    CHECK(oracle::signature_principal_minors(e8_gram()) == 8);

    std::mt19937_64 rng(5150);
    for (int t = 0; t < 30; ++t) {
        size_t n = 1 + t % 4;
        Mat a = oracle::random_matrix(rng, n, n, -3, 3);
        Mat s = a + a.transpose();
        long got = signature(s);
        try {
            long want = oracle::signature_principal_minors(s);
            CHECK(got == want);
        } catch (const std::runtime_error&) {
            // oracle needs nonzero principal minors; skip ties
        }
    }
}

TEST_CASE("witt_class_Z") {
    // hyperbolics vanish
    for (size_t k = 1; k <= 3; ++k)
        CHECK(witt_class_Z(hyperbolic_quadratic(EPS_PLUS, k)).value == 0);

    // E8 -> 1 (signature 8, verified exactly above)
    QuadForm e8{BaseRing::Z(), EPS_PLUS, quadratic_rep_of_even(e8_gram())};
    CHECK(witt_class_Z(e8).value == 1);

    // theta = [[1,1],[0,1]], eps=-1 -> Arf 1
    QuadForm arf1{BaseRing::Z(), EPS_MINUS, Mat{{1, 1}, {0, 1}}};
    CHECK(witt_class_Z(arf1).value == 1);

    // additive under direct sum; vanishes on hyperbolics (ranks <= 6)
    std::mt19937_64 rng(31415);
    for (int t = 0; t < 10; ++t) {
        QuadForm a = hyperbolic_quadratic(EPS_PLUS, 1 + t % 2);
        QuadForm b = e8;
        CHECK(witt_class_Z(a.direct_sum(b)).value ==
              witt_class_Z(a).value + witt_class_Z(b).value);
    }

    CHECK_THROWS(witt_class_Z(QuadForm{BaseRing::Z(), EPS_PLUS, Mat{{1}}}));
}

TEST_CASE("lagrangian_search") {
    // H_{+1}(Z), B=1: finds the standard lagrangian
    auto r = lagrangian_search(hyperbolic_quadratic(EPS_PLUS, 1), 1, 1);
    REQUIRE(r.found);
    CHECK(is_lagrangian(hyperbolic_quadratic(EPS_PLUS, 1), r.witness).lagrangian);

    // Arf-1 obstruction: no lagrangian within bound 2
    QuadForm arf1{BaseRing::Z(), EPS_MINUS, Mat{{1, 1}, {0, 1}}};
    CHECK_FALSE(lagrangian_search(arf1, 2, 1).found);

    // (K,theta) + (K,-theta) at B=1 finds the diagonal (or an equivalent)
    std::mt19937_64 rng(2718);
    for (int t = 0; t < 8; ++t) {
        Epsilon eps = (t % 2) ? EPS_PLUS : EPS_MINUS;
        Mat theta = oracle::random_matrix(rng, 1, 1, -1, 1);
        Mat lam = theta + mpz_class(eps.value) * theta.transpose();
        if (det(lam) == 0) continue;
        QuadForm q{BaseRing::Z(), eps, Mat::direct_sum(theta, -theta)};
        auto res = lagrangian_search(q, 1, 1);
        REQUIRE(res.found);
        CHECK(is_lagrangian(q, res.witness).lagrangian);
    }
}
