#include "surgerykit/preformation.hpp"

#include <stdexcept>

namespace skit {

namespace {

mpz_class E(const Epsilon& e) { return mpz_class(e.value); }

}  // namespace

Diagnostics validate(const Preformation& z) {
    Diagnostics d;
    if (z.gamma.cols() != z.mu.cols() || z.mu.rows() != z.gamma.rows()) {
        d.fail("shape: gamma and mu must both map G into rank-F modules");
        return d;
    }
    if (z.theta.rows() != z.rankG() || z.theta.cols() != z.rankG()) {
        d.fail("shape: theta must be rankG x rankG");
        return d;
    }
    Mat gsm = (z.gamma.transpose() * z.mu).reduced(z.ring);
    Mat bil = (z.theta - E(z.eps) * z.theta.transpose()).reduced(z.ring);
    if (gsm != bil) d.fail("gamma^* mu != theta - eps theta^*");
    Mat skew = (gsm.transpose() + E(z.eps) * gsm).reduced(z.ring);
    if (!skew.is_zero()) d.fail("(gamma^* mu)^* != -eps gamma^* mu");
    return d;
}

Preformation flip(const Preformation& z) {
    return Preformation{z.ring, z.eps, (E(z.eps) * z.mu).reduced(z.ring), z.gamma,
                        (-z.theta).reduced(z.ring)};
}

Preformation direct_sum(const Preformation& a, const Preformation& b) {
    if (a.eps != b.eps || a.ring != b.ring)
        throw std::invalid_argument("direct_sum: eps/ring mismatch");
    return Preformation{a.ring, a.eps, Mat::direct_sum(a.gamma, b.gamma),
                        Mat::direct_sum(a.mu, b.mu), Mat::direct_sum(a.theta, b.theta)};
}

Preformation boundary_preformation(Epsilon eps, const Mat& theta, const BaseRing& ring) {
    if (!theta.is_square()) throw std::invalid_argument("boundary: theta must be square");
    Mat lam = (theta - E(eps) * theta.transpose()).reduced(ring);
    return Preformation{ring, eps, Mat::identity(theta.rows()), lam, theta};
}

Preformation trivial_formation(Epsilon eps, size_t k, const BaseRing& ring) {
    return Preformation{ring, eps, Mat::zero(k, k), Mat::identity(k), Mat::zero(k, k)};
}

Preformation hyperbolic_boundary(Epsilon eps, size_t k, const BaseRing& ring) {
    QuadForm h = hyperbolic_quadratic(-eps, k, ring);
    return boundary_preformation(eps, h.psi, ring);
}

Preformation stabilize(const Preformation& z, size_t k) {
    return direct_sum(z, hyperbolic_boundary(z.eps, k, z.ring));
}

bool is_formation(const Preformation& z) {
    Mat j = Mat::vstack(z.gamma, z.mu);
    QuadForm h = hyperbolic_quadratic(z.eps, z.rankF(), z.ring);
    return is_lagrangian(h, j).lagrangian;
}

bool check_strong_iso(const Preformation& z, const Preformation& zp, const StrongIso& s) {
    if (!is_unimodular(s.alpha, z.ring) || !is_unimodular(s.beta, z.ring)) return false;
    const BaseRing& R = z.ring;
    Mat a_inv_dual = inverse_unimodular(s.alpha).transpose();
    if ((s.alpha * z.gamma - zp.gamma * s.beta).reduced(R) != Mat::zero(zp.gamma.rows(), z.rankG()))
        return false;
    if ((a_inv_dual * z.mu - zp.mu * s.beta).reduced(R) != Mat::zero(zp.mu.rows(), z.rankG()))
        return false;
    // theta = theta' beta at the quadratic level: theta == beta^* theta' beta
    Mat t = (s.beta.transpose() * zp.theta * s.beta).reduced(R);
    return q_equal(z.theta, t, -z.eps, R);
}

bool check_weak_iso(const Preformation& z, const Preformation& zp, const WeakIso& w) {
    if (!is_unimodular(w.alpha, z.ring) || !is_unimodular(w.beta, z.ring)) return false;
    const BaseRing& R = z.ring;
    Mat a_inv_dual = inverse_unimodular(w.alpha).transpose();
    // (a) alpha gamma + alpha (nu - eps nu^*)^* mu = gamma' beta
    Mat corr = (w.nu - E(z.eps) * w.nu.transpose()).transpose();
    Mat lhs_a = (w.alpha * z.gamma + w.alpha * corr * z.mu).reduced(R);
    if (lhs_a != (zp.gamma * w.beta).reduced(R)) return false;
    // (b) alpha^{-*} mu = mu' beta
    if ((a_inv_dual * z.mu).reduced(R) != (zp.mu * w.beta).reduced(R)) return false;
    // (c) theta + mu^* nu mu = beta^* theta' beta in Q_{-eps}(G)
    Mat lhs_c = (z.theta + z.mu.transpose() * w.nu * z.mu).reduced(R);
    Mat rhs_c = (w.beta.transpose() * zp.theta * w.beta).reduced(R);
    return q_equal(lhs_c, rhs_c, -z.eps, R);
}

bool check_flip_iso(const Preformation& z, const FlipIso& t) {
    return check_weak_iso(z, flip(z), WeakIso{t.alpha, t.beta, t.nu});
}

ObstructionReport simple_obstructions(const Preformation& z) {
    ObstructionReport r;
    const BaseRing& R = z.ring;
    auto kergrp = [&](const Mat& A) {
        // ker(A)/im(0): free over Z, a genuine group over Z/n
        return homology(A, Mat::zero(A.cols(), 0), R);
    };
    Mat stack = Mat::vstack(z.gamma, z.mu);
    Mat gsm = (z.gamma.transpose() * z.mu).reduced(R);
    r.ker_gamma = kergrp(z.gamma);
    r.ker_mu = kergrp(z.mu);
    r.ker_stack = kergrp(stack);
    r.ker_gsm = kergrp(gsm);
    r.ker_gamma_dual = kergrp(z.gamma.transpose());
    r.coker_gamma = cokernel(z.gamma, R).group;
    r.coker_mu = cokernel(z.mu, R).group;
    r.coker_stack = cokernel(stack, R).group;
    r.coker_gsm = cokernel(gsm, R).group;
    r.coker_gamma_dual = cokernel(z.gamma.transpose(), R).group;
    r.rank_diff = static_cast<long>(z.rankG()) - static_cast<long>(z.rankF());
    r.rankF_mod2 = static_cast<int>(z.rankF() % 2);

    auto deny = [&](const std::string& why) {
        r.fails = true;
        r.reasons.push_back(why);
    };
    if (r.rankF_mod2 != 0) deny("rank F odd");
    if (r.ker_gamma != r.ker_mu) deny("ker gamma and ker mu differ");
    if (r.coker_gamma != r.coker_mu) deny("coker gamma and coker mu differ");
    if (r.ker_gsm != r.ker_gamma.direct_sum(r.ker_gamma_dual))
        deny("ker gamma^*mu != ker gamma + ker gamma^*");
    if (r.coker_gsm != r.coker_gamma.direct_sum(r.coker_gamma_dual))
        deny("coker gamma^*mu != coker gamma + coker gamma^*");
    return r;
}

bool is_elementary_wrt(const Preformation& z, const Mat& U) {
    const BaseRing& R = z.ring;
    if (U.rows() != z.rankG()) throw std::invalid_argument("is_elementary_wrt: U has wrong height");
    if (!R.is_modular() && rank(U) != U.cols()) return false;  // need independent columns
    Mat muj = (z.mu * U).reduced(R);
    Mat gj_dual = (z.gamma * U).reduced(R).transpose();  // (gamma j)^* : F^* -> U^*
    // injectivity of mu j
    if (kernel_basis(muj, R).cols() != 0) return false;
    // exactness at F^*: im(mu j) = ker((gamma j)^*) as submodules
    if (!(gj_dual * muj).reduced(R).is_zero()) return false;
    Mat ker = kernel_basis(gj_dual, R);
    if (R.is_modular()) {
        const Mat nI = Mat::scalar(z.rankF(), R.modulus);
        if (!same_column_lattice(Mat::hstack(muj, nI), Mat::hstack(ker, nI))) return false;
    } else {
        if (!same_column_lattice(muj, ker)) return false;
    }
    // surjectivity onto U^*
    if (!cokernel(gj_dual, R).group.is_trivial()) return false;
    // theta restricted to U vanishes in Q_{-eps}(U)
    Mat rest = (U.transpose() * z.theta * U).reduced(R);
    return q_equal(rest, Mat::zero(U.cols(), U.cols()), -z.eps, R);
}

ElementaryNormalForm elementary_normal_form(size_t u_rank, size_t r_rank, const Mat& sigma,
                                            const Mat& tau, const Mat& theta_prime, Epsilon eps,
                                            const BaseRing& ring) {
    if (sigma.rows() != u_rank || sigma.cols() != r_rank)
        throw std::invalid_argument("elementary_normal_form: sigma must be u x r");
    if (tau.rows() != u_rank || tau.cols() != r_rank)
        throw std::invalid_argument("elementary_normal_form: tau must be u x r");
    if (theta_prime.rows() != r_rank || theta_prime.cols() != r_rank)
        throw std::invalid_argument("elementary_normal_form: theta' must be r x r");
    Mat c1 = (tau.transpose() * sigma + E(eps) * sigma.transpose() * tau).reduced(ring);
    if (!c1.is_zero()) throw std::invalid_argument("elementary_normal_form: tau^* sigma != -eps sigma^* tau");
    Mat c2 = (sigma.transpose() * tau -
              (theta_prime - E(eps) * theta_prime.transpose())).reduced(ring);
    if (!c2.is_zero())
        throw std::invalid_argument("elementary_normal_form: theta' does not refine sigma^* tau");

    const size_t u = u_rank, r = r_rank;
    Mat gamma = Mat::from_blocks({u, u}, {u, r},
                                 {{Mat::identity(u), Mat::zero(u, r)}, {Mat::zero(u, u), sigma}});
    Mat mu = Mat::from_blocks({u, u}, {u, r},
                              {{Mat::zero(u, u), (-E(eps)) * sigma}, {Mat::identity(u), tau}});
    Mat theta = Mat::from_blocks({u, r}, {u, r},
                                 {{Mat::zero(u, u), (-E(eps)) * sigma},
                                  {Mat::zero(r, u), theta_prime}});

    ElementaryNormalForm nf;
    nf.u_rank = u;
    nf.r_rank = r;
    nf.z = Preformation{ring, eps, gamma.reduced(ring), mu.reduced(ring), theta.reduced(ring)};
    nf.h_lagrangian = Mat::vstack(Mat::identity(u), Mat::zero(r, u));
    Mat alpha = Mat::from_blocks(
        {u, u}, {u, u},
        {{Mat::zero(u, u), (-1) * Mat::identity(u)}, {(-E(eps)) * Mat::identity(u), Mat::zero(u, u)}});
    Mat beta = Mat::from_blocks({u, r}, {u, r},
                                {{(-1) * Mat::identity(u), -tau}, {Mat::zero(r, u), Mat::identity(r)}});
    nf.canonical_flip = FlipIso{alpha.reduced(ring), beta.reduced(ring), Mat::zero(2 * u, 2 * u)};
    return nf;
}

SearchResult elementary_search(const Preformation& z, long entry_bound, size_t k) {
    if (entry_bound < 1) throw std::invalid_argument("elementary_search: bound must be >= 1");
    Mat gsm = (z.gamma.transpose() * z.mu).reduced(z.ring);
    auto pair_ok = [&](const Mat& u, const Mat& v) {
        if (u == v) {
            Mat uu = (u.transpose() * z.theta * u).reduced(z.ring);
            return q_equal(uu, Mat::zero(1, 1), -z.eps, z.ring);
        }
        return (u.transpose() * gsm * v).reduced(z.ring).is_zero();
    };
    auto accept = [&](const Mat& U) { return is_elementary_wrt(z, U); };
    return sublattice_search(z.rankG(), entry_bound, k, accept, pair_ok);
}

Preformation transport(const Preformation& z, const Mat& alpha, const Mat& beta) {
    const BaseRing& R = z.ring;
    Mat binv = inverse_unimodular(beta);
    Mat binv_dual = binv.transpose();
    Mat a_inv_dual = inverse_unimodular(alpha).transpose();
    return Preformation{R, z.eps, (alpha * z.gamma * binv).reduced(R),
                        (a_inv_dual * z.mu * binv).reduced(R),
                        (binv_dual * z.theta * binv).reduced(R)};
}

}  // namespace skit
