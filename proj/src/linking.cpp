#include "surgerykit/linking.hpp"

#include <stdexcept>

namespace skit {

namespace {

mpz_class E(const Epsilon& e) { return mpz_class(e.value); }

mpq_class frac(const mpz_class& num, const mpz_class& den) {
    mpq_class q(num, den);
    q.canonicalize();
    return q;
}

struct LinkingMaps {
    Mat carrier;  // the S-isomorphism whose cokernel carries the form
    // lambda(x, y) = sign * x^T (pair_with * g) / s  for carrier * g = s * y
    Mat pair_with;
    mpz_class sign;
    mpz_class nu_sign;
};

LinkingMaps pick_maps(const Preformation& z, LinkingPick which) {
    switch (which) {
        case LinkingPick::Mu:
            return LinkingMaps{z.mu, z.gamma, 1, 1};
        case LinkingPick::Gamma:
            return LinkingMaps{z.gamma, z.mu, E(z.eps), -1};
        case LinkingPick::GammaStarMu:
            return LinkingMaps{(z.gamma.transpose() * z.mu), Mat::identity(z.rankG()), 1, 1};
    }
    throw std::logic_error("pick_maps");
}

}  // namespace

QmodZ LinkingForm::pairing(const std::vector<mpz_class>& x, const std::vector<mpz_class>& y) const {
    QmodZ out;
    const size_t k = gens();
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) out = out + lambda[i][j].scaled(x[i] * y[j]);
    return out;
}

QmodZ LinkingForm::refinement(const std::vector<mpz_class>& x) const {
    QmodZ out;
    const size_t k = gens();
    for (size_t i = 0; i < k; ++i) out = out + nu[i].scaled(x[i] * x[i]);
    for (size_t i = 0; i < k; ++i)
        for (size_t j = i + 1; j < k; ++j) out = out + lambda[i][j].scaled(x[i] * x[j]);
    return out;
}

bool s_iso_check(const Mat& A) {
    // rationally invertible over Z: square with nonzero determinant,
    // equivalently injective with finite cokernel
    return A.is_square() && det(A) != 0;
}

LinkingForm linking_of(const Preformation& z, LinkingPick which) {
    if (z.ring.is_modular())
        throw std::invalid_argument("linking_of: defined over (Z, Z \\ {0}) only");
    LinkingMaps maps = pick_maps(z, which);
    if (!s_iso_check(maps.carrier)) throw std::invalid_argument("linking_of: map is not an S-isomorphism");

    Cokernel ck = cokernel(maps.carrier);
    LinkingForm L;
    L.group = ck.group;
    L.generator_lifts = ck.lifts;
    L.eps_link = -z.eps;
    const size_t k = L.gens();

    // solve carrier * g = s * y for each generator lift y
    std::vector<mpz_class> s(k);
    std::vector<Mat> g(k);
    for (size_t j = 0; j < k; ++j) {
        auto sol = solve_with_denominator(maps.carrier, ck.lifts.col(j));
        if (!sol) throw std::logic_error("linking_of: generator not in rational span");
        s[j] = sol->s;
        g[j] = sol->g;
    }

    L.lambda.assign(k, std::vector<QmodZ>(k));
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) {
            Mat w = maps.pair_with * g[j];
            mpz_class num = 0;
            for (size_t r = 0; r < w.rows(); ++r) num += ck.lifts(r, i) * w(r, 0);
            L.lambda[i][j] = QmodZ(frac(maps.sign * num, s[j]));
        }
    if (L.has_refinement()) {
        L.nu.resize(k);
        for (size_t j = 0; j < k; ++j) {
            Mat q = g[j].transpose() * z.theta * g[j];
            L.nu[j] = QmodZ(frac(maps.nu_sign * q(0, 0), s[j] * s[j]));
        }
    }

    // --- well-definedness, verified on every construction ---
    // (-eps)-symmetry of the table
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j)
            if (L.lambda[i][j] != L.lambda[j][i].scaled(E(L.eps_link)))
                throw std::logic_error("linking_of: table is not (-eps)-symmetric");
    // vanishing on d_j * g_j via a fresh solve
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) {
            Mat y = L.group.torsion[j] * ck.lifts.col(j);
            auto sol = solve_with_denominator(maps.carrier, y);
            if (!sol) throw std::logic_error("linking_of: re-solve failed");
            Mat w = maps.pair_with * sol->g;
            mpz_class num = 0;
            for (size_t r = 0; r < w.rows(); ++r) num += ck.lifts(r, i) * w(r, 0);
            if (!QmodZ(frac(maps.sign * num, sol->s)).is_zero())
                throw std::logic_error("linking_of: table does not kill d_j g_j");
        }
    // independence of the (s, g) choice: recompute with (2s, 2g)
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) {
            Mat w = maps.pair_with * (mpz_class(2) * g[j]);
            mpz_class num = 0;
            for (size_t r = 0; r < w.rows(); ++r) num += ck.lifts(r, i) * w(r, 0);
            if (L.lambda[i][j] != QmodZ(frac(maps.sign * num, 2 * s[j])))
                throw std::logic_error("linking_of: lambda depends on the (s,g) choice");
        }
    if (L.has_refinement()) {
        // refinement law (c): (1+T)nu(x) = lambda(x,x)
        for (size_t j = 0; j < k; ++j)
            if (L.nu[j].scaled(2) != L.lambda[j][j])
                throw std::logic_error("linking_of: refinement law fails");
        // independence of (s, g) for nu
        for (size_t j = 0; j < k; ++j) {
            Mat twog = mpz_class(2) * g[j];
            Mat q = twog.transpose() * z.theta * twog;
            if (L.nu[j] != QmodZ(frac(maps.nu_sign * q(0, 0), 4 * s[j] * s[j])))
                throw std::logic_error("linking_of: nu depends on the (s,g) choice");
        }
    }
    return L;
}

namespace {

// the subgroup morphism/iso machinery on invariant-factor coordinates
bool is_group_morphism(const Mat& l, const FinAbGroup& from, const FinAbGroup& to) {
    for (size_t i = 0; i < from.torsion.size(); ++i)
        for (size_t j = 0; j < to.torsion.size(); ++j)
            if ((from.torsion[i] * l(j, i)) % to.torsion[j] != 0) return false;
    return true;
}

bool is_group_iso(const Mat& l, const FinAbGroup& from, const FinAbGroup& to) {
    if (from.torsion != to.torsion) return false;
    if (!is_group_morphism(l, from, to)) return false;
    const size_t k = from.torsion.size();
    if (k == 0) return true;
    // kernel of the induced map trivial: {x : l x in D2 Z^k} = D1 Z^k
    Mat D2(k, k), D1(k, k);
    for (size_t i = 0; i < k; ++i) {
        D2(i, i) = to.torsion[i];
        D1(i, i) = from.torsion[i];
    }
    Mat big = Mat::hstack(l, D2);
    Mat K = kernel_basis(big);
    Mat P(k, K.cols());
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < K.cols(); ++j) P(i, j) = K(i, j);
    return same_column_lattice(Mat::hstack(P, D1), D1);
}

std::vector<mpz_class> column_of(const Mat& l, size_t i) {
    std::vector<mpz_class> c(l.rows());
    for (size_t r = 0; r < l.rows(); ++r) c[r] = l(r, i);
    return c;
}

std::vector<mpz_class> unit_vec(size_t k, size_t i) {
    std::vector<mpz_class> c(k, 0);
    c[i] = 1;
    return c;
}

}  // namespace

bool isometry_check(const Mat& l, const LinkingForm& L1, const LinkingForm& L2) {
    const size_t k = L1.gens();
    if (L1.group.torsion != L2.group.torsion) return false;
    if (l.rows() != k || l.cols() != k) return false;
    if (!is_group_iso(l, L1.group, L2.group)) return false;
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j)
            if (L2.pairing(column_of(l, i), column_of(l, j)) != L1.lambda[i][j]) return false;
    if (L1.has_refinement() != L2.has_refinement()) return false;
    if (L1.has_refinement())
        for (size_t i = 0; i < k; ++i)
            if (L2.refinement(column_of(l, i)) != L1.nu[i]) return false;
    return true;
}

std::vector<Mat> isometry_enumerate(const LinkingForm& L1, const LinkingForm& L2,
                                    const mpz_class& order_cap) {
    std::vector<Mat> out;
    if (L1.group.torsion != L2.group.torsion) return out;
    const size_t k = L1.gens();
    if (k == 0) {
        out.push_back(Mat::zero(0, 0));
        return out;
    }
    if (L2.group.order() > order_cap)
        throw std::invalid_argument("isometry_enumerate: group order above cap");
    // candidates: each entry l(j, i) in [0, d_j)
    std::vector<mpz_class> bounds(k);
    for (size_t j = 0; j < k; ++j) bounds[j] = L2.group.torsion[j];
    std::vector<mpz_class> digits(k * k, 0);
    while (true) {
        Mat l(k, k);
        for (size_t j = 0; j < k; ++j)
            for (size_t i = 0; i < k; ++i) l(j, i) = digits[j * k + i];
        if (isometry_check(l, L1, L2)) out.push_back(l);
        // increment (lexicographic, last index fastest)
        size_t p = k * k;
        while (p > 0) {
            --p;
            digits[p] += 1;
            if (digits[p] < bounds[p / k]) break;
            digits[p] = 0;
            if (p == 0) return out;
        }
    }
}

InducedIsometry induced_isometry(const Preformation& z, const FlipIso& t) {
    if (!check_flip_iso(z, t)) throw std::invalid_argument("induced_isometry: flip does not verify");
    LinkingForm Lmu = linking_of(z, LinkingPick::Mu);
    LinkingForm Lga = linking_of(z, LinkingPick::Gamma);
    Mat a_inv_dual = inverse_unimodular(t.alpha).transpose();  // F^* -> F
    Cokernel ckg = cokernel(z.gamma);
    const size_t k = Lmu.gens();
    Mat l(k, k);
    for (size_t j = 0; j < k; ++j) {
        Mat v = a_inv_dual * Lmu.generator_lifts.col(j);
        Mat cls = ckg.gen_rows * v;
        for (size_t i = 0; i < k; ++i) {
            mpz_class c = cls(i, 0) % Lga.group.torsion[i];
            if (c < 0) c += Lga.group.torsion[i];
            l(i, j) = c;
        }
    }
    InducedIsometry out;
    out.l = l;
    out.verified = isometry_check(l, Lmu, Lga);
    return out;
}

namespace {

// Linear solve for axiom (c) repair: find w (with w^* = eps w) and chi with
//   mu^* w mu - chi - eps chi^* = -T
// Unknowns are packed column-major; returns w when solvable.
std::optional<Mat> solve_axiom_c(const Mat& mu, const Mat& T, Epsilon eps) {
    const size_t f = mu.rows();  // w is f x f
    const size_t gdim = mu.cols();
    // free parameters of an eps-symmetric w: upper triangle (+ diagonal when eps=+1;
    // for eps=-1 the diagonal of a skew matrix vanishes... careful: w^* = eps w
    // means w_ji = eps w_ij; diagonal: w_ii = eps w_ii -> free iff eps=+1.
    std::vector<std::pair<size_t, size_t>> widx;
    for (size_t i = 0; i < f; ++i)
        for (size_t j = i; j < f; ++j) {
            if (i == j && eps == EPS_MINUS) continue;
            widx.push_back({i, j});
        }
    const size_t nw = widx.size(), nchi = gdim * gdim;
    const size_t rows = gdim * gdim;
    Mat A(rows, nw + nchi);
    Mat b(rows, 1);
    auto eq = [&](size_t r, size_t c) { return r * gdim + c; };
    // coefficient of w_{uv} in (mu^* w mu)_{rc} = sum_{u,v} mu_{u r} w_{u v} mu_{v c}
    for (size_t r = 0; r < gdim; ++r)
        for (size_t c = 0; c < gdim; ++c) {
            for (size_t widx_i = 0; widx_i < nw; ++widx_i) {
                auto [u, v] = widx[widx_i];
                mpz_class coef = mu(u, r) * mu(v, c);
                if (u != v) coef += mpz_class(eps.value) * mu(v, r) * mu(u, c);
                A(eq(r, c), widx_i) += coef;
            }
            // -chi_{rc} - eps chi_{cr}
            A(eq(r, c), nw + r * gdim + c) += -1;
            A(eq(r, c), nw + c * gdim + r) += -mpz_class(eps.value);
            b(eq(r, c), 0) = -T(r, c);
        }
    auto sol = solve_integer(A, b);
    if (!sol) return std::nullopt;
    Mat w(f, f);
    for (size_t widx_i = 0; widx_i < nw; ++widx_i) {
        auto [u, v] = widx[widx_i];
        w(u, v) = (*sol)(widx_i, 0);
        if (u != v) w(v, u) = mpz_class(eps.value) * (*sol)(widx_i, 0);
    }
    return w;
}

std::optional<FlipIso> try_alpha(const Preformation& z, const Mat& alpha) {
    if (!is_unimodular(alpha)) return std::nullopt;
    Mat a_inv_dual = inverse_unimodular(alpha).transpose();
    // axiom (b): gamma beta = alpha^{-*} mu
    auto beta = solve_integer(z.gamma, a_inv_dual * z.mu);
    if (!beta || !is_unimodular(*beta)) return std::nullopt;
    // axiom (a): alpha Z mu = eps mu beta - alpha gamma with Z = nu^* - eps nu
    Mat W = mpz_class(z.eps.value) * z.mu * (*beta) - alpha * z.gamma;
    Mat rhs = inverse_unimodular(alpha) * W;  // Z mu = rhs
    auto Zt = solve_integer(z.mu.transpose(), rhs.transpose());
    if (!Zt) return std::nullopt;
    Mat Z = Zt->transpose();
    if ((z.mu.transpose() * Z.transpose()).transpose() != rhs) return std::nullopt;
    // nu with nu^* - eps nu = Z: nu = w^* for w - eps w^* = Z
    auto w = q_solve(Z, z.eps);
    if (!w) return std::nullopt;
    Mat nu = w->transpose();
    // axiom (c) repair: nu += v with v^* = eps v such that the class vanishes
    Mat T = z.theta + z.mu.transpose() * nu * z.mu +
            beta->transpose() * z.theta * (*beta);
    FlipIso t{alpha, *beta, nu};
    if (q_equal(T, Mat::zero(T.rows(), T.cols()), -z.eps)) {
        if (check_flip_iso(z, t)) return t;
    }
    auto v = solve_axiom_c(z.mu, T, z.eps);
    if (!v) return std::nullopt;
    t.nu = nu + *v;
    if (check_flip_iso(z, t)) return t;
    return std::nullopt;
}

}  // namespace

namespace {

// Does the flip t of zz = z + hyperbolics induce l : L_mu(z) -> L_gamma(z)?
// The hyperbolic summand has unimodular maps, so classes live on the original
// coordinates: pad the L_mu generator lifts with zeros, apply alpha^{-*}, and
// read off the original-coordinate class of the F-component.
bool induces_given_isometry(const Preformation& z, const Preformation& zz, const FlipIso& t,
                            const Mat& l) {
    if (!s_iso_check(z.mu) || !s_iso_check(z.gamma)) return true;  // nothing to match
    LinkingForm Lmu = linking_of(z, LinkingPick::Mu);
    LinkingForm Lga = linking_of(z, LinkingPick::Gamma);
    const size_t k = Lmu.gens();
    if (l.rows() != k || l.cols() != k) return false;
    Cokernel ckg = cokernel(z.gamma);
    Mat a_inv_dual = inverse_unimodular(t.alpha).transpose();
    const size_t f = z.rankF(), fz = zz.rankF();
    for (size_t j = 0; j < k; ++j) {
        Mat x(fz, 1);
        for (size_t r = 0; r < f; ++r) x(r, 0) = Lmu.generator_lifts(r, j);
        Mat v = a_inv_dual * x;
        // hyperbolic block of coker(gamma_zz) is trivial; class determined by
        // the leading block
        Mat v0(f, 1);
        for (size_t r = 0; r < f; ++r) v0(r, 0) = v(r, 0);
        Mat cls = ckg.gen_rows * v0;
        for (size_t i = 0; i < k; ++i) {
            mpz_class c = (cls(i, 0) - l(i, j)) % Lga.group.torsion[i];
            if (c != 0) return false;
        }
    }
    return true;
}

}  // namespace

std::optional<FlipIso> flip_from_isometry_search(const Preformation& z, const Mat& l,
                                                 long entry_bound, size_t stab_max) {
    for (size_t k = 0; k <= stab_max; ++k) {
        Preformation zz = (k == 0) ? z : stabilize(z, k);
        std::vector<Mat> candidates;
        const size_t f = zz.rankF();
        // closed form for boundaries gamma = 1: alpha = lambda^* of the symmetrized theta
        if (zz.gamma.is_identity()) {
            Mat lam = zz.theta - mpz_class(zz.eps.value) * zz.theta.transpose();
            if (is_unimodular(lam)) candidates.push_back(lam.transpose());
        }
        // enumeration for small F
        if (f <= 2) {
            std::vector<long> v(f * f, -entry_bound);
            while (true) {
                Mat a(f, f);
                for (size_t i = 0; i < f; ++i)
                    for (size_t j = 0; j < f; ++j) a(i, j) = v[i * f + j];
                if (is_unimodular(a)) candidates.push_back(a);
                size_t p = 0;
                while (p < v.size() && v[p] == entry_bound) v[p++] = -entry_bound;
                if (p == v.size()) break;
                ++v[p];
            }
        }
        for (const Mat& alpha : candidates) {
            auto t = try_alpha(zz, alpha);
            if (!t) continue;
            if (induces_given_isometry(z, zz, *t, l)) return t;
        }
    }
    return std::nullopt;
}

ReducedPreformation reduce_preformation(const Preformation& z) {
    Mat K = kernel_basis(z.gamma);
    if (K.cols() == 0) {
        ReducedPreformation r;
        r.z = z;
        r.projection = Mat::identity(z.rankG());
        return r;
    }
    if (!(z.mu * K).is_zero())
        throw std::invalid_argument("reduce_preformation: ker gamma != ker mu");
    Mat C = complement_of_summand(K);
    Mat full = Mat::hstack(C, K);
    Mat inv = inverse_unimodular(full);
    Mat proj = inv.submatrix(0, 0, C.cols(), z.rankG());
    ReducedPreformation r;
    r.z = Preformation{z.ring, z.eps, z.gamma * C, z.mu * C,
                       C.transpose() * z.theta * C};
    r.projection = proj;
    return r;
}

}  // namespace skit
