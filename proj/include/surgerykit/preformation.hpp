#pragma once

#include <optional>
#include <string>
#include <vector>

#include "surgerykit/forms.hpp"

namespace skit {

/// Regular eps-quadratic split preformation (F <-gamma- G -mu-> F^*, theta):
/// gamma^* mu = theta - eps*theta^* exactly, so (G, gamma^* mu, theta) is a
/// (-eps)-quadratic form.
struct Preformation {
    BaseRing ring;
    Epsilon eps;
    Mat gamma;  // G -> F
    Mat mu;     // G -> F^*
    Mat theta;  // representative of the class in Q_{-eps}(G)

    size_t rankF() const { return gamma.rows(); }
    size_t rankG() const { return gamma.cols(); }
};

struct Diagnostics {
    bool ok = true;
    std::vector<std::string> failures;
    void fail(const std::string& what) {
        ok = false;
        failures.push_back(what);
    }
};

/// Strong isomorphism (alpha, beta): alpha gamma' beta-compatible diagram plus
/// theta = beta^* theta' beta in Q_{-eps}.
struct StrongIso {
    Mat alpha;  // F -> F'
    Mat beta;   // G -> G'
};

/// Weak isomorphism (alpha, beta, nu) with nu in Q_{-eps}(F^*).
struct WeakIso {
    Mat alpha, beta, nu;
};

/// Flip-isomorphism: weak isomorphism of z with its flip; alpha : F -> F^*.
struct FlipIso {
    Mat alpha;  // F -> F^*
    Mat beta;   // G -> G
    Mat nu;     // rep of the class in Q_{-eps}(F^*), maps F^* -> F
};

Diagnostics validate(const Preformation& z);

/// (F^* <-eps*mu- G -gamma-> F, -theta)
Preformation flip(const Preformation& z);

Preformation direct_sum(const Preformation& a, const Preformation& b);

/// z + boundary of the (-eps)-quadratic hyperbolic form on Lambda^k.
Preformation stabilize(const Preformation& z, size_t k);

/// Boundary of a (-eps)-quadratic form (K, theta):
/// (K <-1- K -theta-eps*theta^*-> K^*, theta).
Preformation boundary_preformation(Epsilon eps, const Mat& theta,
                                   const BaseRing& ring = BaseRing::Z());

/// Trivial formation (P, P^*) = (P <-0- P -1-> P^*, 0) of rank k.
Preformation trivial_formation(Epsilon eps, size_t k, const BaseRing& ring = BaseRing::Z());

/// Boundary of the (-eps)-quadratic hyperbolic form of rank 2k.
Preformation hyperbolic_boundary(Epsilon eps, size_t k, const BaseRing& ring = BaseRing::Z());

/// true iff (gamma; mu) : G -> F + F^* is a lagrangian of H_eps(F).
bool is_formation(const Preformation& z);

bool check_strong_iso(const Preformation& z, const Preformation& zp, const StrongIso& s);
bool check_weak_iso(const Preformation& z, const Preformation& zp, const WeakIso& w);
bool check_flip_iso(const Preformation& z, const FlipIso& t);

/// Kernel/cokernel isomorphism classes of gamma, mu, (gamma;mu), gamma^* mu
/// plus the rank data; verdict "fails" when a necessary condition for
/// elementariness is violated, "inconclusive" otherwise.
struct ObstructionReport {
    FinAbGroup ker_gamma, ker_mu, ker_stack, ker_gsm;
    FinAbGroup coker_gamma, coker_mu, coker_stack, coker_gsm;
    FinAbGroup ker_gamma_dual, coker_gamma_dual;
    long rank_diff = 0;   // rk G - rk F
    int rankF_mod2 = 0;
    bool fails = false;
    std::vector<std::string> reasons;
};
ObstructionReport simple_obstructions(const Preformation& z);

/// true iff 0 -> U -mu j-> F^* -(gamma j)^*-> U^* -> 0 is exact and
/// theta|U = 0 in Q_{-eps}(U); j = U given by independent columns into G.
bool is_elementary_wrt(const Preformation& z, const Mat& U);

/// The normal form of an elementary preformation built from sigma : R -> U^*,
/// tau : R -> U with tau^* sigma = -eps sigma^* tau and a refinement
/// theta' of sigma^* tau. Ships with its canonical h-lagrangian and flip.
struct ElementaryNormalForm {
    Preformation z;
    Mat h_lagrangian;  // U as a submodule of G = U + R (the first summand)
    FlipIso canonical_flip;
    size_t u_rank = 0, r_rank = 0;
};
ElementaryNormalForm elementary_normal_form(size_t u_rank, size_t r_rank, const Mat& sigma,
                                            const Mat& tau, const Mat& theta_prime,
                                            Epsilon eps, const BaseRing& ring = BaseRing::Z());

/// Bounded exhaustive search for an h-lagrangian of rank k.
SearchResult elementary_search(const Preformation& z, long entry_bound, size_t k);

/// Strong-isomorphism transport: z' with gamma' = alpha gamma beta^{-1}, etc.
Preformation transport(const Preformation& z, const Mat& alpha, const Mat& beta);

}  // namespace skit
