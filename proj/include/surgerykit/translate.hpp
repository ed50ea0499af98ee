#pragma once

#include "surgerykit/chain.hpp"
#include "surgerykit/preformation.hpp"

namespace skit {

/// Degrees: q = 2 for eps = +1, q = 3 for eps = -1, so that eps = (-1)^q.
/// All chain-level signs are produced by the parity of the actual degrees.
int degree_q(Epsilon eps);

/// (N, zeta): d_N = mu^* : N_{q+1} = F -> N_q = G^*, zeta_0 = gamma,
/// zeta_1 = eps theta; the (2q+1)-dimensional quadratic complex of z.
struct QuadComplexData {
    ChainComplex C;
    StructFam psi;
};
QuadComplexData complex_of_preformation(const Preformation& z);
/// (N', zeta') of the flip
QuadComplexData complex_of_flip(const Preformation& z);

/// Everything the preformation-to-pairs translation constructs: thickenings
/// c, c', the isomorphism (h, chi), the union (dE, omega), the small model
/// (A, tau) with the equivalence (a, kappa), and the Poincare pair
/// x = (g : dE -> E, (0, omega)).
struct PreformationPipeline {
    QuadComplexData N, Np;
    QuadPair c, cp;
    ChainMap h;
    StructFam chi;
    ChainComplex dE;      // union, component order (D', C_{*-1}, D)
    StructFam omega;
    QuadComplexData A;    // (A, tau) from the boundary of (G, theta)
    ChainMap a;           // dE -> A
    StructFam kappa;
    ChainComplex E;       // concentrated: E_{q+1} = G
    ChainMap g;           // dE -> E

    bool c_poincare = false, cp_poincare = false;
    bool h_iso = false;
    bool a_equivalence = false;
    bool x_poincare = false;
    bool all_ok() const { return c_poincare && cp_poincare && h_iso && a_equivalence && x_poincare; }

    QuadPair x_pair() const {
        QuadPair x;
        x.C = dE;
        x.psi = omega;
        x.D = E;
        x.f = g;
        x.delta.n = omega.n + 1;
        return x;
    }
};
PreformationPipeline preformation_pipeline(const Preformation& z);

/// kappa with beta^* theta beta + theta + mu^* nu mu = kappa + eps kappa^*.
std::optional<Mat> solve_kappa(const Preformation& z, const FlipIso& t);

/// the self-equivalence (h_t, chi_t) of (C, psi) induced by a flip
struct SelfEquivalence {
    ChainMap h;
    StructFam chi;
    bool verified = false;
};
SelfEquivalence selfequiv_from_flip(const Preformation& z, const FlipIso& t, const Mat& kappa);

/// homotopy data (Delta, eta) : (1, 0) ~ (h_t, chi_t) over (C, psi)
struct FlipHomotopy {
    ChainMap Delta;
    StructFam eta;
};
bool flip_rel_check(const Preformation& z, const FlipIso& t, const Mat& kappa,
                    const FlipHomotopy& hom);

/// the explicit (Delta, eta) of the canonical flip on an elementary normal form
FlipHomotopy normal_form_homotopy(const ElementaryNormalForm& nf);

/// Delta_C : 1 ~ 0 : C -> C built from a hyperbolic extension (gamma~, mu~) of
/// a formation, and the induced homotopy
/// (Delta_C (1 - h_t), Delta_C%(chi_t - Delta_% psi)) : (1,0) ~ (h_t, chi_t)
struct FormationHomotopy {
    ChainMap Delta_C;
    FlipHomotopy hom;
};
FormationHomotopy formation_homotopy(const Preformation& z, const FlipIso& t, const Mat& kappa,
                                     const Mat& gamma_tilde, const Mat& mu_tilde);

/// w_t = (g'_t : dE' -> E, (delta omega'_0 = -eta_0, omega')) with
/// dE' = D cup_C D, then (V, tau) = w_t cup -y for the standard h-cobordism y,
/// and the two-term shrink (V', tau').
struct QuadSignatureChain {
    ChainComplex dEp;
    StructFam omegap;      // omega' = delta psi cup_psi -delta psi (2q+1 dim)
    QuadPair w_t;
    QuadPair y;
    ChainComplex V;
    StructFam tau;         // (2q+2)-dimensional
    ChainComplex Vp;       // degrees q+1, q+2
    StructFam taup;
    bool w_t_poincare = false;
    bool y_poincare = false;
    bool shrink_ok = false;
};
QuadSignatureChain quad_signature_chain(const Preformation& z, const FlipIso& t, const Mat& nu,
                                        const Mat& kappa, const FlipHomotopy& hom);

/// A symmetric Poincare pair whose boundary is a twisted double.
struct TwistedDoublePair {
    SymPair base;          // (f : C -> D, (delta phi, phi))
    ChainMap h;
    StructFam chi;         // self-equivalence datum of (C, phi)
    TwistedDouble dbl;     // boundary (D, D, C_{*-1}) with j0, j1, k
    ChainComplex E;
    ChainMap g;            // dbl.E -> E
    StructFam theta;       // (n+1)-structure on E
    int n() const { return base.phi.n + 1; }  // pair dimension - 1 in cplxdef terms
};

/// x_t / x^t of a flip: quadratic and symmetric twisted-double pairs, with the
/// (a_t, sigma_t) identification against (dE, omega) verified exactly.
struct TwistedPairData {
    TwistedDouble dEt_quad;
    TwistedDouble dEt_sym;
    ChainComplex E;
    ChainMap g_t;
    TwistedDoublePair x_t_sym;    // the symmetric pair x^t
    bool at_verified = false;
    bool xt_poincare = false;
    bool xt_sym_poincare = false;
};
TwistedPairData twisted_pair_from_flip(const Preformation& z, const FlipIso& t, const Mat& nu,
                                       const Mat& kappa);

/// asymmetric complex (B, T lambda) of a pair with twisted-double boundary,
/// built from the closed formulas; the two null-homotopy identities of the
/// defining diagrams and the chain-equivalence property are verified exactly.
struct AsymComplexData {
    ChainComplex B;
    ChainMap Tlambda;  // T lambda_r : B^{n+1-r} -> B_r
    bool lambda_chain_map = false;
    bool lambda_equivalence = false;
    bool diagrams_verified = false;
};
AsymComplexData asym_complex_of_pair(const TwistedDoublePair& x);

}  // namespace skit
