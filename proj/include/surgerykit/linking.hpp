#pragma once

#include <optional>
#include <vector>

#include "surgerykit/preformation.hpp"

namespace skit {

/// Exact element of Q/Z: reduced fraction in [0, 1).
struct QmodZ {
    mpq_class v;

    QmodZ() : v(0) {}
    explicit QmodZ(const mpq_class& x) { set(x); }
    QmodZ(const mpz_class& num, const mpz_class& den) { set(mpq_class(num, den)); }

    void set(mpq_class x) {
        x.canonicalize();
        mpz_class fl;
        mpz_fdiv_q(fl.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
        v = x - mpq_class(fl);
        v.canonicalize();
    }
    QmodZ operator+(const QmodZ& o) const { return QmodZ(v + o.v); }
    QmodZ operator-() const { return QmodZ(-v); }
    QmodZ scaled(const mpz_class& a) const { return QmodZ(mpq_class(a) * v); }
    bool operator==(const QmodZ& o) const { return v == o.v; }
    bool operator!=(const QmodZ& o) const { return v != o.v; }
    bool is_zero() const { return v == 0; }
    std::string str() const { return v.get_str(); }
};

/// Split (-eps)-quadratic linking form on a finite abelian group:
/// lambda (-eps)-symmetric with values in Q/Z, nu a quadratic refinement
/// (trivial when -eps = -1 since Q_{-1}(Q/Z) = 0).
struct LinkingForm {
    FinAbGroup group;              // free_rank 0
    Mat generator_lifts;           // ambient lattice lifts, one column per generator
    Epsilon eps_link;              // the form is (-eps)-symmetric; eps_link = -eps
    std::vector<std::vector<QmodZ>> lambda;  // k x k table on generators
    std::vector<QmodZ> nu;                   // k entries; empty when eps_link = -1

    size_t gens() const { return group.torsion.size(); }
    bool has_refinement() const { return eps_link == EPS_PLUS; }

    /// lambda extended bilinearly to integer generator coordinates.
    QmodZ pairing(const std::vector<mpz_class>& x, const std::vector<mpz_class>& y) const;
    /// nu extended by nu(ax) = a^2 nu(x), nu(x+y) = nu(x)+nu(y)+lambda(x,y).
    QmodZ refinement(const std::vector<mpz_class>& x) const;
};

enum class LinkingPick { Mu, Gamma, GammaStarMu };

/// true iff A is injective with finite cokernel over (Z, Z \ {0}).
bool s_iso_check(const Mat& A);

/// Linking form L_mu / L_gamma / L_{gamma^* mu} of a preformation over Z.
/// Throws when the selected map is not an S-isomorphism. Well-definedness of
/// the tables (independence of the (s, g) solutions and vanishing on d_i g_i)
/// is verified on every construction.
LinkingForm linking_of(const Preformation& z, LinkingPick which);

/// l given on generator coordinates (k2 x k1 integer matrix); checks that l is
/// a group isomorphism L1.group -> L2.group preserving lambda and nu.
bool isometry_check(const Mat& l, const LinkingForm& L1, const LinkingForm& L2);

/// All isometries L1 -> L2, as matrices on generator coordinates with entries
/// reduced mod the target orders; exhaustive, deterministic lexicographic
/// order, guarded by a group-order cap.
std::vector<Mat> isometry_enumerate(const LinkingForm& L1, const LinkingForm& L2,
                                    const mpz_class& order_cap = 10000);

/// The isometry L_mu -> L_gamma induced by alpha^{-*} of a verified flip.
struct InducedIsometry {
    Mat l;
    bool verified = false;
};
InducedIsometry induced_isometry(const Preformation& z, const FlipIso& t);

/// Bounded search for a (possibly stabilized) flip-isomorphism inducing the
/// given isometry l : L_mu -> L_gamma. Tri-state semantics: absence within
/// the bound proves nothing.
std::optional<FlipIso> flip_from_isometry_search(const Preformation& z, const Mat& l,
                                                 long entry_bound, size_t stab_max);

/// Collapse ker(gamma) (over Z, when gamma and mu have finite cokernels but
/// need not be injective): z' = (F <- G/ker gamma -> F^*) with the same
/// linking data; flips transfer by restriction.
struct ReducedPreformation {
    Preformation z;
    Mat projection;  // G -> G' coordinates (basis of the chosen complement)
};
ReducedPreformation reduce_preformation(const Preformation& z);

}  // namespace skit
