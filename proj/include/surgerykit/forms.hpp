#pragma once

#include <functional>
#include <optional>

#include "surgerykit/linalg.hpp"
#include "surgerykit/mat.hpp"
#include "surgerykit/ring.hpp"

namespace skit {

/// eps-quadratic form (M, psi): psi a square representative of the class in
/// Q_eps(M) = coker(1 - T_eps); two representatives agree iff they differ by
/// chi - eps*chi^*.
struct QuadForm {
    BaseRing ring;
    Epsilon eps;
    Mat psi;

    size_t rank() const { return psi.rows(); }
    QuadForm direct_sum(const QuadForm& o) const {
        return QuadForm{ring, eps, Mat::direct_sum(psi, o.psi)};
    }
};

/// eps-symmetric form (M, phi) with phi = eps*phi^* exactly.
struct SymForm {
    BaseRing ring;
    Epsilon eps;
    Mat phi;
};

/// true iff theta and theta_prime represent the same class in Q_eps,
/// i.e. theta - theta_prime = chi - eps*chi^* is solvable over the ring.
bool q_equal(const Mat& theta, const Mat& theta_prime, Epsilon eps,
             const BaseRing& ring = BaseRing::Z());

/// A chi with chi - eps*chi^* = d, when one exists.
std::optional<Mat> q_solve(const Mat& d, Epsilon eps, const BaseRing& ring = BaseRing::Z());

/// A kappa with kappa + eps*kappa^* = d, when one exists (the "even" solver
/// used for flip axiom (c) and the kappa of the chain translation).
std::optional<Mat> q_solve_plus(const Mat& d, Epsilon eps, const BaseRing& ring = BaseRing::Z());

/// phi = psi + eps*psi^*; representative independent.
SymForm symmetrize(const QuadForm& q);

/// H_eps(L) = (L + L^*, [[0,1],[0,0]]) of rank 2k.
QuadForm hyperbolic_quadratic(Epsilon eps, size_t k, const BaseRing& ring = BaseRing::Z());

/// H^eps(L, phi) = (L + L^*, [[0,1],[eps,phi]]) with phi (-eps)-symmetric.
QuadForm hyperbolic_symmetric(Epsilon eps, size_t k, const Mat& phi,
                              const BaseRing& ring = BaseRing::Z());

struct LagrangianStatus {
    bool sublagrangian = false;
    bool lagrangian = false;
};

/// j : L -> M given by independent columns. L is a sublagrangian when j is a
/// split injection with j^* psi j = 0 in Q_eps(L); a lagrangian when
/// additionally L coincides with its annihilator ker(j^*(1+T_eps)psi).
LagrangianStatus is_lagrangian(const QuadForm& q, const Mat& j);

/// Arf invariant of a nonsingular quadratic form over F_2 (even rank 2g):
/// 0 iff #{x : psi(x)(x) = 0} = 2^{2g-1} + 2^{g-1}.
int arf_invariant(const QuadForm& q);

/// Exact signature of a symmetric integer matrix (congruence diagonalization
/// over Q with exact rationals).
long signature(const Mat& symmetric);

/// Witt class over Z: eps=+1 -> signature/8 of the symmetrization,
/// eps=-1 -> Arf invariant of the mod-2 reduction.
struct WittValue {
    Epsilon eps;
    long value = 0;
    bool operator==(const WittValue& o) const { return eps == o.eps && value == o.value; }
};
WittValue witt_class_Z(const QuadForm& q);

struct SearchResult {
    bool found = false;
    Mat witness;  // columns, valid only when found
};

/// Exhaustive bounded search for a rank-k lagrangian with entries in [-B, B],
/// canonicalized by column Hermite form. Absence within the bound proves
/// nothing.
SearchResult lagrangian_search(const QuadForm& q, long entry_bound, size_t k);

/// Bounded search over primitive sublattices, generic version: candidate
/// acceptance is delegated to `accept` (used by lagrangian, metabolic and
/// elementary searches). Vectors are enumerated in lexicographic order with
/// canonical sign; `pair_ok(u,v)` prunes incompatible pairs early.
SearchResult sublattice_search(size_t ambient_rank, long entry_bound, size_t k,
                               const std::function<bool(const Mat&)>& accept,
                               const std::function<bool(const Mat&, const Mat&)>& pair_ok);

}  // namespace skit
