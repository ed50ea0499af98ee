#pragma once

#include <optional>
#include <vector>

#include "surgerykit/mat.hpp"
#include "surgerykit/ring.hpp"

namespace skit {

/// S = U * A * V with U, V unimodular, S diagonal with d1 | d2 | ... , di >= 0.
struct SmithDecomposition {
    Mat U, S, V;
    size_t rank = 0;  // number of nonzero diagonal entries
};

/// Finitely generated abelian group in invariant-factor form:
/// Z^free_rank + Z/d1 + ... + Z/dk with 2 <= d1 | d2 | ... | dk.
struct FinAbGroup {
    size_t free_rank = 0;
    std::vector<mpz_class> torsion;

    bool is_trivial() const { return free_rank == 0 && torsion.empty(); }
    bool is_finite() const { return free_rank == 0; }
    mpz_class order() const {  // only meaningful when finite
        mpz_class o = 1;
        for (const auto& d : torsion) o *= d;
        return o;
    }
    /// exponent = largest invariant factor (1 if torsion-free)
    mpz_class exponent() const { return torsion.empty() ? mpz_class(1) : torsion.back(); }
    bool operator==(const FinAbGroup& o) const {
        return free_rank == o.free_rank && torsion == o.torsion;
    }
    bool operator!=(const FinAbGroup& o) const { return !(*this == o); }
    FinAbGroup direct_sum(const FinAbGroup& o) const;
    std::string str() const;
};

/// Cokernel of A : Lambda^n -> Lambda^m together with projection data.
/// Over Z: group = Z^m / im(A). gen_rows maps a vector v in Z^m to its class:
/// class_i = (gen_rows * v)_i  mod torsion[i] for i < torsion.size(), free
/// coordinates afterwards. lifts holds one column per torsion generator.
struct Cokernel {
    FinAbGroup group;
    Mat gen_rows;  // (#torsion + free_rank) x m
    Mat lifts;     // m x #torsion, lift of each torsion generator
};

// --- Smith normal form and friends (integer ring; modular rings lift to Z) ---

SmithDecomposition smith_decompose(const Mat& A);

/// det of a square integer matrix (fraction-free Bareiss).
mpz_class det(const Mat& A);

/// true iff A is invertible over the ring (det +-1 over Z; det a unit mod n).
bool is_unimodular(const Mat& A, const BaseRing& ring = BaseRing::Z());

/// Inverse of a unimodular integer matrix.
Mat inverse_unimodular(const Mat& A);

size_t rank(const Mat& A);

/// Columns form a basis of ker(A) over the ring. Over Z the basis spans the
/// full (saturated) kernel sublattice. Over Z/n and F_p the kernel of the
/// reduced map is returned via an integer lift.
Mat kernel_basis(const Mat& A, const BaseRing& ring = BaseRing::Z());

Cokernel cokernel(const Mat& A, const BaseRing& ring = BaseRing::Z());

/// Minimal s >= 1 and g with A*g = s*y (over Z). Empty when y is not in the
/// rational column span.
struct DenSolution {
    mpz_class s;
    Mat g;  // column vector
};
std::optional<DenSolution> solve_with_denominator(const Mat& A, const Mat& y);

/// Solve A*x = b exactly over Z (x integral). Empty when no integral solution.
std::optional<Mat> solve_integer(const Mat& A, const Mat& b);

/// Solve A*x = b over Z/n (integer lift representative returned).
std::optional<Mat> solve_mod(const Mat& A, const Mat& b, const mpz_class& n);

/// true iff A is injective with image a direct summand (all invariant factors 1).
bool is_split_injection(const Mat& A, const BaseRing& ring = BaseRing::Z());

/// ker(B)/im(A), requires B*A = 0.
FinAbGroup homology(const Mat& B, const Mat& A, const BaseRing& ring = BaseRing::Z());

/// Column Hermite normal form of the lattice spanned by the columns of A
/// (over Z): unique echelon basis of the column lattice, returned with
/// exactly rank(A) columns. Two integer matrices span the same column
/// lattice iff their HNFs agree.
Mat hermite_column_basis(const Mat& A);

/// true iff the columns of A and B span the same sublattice of Z^m.
bool same_column_lattice(const Mat& A, const Mat& B);

/// true iff every column of B lies in the column lattice of A.
bool lattice_contains(const Mat& A, const Mat& B);

/// Saturation of the column lattice of A: basis of (Q-span of A) intersect Z^m.
Mat saturate_lattice(const Mat& A);

/// Complete the columns of a primitive m x k matrix (split injection) to a
/// basis of Z^m; returns an m x (m-k) complement.
Mat complement_of_summand(const Mat& A);

}  // namespace skit
