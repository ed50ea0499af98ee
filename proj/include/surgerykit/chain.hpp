#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "surgerykit/forms.hpp"
#include "surgerykit/linalg.hpp"

namespace skit {

/// Bounded chain complex of f.g. free modules. Degrees may be any ints;
/// modules outside [lo, hi] are zero. d_r : C_r -> C_{r-1}.
///
/// Convention note: all chain-level structures here are plain (+1)-quadratic /
/// (+1)-symmetric; the form-level sign eps = (-1)^q enters through the parity
/// of the concrete degrees (q = 2 or 3), exactly as in the duality involution
/// T psi = (-1)^{pq} psi^*.
class ChainComplex {
  public:
    ChainComplex() = default;
    ChainComplex(int lo, std::vector<size_t> ranks) : lo_(lo), ranks_(std::move(ranks)) {
        diffs_.assign(ranks_.size() > 0 ? ranks_.size() - 1 : 0, Mat());
        for (size_t k = 0; k + 1 < ranks_.size(); ++k)
            diffs_[k] = Mat::zero(ranks_[k], ranks_[k + 1]);
    }

    int lo() const { return lo_; }
    int hi() const { return lo_ + static_cast<int>(ranks_.size()) - 1; }
    bool empty() const { return ranks_.empty(); }

    size_t rank(int r) const {
        if (r < lo_ || r > hi()) return 0;
        return ranks_[r - lo_];
    }
    /// d_r : C_r -> C_{r-1} (zero matrix of the right shape outside range)
    Mat diff(int r) const {
        if (r <= lo_ || r > hi()) return Mat::zero(rank(r - 1), rank(r));
        return diffs_[r - lo_ - 1];
    }
    void set_diff(int r, const Mat& d) {
        if (r <= lo_ || r > hi()) {
            if (!d.is_zero()) throw std::invalid_argument("set_diff: degree out of range");
            return;
        }
        if (d.rows() != rank(r - 1) || d.cols() != rank(r))
            throw std::invalid_argument("set_diff: shape mismatch");
        diffs_[r - lo_ - 1] = d;
    }

    bool is_valid(const BaseRing& ring = BaseRing::Z()) const {
        for (int r = lo_ + 1; r < hi(); ++r)
            if (!(diff(r) * diff(r + 1)).reduced(ring).is_zero()) return false;
        return true;
    }

    size_t total_rank() const {
        size_t t = 0;
        for (size_t k : ranks_) t += k;
        return t;
    }

  private:
    int lo_ = 0;
    std::vector<size_t> ranks_;
    std::vector<Mat> diffs_;  // diffs_[k] = d_{lo+k+1}
};

/// Degreewise map of complexes; components default to zero.
struct ChainMap {
    std::map<int, Mat> comp;
    Mat at(int r, const ChainComplex& src, const ChainComplex& dst) const {
        auto it = comp.find(r);
        if (it == comp.end()) return Mat::zero(dst.rank(r), src.rank(r));
        return it->second;
    }
    void set(int r, const Mat& m) { comp[r] = m; }
};

bool is_chain_map(const ChainMap& f, const ChainComplex& C, const ChainComplex& D);

/// C^{n-*}: (C^{n-*})_r = C^{n-r}, differential (-1)^r d^*.
ChainComplex dual_complex(const ChainComplex& C, int n);

/// cone(f)_r = D_r + C_{r-1}, d = [[d_D, (-1)^{r-1} f],[0, d_C]].
ChainComplex cone(const ChainMap& f, const ChainComplex& C, const ChainComplex& D);

std::vector<FinAbGroup> homology_all(const ChainComplex& C, const BaseRing& ring = BaseRing::Z());
bool is_acyclic(const ChainComplex& C, const BaseRing& ring = BaseRing::Z());
bool is_quasi_iso(const ChainMap& f, const ChainComplex& C, const ChainComplex& D,
                  const BaseRing& ring = BaseRing::Z());
/// chain equivalence decided as quasi-isomorphism (bounded f.g. free complexes)
inline bool is_equivalence(const ChainMap& f, const ChainComplex& C, const ChainComplex& D,
                           const BaseRing& ring = BaseRing::Z()) {
    return is_quasi_iso(f, C, D, ring);
}

/// A graded family X_s[r] of matrices; quadratic families map C^{n-r-s} -> C_r,
/// symmetric ones C^{n-r+s} -> C_r. Missing components are zero.
struct StructFam {
    int n = 0;  // dimension tag
    std::map<std::pair<int, int>, Mat> comp;  // (s, r) -> matrix

    Mat at(int s, int r, size_t rows, size_t cols) const {
        auto it = comp.find({s, r});
        if (it == comp.end()) return Mat::zero(rows, cols);
        return it->second;
    }
    void set(int s, int r, const Mat& m) {
        if (m.rows() == 0 && m.cols() == 0) return;
        if (m.is_zero()) return;
        comp[{s, r}] = m;
    }
    int max_s() const {
        int m = 0;
        for (auto& [k, v] : comp) m = std::max(m, k.first);
        return m;
    }
};

// --- quadratic structure calculus (W_% of the appendix) ---

/// psi_s[r] : C^{n-r-s} -> C_r
Mat quad_at(const StructFam& psi, const ChainComplex& C, int s, int r);
/// (T psi)_s[r] = (-1)^{r(n-r-s)} psi_s[n-r-s]^*
StructFam T_quad(const StructFam& psi, const ChainComplex& C);
StructFam add(const StructFam& a, const StructFam& b);
StructFam negate(const StructFam& a);
bool equal_fam(const StructFam& a, const StructFam& b, const ChainComplex& C, bool quadratic);
/// d_% of the appendix; result has dimension n-1
StructFam d_quad(const StructFam& psi, const ChainComplex& C);
bool quad_cycle_check(const ChainComplex& C, const StructFam& psi);
/// f psi f^* for f : C -> C'
StructFam conj_quad(const ChainMap& f, const StructFam& psi, const ChainComplex& C,
                    const ChainComplex& Cp);
/// (1+T)psi_0 : C^{n-*} -> C as a chain map
ChainMap duality_map_quad(const StructFam& psi, const ChainComplex& C);
bool is_poincare_quad(const ChainComplex& C, const StructFam& psi,
                      const BaseRing& ring = BaseRing::Z());
/// morphism check: psi' - f psi f^* = d_%(chi)
bool quad_morphism_check(const ChainMap& f, const StructFam& chi, const ChainComplex& C,
                         const StructFam& psi, const ChainComplex& Cp, const StructFam& psip);

// --- symmetric structure calculus (W^%) ---

Mat sym_at(const StructFam& phi, const ChainComplex& C, int s, int r);
StructFam T_sym(const StructFam& phi, const ChainComplex& C);
StructFam d_sym(const StructFam& phi, const ChainComplex& C);
bool sym_cycle_check(const ChainComplex& C, const StructFam& phi);
StructFam conj_sym(const ChainMap& f, const StructFam& phi, const ChainComplex& C,
                   const ChainComplex& Cp);
ChainMap duality_map_sym(const StructFam& phi, const ChainComplex& C);
bool is_poincare_sym(const ChainComplex& C, const StructFam& phi,
                     const BaseRing& ring = BaseRing::Z());
bool sym_morphism_check(const ChainMap& f, const StructFam& chi, const ChainComplex& C,
                        const StructFam& phi, const ChainComplex& Cp, const StructFam& phip);
/// symmetrization (1+T)psi of a quadratic structure (s = 0 component only)
StructFam symmetrize_struct(const StructFam& psi, const ChainComplex& C);

/// (n+1)-dimensional quadratic pair (f : C -> D, (delta, psi)).
struct QuadPair {
    ChainComplex C, D;
    ChainMap f;
    StructFam delta;  // dimension n+1 over D
    StructFam psi;    // dimension n over C
    int n() const { return psi.n; }
};
bool pair_cycle_check(const QuadPair& c);
bool is_poincare_pair(const QuadPair& c, const BaseRing& ring = BaseRing::Z());

struct SymPair {
    ChainComplex C, D;
    ChainMap f;
    StructFam delta;  // dimension n+1 over D (symmetric)
    StructFam phi;    // dimension n over C (symmetric)
    int n() const { return phi.n; }
};
bool pair_cycle_check_sym(const SymPair& c);
bool is_poincare_pair_sym(const SymPair& c, const BaseRing& ring = BaseRing::Z());
SymPair symmetrize_pair(const QuadPair& c);

/// connectivity per the appendix: zeroth homology of the duality map vanishes
bool is_connected_quad(const ChainComplex& C, const StructFam& psi);

/// boundary (d C, d psi) of a connected n-dimensional quadratic complex
struct BoundaryData {
    ChainComplex bC;
    StructFam bpsi;  // dimension n-1
};
BoundaryData boundary_quad(const ChainComplex& C, const StructFam& psi);
BoundaryData boundary_sym(const ChainComplex& C, const StructFam& phi);

/// thickening: (i_C : dC -> C^{n-*}, (0, d psi))
QuadPair thicken_quad(const ChainComplex& C, const StructFam& psi);

/// Thom complex (cone(f), delta/psi) of an (n+1)-dimensional pair
struct ThomData {
    ChainComplex N;
    StructFam zeta;  // dimension n+1
};
ThomData thom_quad(const QuadPair& c);

/// Union of adjoining cobordisms (Def. uniondef). Pair data supplied in the
/// decomposed cobordism format; `middle` is the structure phi' on the shared
/// boundary. Boundaries may be empty complexes.
struct CobordismHalf {
    ChainComplex Cleft, Cmid, D;
    ChainMap fleft, fmid;
    StructFam delta;  // over D, dim n+1
};
struct UnionResult {
    ChainComplex D;          // D union_{C'} D'
    StructFam delta;         // glued structure, dim n+1
    ChainMap inc_left_D, inc_right_D;  // inclusions of the two lids
};
UnionResult quad_union(const CobordismHalf& c, const CobordismHalf& cp, const StructFam& middle,
                       const ChainComplex& Cmid);
UnionResult sym_union(const CobordismHalf& c, const CobordismHalf& cp, const StructFam& middle,
                      const ChainComplex& Cmid);

/// union of a fundamental pair ((f,g) : C+C -> D, (delta, psi + -psi))
struct FundamentalUnion {
    ChainComplex U;
    StructFam structure;  // quadratic or symmetric per builder
};
FundamentalUnion fundamental_union_quad(const ChainComplex& C, const ChainComplex& D,
                                        const ChainMap& f, const ChainMap& g,
                                        const StructFam& delta, const StructFam& psi);
FundamentalUnion fundamental_union_sym(const ChainComplex& C, const ChainComplex& D,
                                       const ChainMap& f, const ChainMap& g,
                                       const StructFam& delta, const StructFam& phi);

/// twisted double of c with respect to a self-equivalence (h, chi) of its
/// boundary; component order (D, D, C_{*-1})
struct TwistedDouble {
    ChainComplex E;     // D cup_h D
    StructFam omega;    // dim n
    ChainMap j0, j1, k; // inclusions D, D, C_{*-1} -> E
};
TwistedDouble twisted_double_quad(const QuadPair& c, const ChainMap& h, const StructFam& chi);
TwistedDouble twisted_double_sym(const SymPair& c, const ChainMap& h, const StructFam& chi);

/// result of an eps-quadratic surgery on a connected pair (Def. surgerydef)
struct SurgeryResult {
    ChainComplex C;
    StructFam psi;
};
SurgeryResult surgery_complex(const ChainComplex& C, const StructFam& psi, const QuadPair& data);

/// surgery on the inside of a Poincare pair (Def. surgpairdef); `data` is a
/// connected pair on cone(f)
struct PairSurgeryResult {
    QuadPair c;  // (f' : C -> D', (delta', psi))
};
PairSurgeryResult surgery_pair(const QuadPair& c, const ChainMap& g, const ChainComplex& B,
                               const StructFam& dsigma);

/// instant form of a 2m-dimensional Poincare complex concentrated in degrees
/// m, m+1: (M = C^m + C_{m+1}, [[psi_0, 0],[d^*, 0]]) as a (-1)^m-quadratic form
QuadForm instant_form(const ChainComplex& C, const StructFam& psi);

// --- homotopy calculus ---

/// Delta stored as Delta[r] : C_{r-1} -> C'_r; chain homotopy f ~ f' means
/// f' - f = d Delta + Delta d
bool is_chain_homotopy(const ChainMap& Delta, const ChainMap& f, const ChainMap& fp,
                       const ChainComplex& C, const ChainComplex& Cp);
/// (Delta_% psi)_s = -Delta psi_s f^* + (-1)^{r+1}(f' psi_s + (-1)^n Delta T psi_{s+1}) Delta^*
StructFam delta_lower(const ChainMap& Delta, const ChainMap& f, const ChainMap& fp,
                      const StructFam& psi, const ChainComplex& C, const ChainComplex& Cp);
/// (Delta^% phi)_s = -Delta phi_s f^* + (-1)^{r+1}(f' phi_s + (-1)^{n+1} Delta T phi_{s-1}) Delta^*
StructFam delta_upper(const ChainMap& Delta, const ChainMap& f, const ChainMap& fp,
                      const StructFam& phi, const ChainComplex& C, const ChainComplex& Cp);
/// homotopy (Delta, eta) : (f, chi) ~ (f', chi'): chi' - chi = Delta_% psi + d eta
bool homotopy_check(const ChainMap& Delta, const StructFam& eta, const ChainMap& f,
                    const StructFam& chi, const ChainMap& fp, const StructFam& chip,
                    const ChainComplex& C, const StructFam& psi, const ChainComplex& Cp,
                    const StructFam& psip);
bool homotopy_check_sym(const ChainMap& Delta, const StructFam& eta, const ChainMap& f,
                        const StructFam& chi, const ChainMap& fp, const StructFam& chip,
                        const ChainComplex& C, const StructFam& phi, const ChainComplex& Cp,
                        const StructFam& phip);

/// transport a complex + quadratic structure through a degreewise isomorphism u
struct IsoTransport {
    ChainComplex C;
    StructFam psi;
};
IsoTransport transport_by_iso(const ChainMap& u, const ChainComplex& C, const StructFam& psi);

/// direct sum of complexes with structures
ChainComplex complex_direct_sum(const ChainComplex& A, const ChainComplex& B);

/// solve for a chain homotopy Delta : f ~ g (exact integer solve); empty when
/// none exists
std::optional<ChainMap> solve_chain_homotopy(const ChainMap& f, const ChainMap& g,
                                             const ChainComplex& C, const ChainComplex& D);

}  // namespace skit
