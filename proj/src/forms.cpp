#include "surgerykit/forms.hpp"

#include <stdexcept>
#include <vector>

namespace skit {

namespace {

void require_square(const Mat& m, const char* who) {
    if (!m.is_square()) throw std::invalid_argument(std::string(who) + ": matrix not square");
}

// Solve (1 - sgn*eps-dual) equations entrywise:
//   mode +1: chi - eps*chi^* = d   (requires d^* = -eps*d)
//   mode -1: chi + eps*chi^* = d   (requires d^* = +eps*d)
size_t rank_mod2(const Mat& A) {
    Mat M = A;
    const size_t m = M.rows(), n = M.cols();
    size_t r = 0;
    for (size_t c = 0; c < n && r < m; ++c) {
        size_t p = r;
        while (p < m && M(p, c) % 2 == 0) ++p;
        if (p == m) continue;
        for (size_t k = 0; k < n; ++k) std::swap(M(p, k), M(r, k));
        for (size_t i = 0; i < m; ++i) {
            if (i == r || M(i, c) % 2 == 0) continue;
            for (size_t k = 0; k < n; ++k) M(i, k) += M(r, k);
        }
        ++r;
    }
    return r;
}

std::optional<Mat> q_solve_impl(const Mat& d, Epsilon eps, int mode, const BaseRing& ring) {
    require_square(d, "q_solve");
    const size_t n = d.rows();
    const int e = eps.value * mode;  // chi_ij - e*chi_ji pattern sign
    // consistency: d_ji must equal -e*d_ij (mod ring)
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            mpz_class lhs = ring.reduce(d(j, i) + mpz_class(e) * d(i, j));
            if (lhs != 0) return std::nullopt;
        }
    Mat chi(n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) chi(i, j) = d(i, j);  // chi_ji = 0
    // diagonal: (1 - e) chi_ii = d_ii
    for (size_t i = 0; i < n; ++i) {
        mpz_class c = 1 - e;
        if (c == 0) {
            if (ring.reduce(d(i, i)) != 0) return std::nullopt;
        } else {  // c == 2
            if (!ring.is_modular()) {
                if (d(i, i) % 2 != 0) return std::nullopt;
                chi(i, i) = d(i, i) / 2;
            } else {
                // solve 2x = d_ii mod n
                auto x = solve_mod(Mat{{2}}, Mat::col_vector({ring.reduce(d(i, i))}), ring.modulus);
                if (!x) return std::nullopt;
                chi(i, i) = (*x)(0, 0);
            }
        }
    }
    return chi;
}

}  // namespace

bool q_equal(const Mat& theta, const Mat& theta_prime, Epsilon eps, const BaseRing& ring) {
    if (theta.rows() != theta_prime.rows() || theta.cols() != theta_prime.cols())
        throw std::invalid_argument("q_equal: shape mismatch");
    require_square(theta, "q_equal");
    return q_solve(theta - theta_prime, eps, ring).has_value();
}

std::optional<Mat> q_solve(const Mat& d, Epsilon eps, const BaseRing& ring) {
    return q_solve_impl(d, eps, +1, ring);
}

std::optional<Mat> q_solve_plus(const Mat& d, Epsilon eps, const BaseRing& ring) {
    return q_solve_impl(d, eps, -1, ring);
}

SymForm symmetrize(const QuadForm& q) {
    require_square(q.psi, "symmetrize");
    Mat phi = q.psi + mpz_class(q.eps.value) * q.psi.transpose();
    return SymForm{q.ring, q.eps, phi.reduced(q.ring)};
}

QuadForm hyperbolic_quadratic(Epsilon eps, size_t k, const BaseRing& ring) {
    Mat psi(2 * k, 2 * k);
    for (size_t i = 0; i < k; ++i) psi(i, k + i) = 1;
    return QuadForm{ring, eps, psi};
}

QuadForm hyperbolic_symmetric(Epsilon eps, size_t k, const Mat& phi, const BaseRing& ring) {
    if (phi.rows() != k || phi.cols() != k)
        throw std::invalid_argument("hyperbolic_symmetric: phi must be k x k");
    // phi must be (-eps)-symmetric: phi^* = -eps*phi
    if ((phi.transpose() + mpz_class(eps.value) * phi).reduced(ring) != Mat::zero(k, k))
        throw std::invalid_argument("hyperbolic_symmetric: phi not (-eps)-symmetric");
    Mat psi(2 * k, 2 * k);
    for (size_t i = 0; i < k; ++i) {
        psi(i, k + i) = 1;
        psi(k + i, i) = eps.value;
    }
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) psi(k + i, k + j) = phi(i, j);
    return QuadForm{ring, eps, psi};
}

LagrangianStatus is_lagrangian(const QuadForm& q, const Mat& j) {
    LagrangianStatus st;
    if (j.rows() != q.rank()) throw std::invalid_argument("is_lagrangian: j has wrong height");
    if (!is_split_injection(j, q.ring)) return st;
    Mat restricted = (j.transpose() * q.psi * j).reduced(q.ring);
    if (!q_equal(restricted, Mat::zero(j.cols(), j.cols()), q.eps, q.ring)) return st;
    st.sublagrangian = true;
    // annihilator: ker(j^*(1+T_eps)psi : M -> L^*)
    Mat lambda = q.psi + mpz_class(q.eps.value) * q.psi.transpose();
    Mat ann = kernel_basis((j.transpose() * lambda).reduced(q.ring), q.ring);
    if (q.ring.is_modular()) {
        // compare submodules of (Z/n)^m via mod-n lattices
        const Mat nI = Mat::scalar(q.rank(), q.ring.modulus);
        st.lagrangian = same_column_lattice(Mat::hstack(ann, nI), Mat::hstack(j, nI));
    } else {
        st.lagrangian = same_column_lattice(ann, j);
    }
    return st;
}

int arf_invariant(const QuadForm& q) {
    if (!(q.ring.kind == RingKind::PrimeField && q.ring.modulus == 2))
        throw std::invalid_argument("arf_invariant: form must live over F_2");
    const size_t n = q.rank();
    Mat lambda = (q.psi + q.psi.transpose()).reduced(q.ring);
    if (rank_mod2(lambda) != n) throw std::invalid_argument("arf_invariant: singular form");
    if (n % 2 != 0) throw std::invalid_argument("arf_invariant: odd rank");
    const size_t g = n / 2;
    // count zeros of x^T psi x over F_2^n
    unsigned long zeros = 0;
    const unsigned long total = 1ul << n;
    for (unsigned long code = 0; code < total; ++code) {
        mpz_class v = 0;
        for (size_t i = 0; i < n; ++i) {
            if (!((code >> i) & 1)) continue;
            for (size_t jj = 0; jj < n; ++jj)
                if ((code >> jj) & 1) v += q.psi(i, jj);
        }
        if (v % 2 == 0) ++zeros;
    }
    unsigned long arf0 = (1ul << (2 * g - 1)) + (1ul << (g - 1));
    return zeros == arf0 ? 0 : 1;
}

long signature(const Mat& symmetric) {
    require_square(symmetric, "signature");
    if (symmetric != symmetric.transpose())
        throw std::invalid_argument("signature: matrix not symmetric");
    const size_t n = symmetric.rows();
    std::vector<std::vector<mpq_class>> S(n, std::vector<mpq_class>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) S[i][j] = mpq_class(symmetric(i, j));
    std::vector<size_t> alive(n);
    for (size_t i = 0; i < n; ++i) alive[i] = i;
    long sig = 0;
    while (!alive.empty()) {
        // find a nonzero diagonal entry among the live indices
        size_t pivot = alive.size();
        for (size_t a = 0; a < alive.size(); ++a)
            if (S[alive[a]][alive[a]] != 0) {
                pivot = a;
                break;
            }
        if (pivot == alive.size()) {
            // all live diagonal entries vanish: find off-diagonal nonzero and mix
            size_t ia = alive.size(), ib = alive.size();
            for (size_t a = 0; a < alive.size() && ia == alive.size(); ++a)
                for (size_t b = a + 1; b < alive.size(); ++b)
                    if (S[alive[a]][alive[b]] != 0) {
                        ia = a;
                        ib = b;
                        break;
                    }
            if (ia == alive.size()) break;  // zero block: contributes nothing
            size_t i = alive[ia], j = alive[ib];
            // e_i <- e_i + e_j (unimodular congruence) creates S_ii = 2 S_ij != 0
            for (size_t k = 0; k < n; ++k) S[i][k] += S[j][k];
            for (size_t k = 0; k < n; ++k) S[k][i] += S[k][j];
            continue;
        }
        size_t i = alive[pivot];
        sig += (S[i][i] > 0) ? 1 : -1;
        // clear row/column i against the remaining live indices
        for (size_t a = 0; a < alive.size(); ++a) {
            size_t j = alive[a];
            if (j == i || S[j][i] == 0) continue;
            mpq_class f = S[j][i] / S[i][i];
            for (size_t k = 0; k < n; ++k) S[j][k] -= f * S[i][k];
            for (size_t k = 0; k < n; ++k) S[k][j] -= f * S[k][i];
        }
        alive.erase(alive.begin() + pivot);
    }
    return sig;
}

WittValue witt_class_Z(const QuadForm& q) {
    if (q.ring.is_modular() && !(q.ring.kind == RingKind::PrimeField && q.ring.modulus == 2))
        throw std::invalid_argument("witt_class_Z: expects a form over Z (or F_2 for eps=-1)");
    Mat lambda = q.psi + mpz_class(q.eps.value) * q.psi.transpose();
    if (q.eps == EPS_PLUS) {
        mpz_class d = det(lambda);
        if (d != 1 && d != -1) throw std::invalid_argument("witt_class_Z: singular form");
        long sig = signature(lambda);
        if (sig % 8 != 0) throw std::invalid_argument("witt_class_Z: signature not divisible by 8");
        return WittValue{q.eps, sig / 8};
    }
    // eps = -1: Arf of the mod-2 reduction
    QuadForm q2{BaseRing::Fp(2), EPS_PLUS, q.psi.reduced(BaseRing::Fp(2))};
    return WittValue{q.eps, arf_invariant(q2)};
}

namespace {

// Enumerate candidate columns: nonzero vectors with entries in [-B, B],
// first nonzero entry positive (canonical sign), gcd of entries 1 (primitive).
std::vector<Mat> candidate_vectors(size_t m, long B) {
    std::vector<Mat> out;
    std::vector<long> v(m, -B);
    if (m == 0) return out;
    while (true) {
        // canonical: first nonzero positive; primitive
        size_t fnz = m;
        for (size_t i = 0; i < m; ++i)
            if (v[i] != 0) {
                fnz = i;
                break;
            }
        if (fnz != m && v[fnz] > 0) {
            mpz_class g = 0;
            for (size_t i = 0; i < m; ++i) {
                mpz_class a = abs(mpz_class(v[i]));
                mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), a.get_mpz_t());
            }
            if (g == 1) {
                Mat c(m, 1);
                for (size_t i = 0; i < m; ++i) c(i, 0) = v[i];
                out.push_back(c);
            }
        }
        size_t i = 0;
        while (i < m && v[i] == B) v[i++] = -B;
        if (i == m) break;
        ++v[i];
    }
    return out;
}

bool lex_less(const Mat& a, const Mat& b) {
    for (size_t i = 0; i < a.rows(); ++i) {
        if (a(i, 0) < b(i, 0)) return true;
        if (a(i, 0) > b(i, 0)) return false;
    }
    return false;
}

}  // namespace

SearchResult sublattice_search(size_t ambient_rank, long entry_bound, size_t k,
                               const std::function<bool(const Mat&)>& accept,
                               const std::function<bool(const Mat&, const Mat&)>& pair_ok) {
    SearchResult res;
    if (k == 0) {
        Mat empty(ambient_rank, 0);
        if (accept(empty)) {
            res.found = true;
            res.witness = empty;
        }
        return res;
    }
    std::vector<Mat> cand = candidate_vectors(ambient_rank, entry_bound);
    std::vector<size_t> ok1;
    for (size_t i = 0; i < cand.size(); ++i)
        if (pair_ok(cand[i], cand[i])) ok1.push_back(i);

    std::vector<size_t> stack;
    std::function<bool()> rec = [&]() -> bool {
        if (stack.size() == k) {
            Mat j(ambient_rank, k);
            for (size_t c = 0; c < k; ++c)
                for (size_t r = 0; r < ambient_rank; ++r) j(r, c) = cand[ok1[stack[c]]](r, 0);
            if (!accept(j)) return false;
            res.found = true;
            res.witness = hermite_column_basis(j);
            return true;
        }
        size_t start = stack.empty() ? 0 : stack.back() + 1;
        for (size_t i = start; i < ok1.size(); ++i) {
            bool compat = true;
            for (size_t s : stack) {
                if (!pair_ok(cand[ok1[s]], cand[ok1[i]]) || !pair_ok(cand[ok1[i]], cand[ok1[s]])) {
                    compat = false;
                    break;
                }
            }
            if (!compat) continue;
            stack.push_back(i);
            if (rec()) return true;
            stack.pop_back();
        }
        return false;
    };
    rec();
    return res;
}

SearchResult lagrangian_search(const QuadForm& q, long entry_bound, size_t k) {
    if (entry_bound < 1) throw std::invalid_argument("lagrangian_search: bound must be >= 1");
    Mat lambda = q.psi + mpz_class(q.eps.value) * q.psi.transpose();
    auto pair_ok = [&](const Mat& u, const Mat& v) {
        if (u == v) {
            // isotropy of the quadratic class on a single vector:
            // u^T psi u must be representable as chi - eps chi^* on rank 1
            Mat uu = (u.transpose() * q.psi * u).reduced(q.ring);
            return q_equal(uu, Mat::zero(1, 1), q.eps, q.ring);
        }
        Mat p = (u.transpose() * lambda * v).reduced(q.ring);
        return p.is_zero();
    };
    auto accept = [&](const Mat& j) { return is_lagrangian(q, j).lagrangian; };
    return sublattice_search(q.rank(), entry_bound, k, accept, pair_ok);
}

}  // namespace skit
