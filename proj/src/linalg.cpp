#include "surgerykit/linalg.hpp"

#include <algorithm>
#include <stdexcept>

namespace skit {

FinAbGroup FinAbGroup::direct_sum(const FinAbGroup& o) const {
    std::vector<mpz_class> all = torsion;
    all.insert(all.end(), o.torsion.begin(), o.torsion.end());
    // normalize to a divisibility chain: pairwise replace (a,b) by (gcd, lcm)
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < all.size(); ++i)
            for (size_t j = i + 1; j < all.size(); ++j) {
                if (all[j] % all[i] == 0) continue;
                mpz_class g, l;
                mpz_gcd(g.get_mpz_t(), all[i].get_mpz_t(), all[j].get_mpz_t());
                l = all[i] / g * all[j];
                all[i] = g;
                all[j] = l;
                changed = true;
            }
    }
    FinAbGroup r;
    r.free_rank = free_rank + o.free_rank;
    for (auto& d : all)
        if (d > 1) r.torsion.push_back(d);
    std::sort(r.torsion.begin(), r.torsion.end());
    return r;
}

std::string FinAbGroup::str() const {
    if (is_trivial()) return "0";
    std::string s;
    if (free_rank > 0) s += "Z^" + std::to_string(free_rank);
    for (const auto& d : torsion) {
        if (!s.empty()) s += " + ";
        s += "Z/" + d.get_str();
    }
    return s;
}

namespace {

void swap_rows(Mat& M, size_t i, size_t j) {
    if (i == j) return;
    for (size_t k = 0; k < M.cols(); ++k) std::swap(M(i, k), M(j, k));
}
void swap_cols(Mat& M, size_t i, size_t j) {
    if (i == j) return;
    for (size_t k = 0; k < M.rows(); ++k) std::swap(M(k, i), M(k, j));
}
void add_row(Mat& M, size_t i, size_t j, const mpz_class& c) {  // row_i += c*row_j
    for (size_t k = 0; k < M.cols(); ++k) M(i, k) += c * M(j, k);
}
void add_col(Mat& M, size_t i, size_t j, const mpz_class& c) {  // col_i += c*col_j
    for (size_t k = 0; k < M.rows(); ++k) M(k, i) += c * M(k, j);
}
void negate_row(Mat& M, size_t i) {
    for (size_t k = 0; k < M.cols(); ++k) M(i, k) = -M(i, k);
}
void negate_col(Mat& M, size_t i) {
    for (size_t k = 0; k < M.rows(); ++k) M(k, i) = -M(k, i);
}

// Diagonalize S[t..,t..] by unimodular row/col ops mirrored into U, V.
// The pivot is re-selected as the global minimum of the remaining block on
// every pass; without that the intermediate entries explode.
void diagonalize_from(Mat& S, Mat& U, Mat& V, size_t t0) {
    const size_t m = S.rows(), n = S.cols();
    for (size_t t = t0; t < m && t < n; ++t) {
        while (true) {
            bool found = false;
            size_t pi = t, pj = t;
            mpz_class best;
            for (size_t i = t; i < m; ++i)
                for (size_t j = t; j < n; ++j) {
                    if (S(i, j) == 0) continue;
                    mpz_class a = abs(S(i, j));
                    if (!found || a < best) {
                        found = true;
                        best = a;
                        pi = i;
                        pj = j;
                    }
                }
            if (!found) return;
            swap_rows(S, t, pi);
            swap_rows(U, t, pi);
            swap_cols(S, t, pj);
            swap_cols(V, t, pj);

            bool clean = true;
            for (size_t i = 0; i < m; ++i) {
                if (i == t || S(i, t) == 0) continue;
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), S(i, t).get_mpz_t(), S(t, t).get_mpz_t());
                add_row(S, i, t, -q);
                add_row(U, i, t, -q);
                if (S(i, t) != 0) clean = false;
            }
            for (size_t j = 0; j < n; ++j) {
                if (j == t || S(t, j) == 0) continue;
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), S(t, j).get_mpz_t(), S(t, t).get_mpz_t());
                add_col(S, j, t, -q);
                add_col(V, j, t, -q);
                if (S(t, j) != 0) clean = false;
            }
            if (clean) break;
        }
        if (S(t, t) < 0) {
            negate_row(S, t);
            negate_row(U, t);
        }
    }
}

}  // namespace

SmithDecomposition smith_decompose(const Mat& A) {
    const size_t m = A.rows(), n = A.cols();
    SmithDecomposition sd;
    sd.U = Mat::identity(m);
    sd.V = Mat::identity(n);
    sd.S = A;

    diagonalize_from(sd.S, sd.U, sd.V, 0);

    // enforce the divisibility chain
    const size_t lim = std::min(m, n);
    bool ok = false;
    while (!ok) {
        ok = true;
        for (size_t i = 0; i + 1 < lim; ++i) {
            const mpz_class &a = sd.S(i, i), &b = sd.S(i + 1, i + 1);
            if (a == 0 && b != 0) {  // zero before nonzero: swap
                swap_rows(sd.S, i, i + 1);
                swap_rows(sd.U, i, i + 1);
                swap_cols(sd.S, i, i + 1);
                swap_cols(sd.V, i, i + 1);
                ok = false;
                continue;
            }
            if (a == 0 || b % a == 0) continue;
            add_col(sd.S, i, i + 1, 1);
            add_col(sd.V, i, i + 1, 1);
            diagonalize_from(sd.S, sd.U, sd.V, i);
            ok = false;
        }
    }
    sd.rank = 0;
    for (size_t i = 0; i < lim; ++i)
        if (sd.S(i, i) != 0) ++sd.rank;
    return sd;
}

mpz_class det(const Mat& A) {
    if (!A.is_square()) throw std::invalid_argument("det: matrix not square");
    const size_t n = A.rows();
    if (n == 0) return 1;
    Mat M = A;  // Bareiss fraction-free elimination
    mpz_class prev = 1;
    int sign = 1;
    for (size_t k = 0; k + 1 < n; ++k) {
        if (M(k, k) == 0) {
            size_t p = k + 1;
            while (p < n && M(p, k) == 0) ++p;
            if (p == n) return 0;
            swap_rows(M, k, p);
            sign = -sign;
        }
        for (size_t i = k + 1; i < n; ++i)
            for (size_t j = k + 1; j < n; ++j) {
                mpz_class num = M(i, j) * M(k, k) - M(i, k) * M(k, j);
                mpz_class q;
                mpz_divexact(q.get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
                M(i, j) = q;
            }
        prev = M(k, k);
    }
    return sign * M(n - 1, n - 1);
}

bool is_unimodular(const Mat& A, const BaseRing& ring) {
    if (!A.is_square()) return false;
    mpz_class d = det(A);
    if (!ring.is_modular()) return d == 1 || d == -1;
    d = ring.reduce(d);
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), ring.modulus.get_mpz_t());
    return g == 1;
}

Mat inverse_unimodular(const Mat& A) {
    if (!is_unimodular(A)) throw std::invalid_argument("inverse_unimodular: det != +-1");
    SmithDecomposition sd = smith_decompose(A);
    for (size_t i = 0; i < A.rows(); ++i)
        if (sd.S(i, i) != 1) throw std::logic_error("inverse_unimodular: SNF not identity");
    return sd.V * sd.U;  // A^{-1} = V S^{-1} U with S = I
}

size_t rank(const Mat& A) { return smith_decompose(A).rank; }

Mat hermite_column_basis(const Mat& A) {
    const size_t m = A.rows();
    Mat H = A;
    size_t c = 0;
    for (size_t r = 0; r < m && c < H.cols(); ++r) {
        while (true) {
            size_t nz = H.cols();
            for (size_t j = c; j < H.cols(); ++j)
                if (H(r, j) != 0 && (nz == H.cols() || abs(H(r, j)) < abs(H(r, nz)))) nz = j;
            if (nz == H.cols()) break;
            swap_cols(H, c, nz);
            bool again = false;
            for (size_t j = c + 1; j < H.cols(); ++j) {
                if (H(r, j) == 0) continue;
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), H(r, j).get_mpz_t(), H(r, c).get_mpz_t());
                add_col(H, j, c, -q);
                if (H(r, j) != 0) again = true;
            }
            if (!again) break;
        }
        if (c < H.cols() && H(r, c) != 0) {
            if (H(r, c) < 0) negate_col(H, c);
            for (size_t j = 0; j < c; ++j) {
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), H(r, j).get_mpz_t(), H(r, c).get_mpz_t());
                add_col(H, j, c, -q);
            }
            ++c;
        }
    }
    Mat R(m, c);
    for (size_t j = 0; j < c; ++j)
        for (size_t i = 0; i < m; ++i) R(i, j) = H(i, j);
    return R;
}

Mat kernel_basis(const Mat& A, const BaseRing& ring) {
    if (!ring.is_modular()) {
        SmithDecomposition sd = smith_decompose(A);
        size_t n = A.cols();
        Mat K(n, n - sd.rank);
        for (size_t j = sd.rank; j < n; ++j)
            for (size_t i = 0; i < n; ++i) K(i, j - sd.rank) = sd.V(i, j);
        return K;
    }
    // kernel mod n: x with A x = n y; project (x;y) -> x, canonicalize mod n
    const size_t m = A.rows(), n = A.cols();
    Mat B = Mat::hstack(A, Mat::scalar(m, -ring.modulus));
    Mat K = kernel_basis(B, BaseRing::Z());
    Mat X(n, K.cols());
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < K.cols(); ++j) X(i, j) = ring.reduce(K(i, j));
    Mat H = hermite_column_basis(Mat::hstack(X, Mat::scalar(n, ring.modulus)));
    Mat R = H.reduced(ring);
    // drop columns that reduce to zero mod n
    std::vector<size_t> keep;
    for (size_t j = 0; j < R.cols(); ++j) {
        bool zero = true;
        for (size_t i = 0; i < R.rows(); ++i)
            if (R(i, j) != 0) zero = false;
        if (!zero) keep.push_back(j);
    }
    Mat out(n, keep.size());
    for (size_t j = 0; j < keep.size(); ++j)
        for (size_t i = 0; i < n; ++i) out(i, j) = R(i, keep[j]);
    return out;
}

Cokernel cokernel(const Mat& A, const BaseRing& ring) {
    Mat Awork = ring.is_modular() ? Mat::hstack(A, Mat::scalar(A.rows(), ring.modulus)) : A;
    const size_t m = A.rows();
    SmithDecomposition sd = smith_decompose(Awork);
    Cokernel ck;
    Mat Uinv = inverse_unimodular(sd.U);
    std::vector<size_t> tors_idx;
    for (size_t i = 0; i < sd.rank; ++i)
        if (sd.S(i, i) > 1) tors_idx.push_back(i);
    ck.group.free_rank = m - sd.rank;
    for (size_t i : tors_idx) ck.group.torsion.push_back(sd.S(i, i));
    ck.gen_rows = Mat(tors_idx.size() + ck.group.free_rank, m);
    for (size_t k = 0; k < tors_idx.size(); ++k)
        for (size_t j = 0; j < m; ++j) ck.gen_rows(k, j) = sd.U(tors_idx[k], j);
    for (size_t k = sd.rank; k < m; ++k)
        for (size_t j = 0; j < m; ++j) ck.gen_rows(tors_idx.size() + (k - sd.rank), j) = sd.U(k, j);
    ck.lifts = Mat(m, tors_idx.size());
    for (size_t k = 0; k < tors_idx.size(); ++k)
        for (size_t i = 0; i < m; ++i) ck.lifts(i, k) = Uinv(i, tors_idx[k]);
    return ck;
}

std::optional<DenSolution> solve_with_denominator(const Mat& A, const Mat& y) {
    if (y.cols() != 1 || y.rows() != A.rows())
        throw std::invalid_argument("solve_with_denominator: y must be a matching column");
    SmithDecomposition sd = smith_decompose(A);
    Mat u = sd.U * y;
    const size_t m = A.rows(), n = A.cols();
    for (size_t i = sd.rank; i < m; ++i)
        if (u(i, 0) != 0) return std::nullopt;
    mpz_class s = 1;
    for (size_t i = 0; i < sd.rank; ++i) {
        if (u(i, 0) == 0) continue;
        mpz_class g, need;
        mpz_gcd(g.get_mpz_t(), sd.S(i, i).get_mpz_t(), u(i, 0).get_mpz_t());
        need = sd.S(i, i) / g;
        mpz_lcm(s.get_mpz_t(), s.get_mpz_t(), need.get_mpz_t());
    }
    Mat z(n, 1);
    for (size_t i = 0; i < sd.rank; ++i) {
        mpz_class num = s * u(i, 0), q;
        mpz_divexact(q.get_mpz_t(), num.get_mpz_t(), sd.S(i, i).get_mpz_t());
        z(i, 0) = q;
    }
    return DenSolution{s, sd.V * z};
}

std::optional<Mat> solve_integer(const Mat& A, const Mat& b) {
    if (b.rows() != A.rows()) throw std::invalid_argument("solve_integer: shape mismatch");
    SmithDecomposition sd = smith_decompose(A);
    Mat u = sd.U * b;
    Mat x(A.cols(), b.cols());
    for (size_t c = 0; c < b.cols(); ++c) {
        for (size_t i = 0; i < A.rows(); ++i) {
            if (i < sd.rank) {
                if (u(i, c) % sd.S(i, i) != 0) return std::nullopt;
            } else if (u(i, c) != 0) {
                return std::nullopt;
            }
        }
        for (size_t i = 0; i < sd.rank && i < A.cols(); ++i) {
            mpz_class q;
            mpz_divexact(q.get_mpz_t(), u(i, c).get_mpz_t(), sd.S(i, i).get_mpz_t());
            x(i, c) = q;
        }
    }
    return sd.V * x;
}

std::optional<Mat> solve_mod(const Mat& A, const Mat& b, const mpz_class& n) {
    Mat B = Mat::hstack(A, Mat::scalar(A.rows(), n));
    auto sol = solve_integer(B, b);
    if (!sol) return std::nullopt;
    Mat x(A.cols(), b.cols());
    BaseRing r = BaseRing::Zmod(n);
    for (size_t i = 0; i < A.cols(); ++i)
        for (size_t j = 0; j < b.cols(); ++j) x(i, j) = r.reduce((*sol)(i, j));
    return x;
}

bool is_split_injection(const Mat& A, const BaseRing& ring) {
    if (A.cols() == 0) return true;
    if (!ring.is_modular()) {
        SmithDecomposition sd = smith_decompose(A);
        if (sd.rank != A.cols()) return false;
        for (size_t i = 0; i < sd.rank; ++i)
            if (sd.S(i, i) != 1) return false;
        return true;
    }
    // split injection over Z/n iff a left inverse exists: A^T X = I (mod n)
    return solve_mod(A.transpose(), Mat::identity(A.cols()), ring.modulus).has_value();
}

FinAbGroup homology(const Mat& B, const Mat& A, const BaseRing& ring) {
    if (B.cols() != A.rows()) throw std::invalid_argument("homology: shape mismatch");
    if (!ring.is_modular()) {
        if (!(B * A).is_zero()) throw std::invalid_argument("homology: B*A != 0");
        Mat K = kernel_basis(B);
        auto X = solve_integer(K, A);
        if (!X) throw std::logic_error("homology: image not inside kernel");
        return cokernel(*X).group;
    }
    if (!(B * A).reduced(ring).is_zero()) throw std::invalid_argument("homology: B*A != 0 (mod n)");
    const mpz_class& n = ring.modulus;
    Mat K = kernel_basis(B, ring);
    // coefficients c with K c = 0 (mod n): relations among the chosen generators
    Mat rel = kernel_basis(K, ring);
    Mat Kaug = Mat::hstack(K, Mat::scalar(K.rows(), n));
    auto X = solve_integer(Kaug, A);
    if (!X) throw std::logic_error("homology(mod): image not inside kernel");
    Mat Xk = X->submatrix(0, 0, K.cols(), X->cols());
    Mat rels = Mat::hstack(Mat::hstack(Xk, rel), Mat::scalar(K.cols(), n));
    return cokernel(rels).group;
}

bool same_column_lattice(const Mat& A, const Mat& B) {
    if (A.rows() != B.rows()) return false;
    return hermite_column_basis(A) == hermite_column_basis(B);
}

bool lattice_contains(const Mat& A, const Mat& B) {
    if (B.cols() == 0) return true;
    return solve_integer(A, B).has_value();
}

Mat saturate_lattice(const Mat& A) {
    SmithDecomposition sd = smith_decompose(A);
    Mat Uinv = inverse_unimodular(sd.U);
    Mat R(A.rows(), sd.rank);
    for (size_t j = 0; j < sd.rank; ++j)
        for (size_t i = 0; i < A.rows(); ++i) R(i, j) = Uinv(i, j);
    return R;
}

Mat complement_of_summand(const Mat& A) {
    if (!is_split_injection(A)) throw std::invalid_argument("complement_of_summand: not a summand");
    SmithDecomposition sd = smith_decompose(A);
    Mat Uinv = inverse_unimodular(sd.U);
    const size_t m = A.rows(), k = A.cols();
    Mat C(m, m - k);
    for (size_t j = k; j < m; ++j)
        for (size_t i = 0; i < m; ++i) C(i, j - k) = Uinv(i, j);
    return C;
}

}  // namespace skit
