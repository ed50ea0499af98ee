#pragma once

// Test-only oracles, coded independently of the library implementation paths
// they check. Everything here is brute force or textbook row/column reduction.

#include <random>
#include <stdexcept>
#include <vector>

#include "surgerykit/linalg.hpp"
#include "surgerykit/mat.hpp"

namespace oracle {

using skit::Mat;

// Invariant factors by repeated gcd row/column reduction (no divisibility
// fix-up trick shared with the library; this one reduces the whole matrix to
// diagonal form by gcd of all entries at each step).
inline std::vector<mpz_class> invariant_factors(Mat A) {
    std::vector<mpz_class> out;
    size_t top = 0;
    const size_t m = A.rows(), n = A.cols();
    while (top < m && top < n) {
        // gcd of all entries in the remaining block
        mpz_class g = 0;
        for (size_t i = top; i < m; ++i)
            for (size_t j = top; j < n; ++j) {
                mpz_class a = abs(A(i, j));
                mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), a.get_mpz_t());
            }
        if (g == 0) break;
        // bring an entry of minimal nonzero absolute value to (top, top) and
        // reduce until it divides everything, then clear its row and column
        bool stable = false;
        while (!stable) {
            size_t bi = top, bj = top;
            mpz_class best = 0;
            for (size_t i = top; i < m; ++i)
                for (size_t j = top; j < n; ++j) {
                    if (A(i, j) == 0) continue;
                    mpz_class a = abs(A(i, j));
                    if (best == 0 || a < best) {
                        best = a;
                        bi = i;
                        bj = j;
                    }
                }
            for (size_t k = 0; k < n; ++k) std::swap(A(top, k), A(bi, k));
            for (size_t k = 0; k < m; ++k) std::swap(A(k, top), A(k, bj));
            stable = true;
            for (size_t i = top + 1; i < m; ++i) {
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), A(i, top).get_mpz_t(), A(top, top).get_mpz_t());
                for (size_t k = 0; k < n; ++k) A(i, k) -= q * A(top, k);
                if (A(i, top) != 0) stable = false;
            }
            for (size_t j = top + 1; j < n; ++j) {
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), A(top, j).get_mpz_t(), A(top, top).get_mpz_t());
                for (size_t k = 0; k < m; ++k) A(k, j) -= q * A(k, top);
                if (A(top, j) != 0) stable = false;
            }
            if (stable) {
                // pivot must divide every remaining entry; if not, fold the
                // offending row in and restart
                for (size_t i = top + 1; i < m && stable; ++i)
                    for (size_t j = top + 1; j < n && stable; ++j)
                        if (A(i, j) % A(top, top) != 0) {
                            for (size_t k = 0; k < n; ++k) A(top, k) += A(i, k);
                            stable = false;
                        }
            }
        }
        out.push_back(abs(A(top, top)));
        ++top;
    }
    return out;
}

// Brute-force kernel over small boxes: all integer vectors with entries in
// [-B, B] that A kills; returns them as columns (not reduced to a basis).
inline Mat kernel_vectors_bruteforce(const Mat& A, long B) {
    const size_t n = A.cols();
    std::vector<std::vector<long>> found;
    std::vector<long> v(n, -B);
    while (true) {
        bool nonzero = false;
        for (size_t i = 0; i < n; ++i)
            if (v[i] != 0) nonzero = true;
        if (nonzero) {
            bool in_ker = true;
            for (size_t i = 0; i < A.rows() && in_ker; ++i) {
                mpz_class s = 0;
                for (size_t j = 0; j < n; ++j) s += A(i, j) * v[j];
                if (s != 0) in_ker = false;
            }
            if (in_ker) found.push_back(v);
        }
        size_t i = 0;
        while (i < n && v[i] == B) v[i++] = -B;
        if (i == n) break;
        ++v[i];
    }
    Mat K(n, found.size());
    for (size_t j = 0; j < found.size(); ++j)
        for (size_t i = 0; i < n; ++i) K(i, j) = found[j][i];
    return K;
}

// Minimal s >= 1 with A g = s y solvable, by trying s = 1, 2, ... up to cap.
inline mpz_class min_denominator_bruteforce(const Mat& A, const Mat& y, long cap) {
    for (long s = 1; s <= cap; ++s) {
        if (skit::solve_integer(A, mpz_class(s) * y)) return s;
    }
    return 0;  // not found below cap
}

// Exact signature via the principal-minor sign rule (Jacobi), applicable when
// all leading principal minors are nonzero; the tests only feed such input.
inline long signature_principal_minors(const Mat& S) {
    const size_t n = S.rows();
    long sig = 0;
    mpz_class prev = 1;
    for (size_t k = 1; k <= n; ++k) {
        mpz_class mk = skit::det(S.submatrix(0, 0, k, k));
        if (mk == 0) throw std::runtime_error("oracle signature: zero principal minor");
        sig += (mpz_class(prev * mk) > 0) ? 1 : -1;
        prev = mk;
    }
    return sig;
}

inline Mat random_matrix(std::mt19937_64& rng, size_t r, size_t c, long lo = -5, long hi = 5) {
    std::uniform_int_distribution<long> d(lo, hi);
    Mat m(r, c);
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < c; ++j) m(i, j) = d(rng);
    return m;
}

// Random unimodular matrix: product of elementary row operations.
inline Mat random_unimodular(std::mt19937_64& rng, size_t n, int steps = 12) {
    Mat U = Mat::identity(n);
    if (n < 1) return U;
    std::uniform_int_distribution<long> coef(-2, 2);
    std::uniform_int_distribution<size_t> idx(0, n - 1);
    for (int s = 0; s < steps; ++s) {
        size_t i = idx(rng), j = idx(rng);
        if (i == j) continue;
        mpz_class c = coef(rng);
        for (size_t k = 0; k < n; ++k) U(i, k) += c * U(j, k);
    }
    return U;
}

}  // namespace oracle
