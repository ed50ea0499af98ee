#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "surgerykit/ring.hpp"

namespace skit {

/// Dense matrix with exact integer entries, row-major.
/// Modules are column spaces; a homomorphism acts on the left.
/// 0 x n and n x 0 matrices are legal and show up constantly as zero modules.
class Mat {
  public:
    Mat() : rows_(0), cols_(0) {}
    Mat(size_t r, size_t c) : rows_(r), cols_(c), a_(r * c, mpz_class(0)) {}
    Mat(std::initializer_list<std::initializer_list<long>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        a_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_) throw std::invalid_argument("Mat: ragged initializer");
            for (long v : row) a_.emplace_back(v);
        }
    }

    static Mat zero(size_t r, size_t c) { return Mat(r, c); }
    static Mat identity(size_t n) {
        Mat m(n, n);
        for (size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }
    static Mat scalar(size_t n, const mpz_class& v) {
        Mat m(n, n);
        for (size_t i = 0; i < n; ++i) m(i, i) = v;
        return m;
    }
    static Mat col_vector(const std::vector<mpz_class>& v) {
        Mat m(v.size(), 1);
        for (size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
        return m;
    }

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    bool empty_shape() const { return rows_ == 0 || cols_ == 0; }
    bool is_square() const { return rows_ == cols_; }

    mpz_class& operator()(size_t i, size_t j) { return a_[i * cols_ + j]; }
    const mpz_class& operator()(size_t i, size_t j) const { return a_[i * cols_ + j]; }

    bool operator==(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }
    bool operator!=(const Mat& o) const { return !(*this == o); }

    bool is_zero() const {
        for (const auto& x : a_)
            if (x != 0) return false;
        return true;
    }
    bool is_identity() const {
        if (rows_ != cols_) return false;
        for (size_t i = 0; i < rows_; ++i)
            for (size_t j = 0; j < cols_; ++j)
                if ((*this)(i, j) != (i == j ? 1 : 0)) return false;
        return true;
    }

    Mat operator+(const Mat& o) const {
        check_same_shape(o, "+");
        Mat r(rows_, cols_);
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
        return r;
    }
    Mat operator-(const Mat& o) const {
        check_same_shape(o, "-");
        Mat r(rows_, cols_);
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
        return r;
    }
    Mat operator-() const {
        Mat r(rows_, cols_);
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = -a_[i];
        return r;
    }
    Mat operator*(const Mat& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("Mat*: shape mismatch");
        Mat r(rows_, o.cols_);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t k = 0; k < cols_; ++k) {
                const mpz_class& v = (*this)(i, k);
                if (v == 0) continue;
                for (size_t j = 0; j < o.cols_; ++j) r(i, j) += v * o(k, j);
            }
        return r;
    }
    friend Mat operator*(const mpz_class& s, const Mat& m) {
        Mat r(m.rows_, m.cols_);
        for (size_t i = 0; i < m.a_.size(); ++i) r.a_[i] = s * m.a_[i];
        return r;
    }
    friend Mat operator*(long s, const Mat& m) { return mpz_class(s) * m; }

    /// Dual map: with M* identified with Lambda^n via the standard basis and
    /// identity involution, f* is the transpose.
    Mat transpose() const {
        Mat r(cols_, rows_);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    Mat reduced(const BaseRing& ring) const {
        if (!ring.is_modular()) return *this;
        Mat r(rows_, cols_);
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = ring.reduce(a_[i]);
        return r;
    }

    Mat submatrix(size_t r0, size_t c0, size_t nr, size_t nc) const {
        if (r0 + nr > rows_ || c0 + nc > cols_) throw std::out_of_range("submatrix");
        Mat r(nr, nc);
        for (size_t i = 0; i < nr; ++i)
            for (size_t j = 0; j < nc; ++j) r(i, j) = (*this)(r0 + i, c0 + j);
        return r;
    }
    Mat col(size_t j) const { return submatrix(0, j, rows_, 1); }

    static Mat hstack(const Mat& a, const Mat& b) {
        if (a.rows_ != b.rows_) throw std::invalid_argument("hstack: row mismatch");
        Mat r(a.rows_, a.cols_ + b.cols_);
        for (size_t i = 0; i < a.rows_; ++i) {
            for (size_t j = 0; j < a.cols_; ++j) r(i, j) = a(i, j);
            for (size_t j = 0; j < b.cols_; ++j) r(i, a.cols_ + j) = b(i, j);
        }
        return r;
    }
    static Mat vstack(const Mat& a, const Mat& b) {
        if (a.cols_ != b.cols_) throw std::invalid_argument("vstack: col mismatch");
        Mat r(a.rows_ + b.rows_, a.cols_);
        for (size_t i = 0; i < a.rows_; ++i)
            for (size_t j = 0; j < a.cols_; ++j) r(i, j) = a(i, j);
        for (size_t i = 0; i < b.rows_; ++i)
            for (size_t j = 0; j < a.cols_; ++j) r(a.rows_ + i, j) = b(i, j);
        return r;
    }
    static Mat direct_sum(const Mat& a, const Mat& b) {
        Mat r(a.rows_ + b.rows_, a.cols_ + b.cols_);
        for (size_t i = 0; i < a.rows_; ++i)
            for (size_t j = 0; j < a.cols_; ++j) r(i, j) = a(i, j);
        for (size_t i = 0; i < b.rows_; ++i)
            for (size_t j = 0; j < b.cols_; ++j) r(a.rows_ + i, a.cols_ + j) = b(i, j);
        return r;
    }

    /// Assemble from a grid of blocks; block (i,j) must have rows row_sizes[i]
    /// and cols col_sizes[j]. Empty Mat{} entries read as zero blocks.
    static Mat from_blocks(const std::vector<size_t>& row_sizes, const std::vector<size_t>& col_sizes,
                           const std::vector<std::vector<Mat>>& blocks) {
        size_t R = 0, C = 0;
        for (size_t s : row_sizes) R += s;
        for (size_t s : col_sizes) C += s;
        Mat r(R, C);
        size_t roff = 0;
        for (size_t bi = 0; bi < row_sizes.size(); ++bi) {
            size_t coff = 0;
            for (size_t bj = 0; bj < col_sizes.size(); ++bj) {
                const Mat& blk = blocks.at(bi).at(bj);
                if (!(blk.rows() == 0 && blk.cols() == 0)) {
                    if (blk.rows() != row_sizes[bi] || blk.cols() != col_sizes[bj])
                        throw std::invalid_argument("from_blocks: block shape mismatch");
                    for (size_t i = 0; i < blk.rows(); ++i)
                        for (size_t j = 0; j < blk.cols(); ++j) r(roff + i, coff + j) = blk(i, j);
                }
                coff += col_sizes[bj];
            }
            roff += row_sizes[bi];
        }
        return r;
    }

    std::string str() const {
        std::string s = "[";
        for (size_t i = 0; i < rows_; ++i) {
            s += "[";
            for (size_t j = 0; j < cols_; ++j) {
                s += (*this)(i, j).get_str();
                if (j + 1 < cols_) s += ",";
            }
            s += "]";
            if (i + 1 < rows_) s += ",";
        }
        return s + "]";
    }

  private:
    void check_same_shape(const Mat& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument(std::string("Mat") + op + ": shape mismatch");
    }

    size_t rows_, cols_;
    std::vector<mpz_class> a_;
};

}  // namespace skit
