#pragma once

#include <equilab/exact/rational.hpp>

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace equilab {

/// Dense row-major matrix over Q.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    Mat(std::size_t rows, std::size_t cols, std::vector<Rat> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (data_.size() != rows_ * cols_) throw DimensionMismatch("Mat: entry count != rows*cols");
    }
    Mat(std::initializer_list<std::initializer_list<Rat>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw DimensionMismatch("Mat: ragged initializer");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }
    static Mat unit(std::size_t rows, std::size_t cols, std::size_t i, std::size_t j) {
        Mat m(rows, cols);
        m(i, j) = 1;
        return m;
    }
    static Mat diagonal(std::span<const Rat> d) {
        Mat m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }
    /// Column vector.
    static Mat column(std::span<const Rat> v) {
        return Mat(v.size(), 1, std::vector<Rat>(v.begin(), v.end()));
    }

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }
    [[nodiscard]] bool square() const { return rows_ == cols_; }

    Rat& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Rat& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    [[nodiscard]] const std::vector<Rat>& entries() const { return data_; }

    [[nodiscard]] std::vector<Rat> col(std::size_t j) const {
        std::vector<Rat> v(rows_);
        for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
        return v;
    }
    [[nodiscard]] std::vector<Rat> row(std::size_t i) const {
        return {data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_)};
    }

    [[nodiscard]] Mat transpose() const {
        Mat t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    [[nodiscard]] Mat select_cols(std::span<const std::size_t> idx) const {
        Mat m(rows_, idx.size());
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < idx.size(); ++k) m(i, k) = (*this)(i, idx[k]);
        return m;
    }
    [[nodiscard]] Mat select_rows(std::span<const std::size_t> idx) const {
        Mat m(idx.size(), cols_);
        for (std::size_t k = 0; k < idx.size(); ++k)
            for (std::size_t j = 0; j < cols_; ++j) m(k, j) = (*this)(idx[k], j);
        return m;
    }

    [[nodiscard]] bool is_zero() const {
        return std::all_of(data_.begin(), data_.end(), [](const Rat& x) { return sgn(x) == 0; });
    }
    [[nodiscard]] bool is_diagonal() const {
        if (!square()) return false;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                if (i != j && sgn((*this)(i, j)) != 0) return false;
        return true;
    }
    [[nodiscard]] Rat trace() const {
        if (!square()) throw DimensionMismatch("trace of non-square matrix");
        Rat t = 0;
        for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    Mat& operator+=(const Mat& o) {
        check_same_shape(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        check_same_shape(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    Mat& operator*=(const Rat& s) {
        for (auto& x : data_) x *= s;
        return *this;
    }

    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
    friend Mat operator*(Mat a, const Rat& s) { return a *= s; }
    friend Mat operator*(const Rat& s, Mat a) { return a *= s; }
    friend Mat operator-(Mat a) {
        for (auto& x : a.data_) x = -x;
        return a;
    }

    friend Mat operator*(const Mat& a, const Mat& b) {
        if (a.cols_ != b.rows_) throw DimensionMismatch("matrix product shape mismatch");
        Mat c(a.rows_, b.cols_);
        Rat tmp;
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Rat& aik = a(i, k);
                if (sgn(aik) == 0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    const Rat& bkj = b(k, j);
                    if (sgn(bkj) == 0) continue;
                    tmp = aik * bkj;
                    c(i, j) += tmp;
                }
            }
        }
        return c;
    }

    friend bool operator==(const Mat& a, const Mat& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    void check_same_shape(const Mat& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("matrix shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rat> data_;
};

inline Mat hstack(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows()) throw DimensionMismatch("hstack: row count mismatch");
    Mat m(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
        for (std::size_t j = 0; j < b.cols(); ++j) m(i, a.cols() + j) = b(i, j);
    }
    return m;
}

inline Mat vstack(const Mat& a, const Mat& b) {
    if (a.cols() != b.cols()) throw DimensionMismatch("vstack: column count mismatch");
    Mat m(a.rows() + b.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) m(a.rows() + i, j) = b(i, j);
    return m;
}

/// Kronecker product a ⊗ b.
inline Mat kron(const Mat& a, const Mat& b) {
    Mat m(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (sgn(a(i, j)) == 0) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    m(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
        }
    return m;
}

inline Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

/// Row-major flattening of a matrix into a column vector (vec by rows).
inline Mat vectorize(const Mat& m) { return Mat(m.rows() * m.cols(), 1, m.entries()); }

inline Mat unvectorize(std::span<const Rat> v, std::size_t rows, std::size_t cols) {
    return Mat(rows, cols, std::vector<Rat>(v.begin(), v.end()));
}

struct EchelonForm {
    Mat reduced;                      // reduced row echelon form
    std::vector<std::size_t> pivots;  // pivot column of each nonzero row
};

/// Gauss-Jordan elimination to reduced row echelon form.
inline EchelonForm rref(Mat m) {
    EchelonForm out;
    std::size_t r = 0;
    Rat factor;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t p = r;
        while (p < m.rows() && sgn(m(p, c)) == 0) ++p;
        if (p == m.rows()) continue;
        if (p != r)
            for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
        Rat inv = 1 / m(r, c);
        for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == r || sgn(m(i, c)) == 0) continue;
            factor = m(i, c);
            for (std::size_t j = c; j < m.cols(); ++j)
                if (sgn(m(r, j)) != 0) m(i, j) -= factor * m(r, j);
        }
        out.pivots.push_back(c);
        ++r;
    }
    out.reduced = std::move(m);
    return out;
}

inline std::size_t rank(const Mat& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    // Eliminate along the shorter side.
    return m.rows() <= m.cols() ? rref(m).pivots.size() : rref(m.transpose()).pivots.size();
}

inline Rat determinant(Mat m) {
    if (!m.square()) throw DimensionMismatch("determinant of non-square matrix");
    const std::size_t n = m.rows();
    Rat det = 1;
    Rat factor;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && sgn(m(p, c)) == 0) ++p;
        if (p == n) return 0;
        if (p != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
            det = -det;
        }
        det *= m(c, c);
        for (std::size_t i = c + 1; i < n; ++i) {
            if (sgn(m(i, c)) == 0) continue;
            factor = m(i, c) / m(c, c);
            for (std::size_t j = c; j < n; ++j) m(i, j) -= factor * m(c, j);
        }
    }
    return det;
}

class SingularMatrix : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

inline Mat inverse(const Mat& m) {
    if (!m.square()) throw DimensionMismatch("inverse of non-square matrix");
    const std::size_t n = m.rows();
    auto e = rref(hstack(m, Mat::identity(n)));
    if (e.pivots.size() < n || e.pivots[n - 1] != n - 1) throw SingularMatrix("matrix is singular");
    Mat inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv(i, j) = e.reduced(i, n + j);
    return inv;
}

inline Mat power(const Mat& m, unsigned k) {
    Mat r = Mat::identity(m.rows());
    for (unsigned i = 0; i < k; ++i) r = r * m;
    return r;
}

inline std::string to_string(const Mat& m) {
    std::string s = "[";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        s += i ? "; " : "";
        for (std::size_t j = 0; j < m.cols(); ++j) s += (j ? " " : "") + m(i, j).get_str();
    }
    return s + "]";
}

}  // namespace equilab
