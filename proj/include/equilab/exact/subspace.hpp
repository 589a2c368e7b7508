#pragma once

#include <equilab/exact/matrix.hpp>

#include <span>
#include <stdexcept>
#include <vector>

namespace equilab {

class NotNilpotent : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Column span of a rational matrix, stored in reduced column echelon form.
/// Two Subspace values are equal iff they span the same space.
class Subspace {
public:
    Subspace() = default;

    /// The zero subspace of the given ambient dimension.
    explicit Subspace(std::size_t ambient) : ambient_(ambient), basis_(ambient, 0) {}

    static Subspace full(std::size_t ambient) { return from_canonical(ambient, Mat::identity(ambient)); }

    /// Span of the columns of m (m.rows() is the ambient dimension).
    static Subspace span_of(const Mat& m);

    /// Span of the given standard basis vectors.
    static Subspace coordinate(std::size_t ambient, std::span<const std::size_t> idx) {
        Mat b(ambient, idx.size());
        for (std::size_t k = 0; k < idx.size(); ++k) b(idx[k], k) = 1;
        return span_of(b);
    }

    [[nodiscard]] std::size_t ambient_dim() const { return ambient_; }
    [[nodiscard]] std::size_t dim() const { return basis_.cols(); }
    [[nodiscard]] const Mat& basis() const { return basis_; }
    [[nodiscard]] bool is_zero() const { return dim() == 0; }
    [[nodiscard]] bool is_full() const { return dim() == ambient_; }

    /// Pivot row of each basis column (strictly increasing).
    [[nodiscard]] std::vector<std::size_t> pivots() const {
        std::vector<std::size_t> p;
        for (std::size_t j = 0; j < basis_.cols(); ++j) {
            std::size_t i = 0;
            while (sgn(basis_(i, j)) == 0) ++i;
            p.push_back(i);
        }
        return p;
    }

    [[nodiscard]] bool contains(std::span<const Rat> v) const {
        if (v.size() != ambient_) throw DimensionMismatch("contains: vector length != ambient dim");
        // Reduced echelon: v is in the span iff v - sum v[pivot_j] b_j = 0.
        auto piv = pivots();
        std::vector<Rat> r(v.begin(), v.end());
        for (std::size_t j = 0; j < piv.size(); ++j) {
            Rat c = r[piv[j]];
            if (sgn(c) == 0) continue;
            for (std::size_t i = 0; i < ambient_; ++i) r[i] -= c * basis_(i, j);
        }
        for (const auto& x : r)
            if (sgn(x) != 0) return false;
        return true;
    }

    [[nodiscard]] bool contains(const Subspace& other) const {
        if (other.ambient_ != ambient_) throw DimensionMismatch("contains: ambient mismatch");
        for (std::size_t j = 0; j < other.dim(); ++j)
            if (!contains(other.basis_.col(j))) return false;
        return true;
    }

    friend bool operator==(const Subspace& a, const Subspace& b) {
        return a.ambient_ == b.ambient_ && a.basis_ == b.basis_;
    }

    /// Builds a value from a basis already in reduced column echelon form.
    static Subspace from_canonical(std::size_t ambient, Mat basis) {
        Subspace s;
        s.ambient_ = ambient;
        s.basis_ = std::move(basis);
        return s;
    }

private:
    std::size_t ambient_ = 0;
    Mat basis_;
};

inline Subspace canonicalize(const Mat& m) {
    const std::size_t n = m.rows();
    if (m.cols() == 0) return Subspace(n);
    auto e = rref(m.transpose());
    const std::size_t k = e.pivots.size();
    Mat b(n, k);
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < n; ++i) b(i, j) = e.reduced(j, i);
    return Subspace::from_canonical(n, std::move(b));
}

inline Subspace Subspace::span_of(const Mat& m) { return canonicalize(m); }

/// ker(m) as a subspace of Q^{m.cols()}.
inline Subspace kernel_basis(const Mat& m) {
    const std::size_t c = m.cols();
    if (m.rows() == 0) return Subspace::full(c);
    auto e = rref(m);
    std::vector<bool> is_pivot(c, false);
    for (auto p : e.pivots) is_pivot[p] = true;
    std::vector<std::size_t> free;
    for (std::size_t j = 0; j < c; ++j)
        if (!is_pivot[j]) free.push_back(j);
    Mat b(c, free.size());
    for (std::size_t k = 0; k < free.size(); ++k) {
        b(free[k], k) = 1;
        for (std::size_t r = 0; r < e.pivots.size(); ++r) b(e.pivots[r], k) = -e.reduced(r, free[k]);
    }
    return canonicalize(b);
}

inline void require_same_ambient(const Subspace& u, const Subspace& w) {
    if (u.ambient_dim() != w.ambient_dim()) throw DimensionMismatch("subspaces live in different ambient spaces");
}

inline Subspace subspace_sum(const Subspace& u, const Subspace& w) {
    require_same_ambient(u, w);
    if (u.is_zero()) return w;
    if (w.is_zero()) return u;
    return canonicalize(hstack(u.basis(), w.basis()));
}

inline Subspace subspace_sum(std::span<const Subspace> parts) {
    if (parts.empty()) throw std::invalid_argument("subspace_sum: empty list");
    Mat acc = parts[0].basis();
    for (std::size_t i = 1; i < parts.size(); ++i) {
        require_same_ambient(parts[0], parts[i]);
        acc = hstack(acc, parts[i].basis());
    }
    return canonicalize(acc);
}

/// W_1 ∩ ... ∩ W_m as the kernel of the block matrix whose i-th block row is
/// [0 .. B_i  -B_{i+1} .. 0]; a kernel vector (c_1, ..., c_m) gives B_1 c_1.
inline Subspace subspace_intersect(std::span<const Subspace> parts) {
    if (parts.empty()) throw std::invalid_argument("subspace_intersect: empty list");
    const std::size_t n = parts[0].ambient_dim();
    for (const auto& p : parts) require_same_ambient(parts[0], p);
    if (parts.size() == 1) return parts[0];
    for (const auto& p : parts)
        if (p.is_zero()) return Subspace(n);

    std::vector<std::size_t> offset(parts.size() + 1, 0);
    for (std::size_t i = 0; i < parts.size(); ++i) offset[i + 1] = offset[i] + parts[i].dim();
    const std::size_t m = parts.size();
    Mat block((m - 1) * n, offset[m]);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const Mat& bi = parts[i].basis();
        const Mat& bn = parts[i + 1].basis();
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < bi.cols(); ++c) block(i * n + r, offset[i] + c) = bi(r, c);
            for (std::size_t c = 0; c < bn.cols(); ++c) block(i * n + r, offset[i + 1] + c) = -bn(r, c);
        }
    }
    Subspace ker = kernel_basis(block);
    const Mat& b1 = parts[0].basis();
    std::vector<std::size_t> first(b1.cols());
    for (std::size_t c = 0; c < first.size(); ++c) first[c] = c;
    return canonicalize(b1 * ker.basis().select_rows(first));
}

inline Subspace subspace_intersect(const Subspace& u, const Subspace& w) {
    const Subspace parts[2] = {u, w};
    return subspace_intersect(std::span<const Subspace>(parts));
}

/// Orthogonal complement for the standard dot product in the fixed coordinates.
inline Subspace orthogonal_complement(const Subspace& u) {
    if (u.is_zero()) return Subspace::full(u.ambient_dim());
    return kernel_basis(u.basis().transpose());
}

/// Image h(U) of a subspace under a square matrix.
inline Subspace apply(const Mat& h, const Subspace& u) {
    if (h.cols() != u.ambient_dim()) throw DimensionMismatch("apply: matrix/subspace shape mismatch");
    if (u.is_zero()) return Subspace(h.rows());
    return canonicalize(h * u.basis());
}

/// Dimension of the orthogonal projection of W' onto W, i.e. rank(B_W^T B_{W'}).
inline std::size_t projection_rank(const Subspace& w, const Subspace& w_prime) {
    require_same_ambient(w, w_prime);
    if (w.is_zero() || w_prime.is_zero()) return 0;
    return rank(w.basis().transpose() * w_prime.basis());
}

/// exp(n) for nilpotent n, as the finite sum of n^i / i!.
inline Mat nilpotent_exp(const Mat& n) {
    if (!n.square()) throw DimensionMismatch("nilpotent_exp: non-square matrix");
    const std::size_t d = n.rows();
    Mat result = Mat::identity(d);
    Mat term = Mat::identity(d);
    for (std::size_t i = 1; i <= d; ++i) {
        term = term * n;
        if (term.is_zero()) return result;
        if (i == d) break;
        term *= Rat(1, static_cast<unsigned long>(i));
        result += term;
    }
    if (d == 0) return result;
    throw NotNilpotent("nilpotent_exp: matrix is not nilpotent");
}

}  // namespace equilab
