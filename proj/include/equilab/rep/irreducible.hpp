#pragma once

#include <equilab/rep/weights.hpp>

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace equilab {

enum class IrreducibleKind { absolutely_irreducible, reducible, inconclusive };

inline const char* to_string(IrreducibleKind k) {
    switch (k) {
        case IrreducibleKind::absolutely_irreducible: return "absolutely_irreducible";
        case IrreducibleKind::reducible: return "reducible";
        case IrreducibleKind::inconclusive: return "inconclusive";
    }
    return "?";
}

struct IrreducibleVerdict {
    IrreducibleKind kind = IrreducibleKind::inconclusive;
    std::optional<Subspace> witness;  // proper nonzero invariant subspace when reducible
    std::size_t algebra_dim = 0;
};

namespace detail {

/// Incrementally maintained row echelon basis of a span of vectors.
class EchelonSpan {
public:
    explicit EchelonSpan(std::size_t len) : len_(len) {}

    bool add(std::vector<Rat> v) {
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            const Rat c = v[piv_[k]];
            if (sgn(c) == 0) continue;
            const auto& r = rows_[k];
            for (std::size_t i = piv_[k]; i < len_; ++i)
                if (sgn(r[i]) != 0) v[i] -= c * r[i];
        }
        std::size_t p = 0;
        while (p < len_ && sgn(v[p]) == 0) ++p;
        if (p == len_) return false;
        Rat inv = 1 / v[p];
        for (std::size_t i = p; i < len_; ++i) v[i] *= inv;
        rows_.push_back(std::move(v));
        piv_.push_back(p);
        return true;
    }
    [[nodiscard]] std::size_t size() const { return rows_.size(); }

private:
    std::size_t len_;
    std::vector<std::vector<Rat>> rows_;
    std::vector<std::size_t> piv_;
};

/// Basis of the associative algebra generated by the identity and gens.
inline std::vector<Mat> algebra_closure(const std::vector<Mat>& gens, std::size_t n) {
    EchelonSpan span(n * n);
    std::vector<Mat> basis;
    std::deque<Mat> queue;
    Mat id = Mat::identity(n);
    span.add(id.entries());
    basis.push_back(id);
    queue.push_back(id);
    while (!queue.empty() && basis.size() < n * n) {
        Mat a = std::move(queue.front());
        queue.pop_front();
        for (const auto& x : gens) {
            Mat b = x * a;
            if (span.add(b.entries())) {
                basis.push_back(b);
                queue.push_back(std::move(b));
                if (basis.size() == n * n) break;
            }
        }
    }
    return basis;
}

/// Submodule generated by v: span{A v : A in the algebra}.
inline Subspace module_closure(const std::vector<Mat>& algebra, const Mat& v) {
    Mat cols(v.rows(), 0);
    for (const auto& a : algebra) cols = hstack(cols, a * v);
    return canonicalize(cols);
}

inline std::optional<Subspace> find_witness(const std::vector<Mat>& algebra, std::size_t n, std::uint64_t seed) {
    std::vector<Mat> algebra_t;
    for (const auto& a : algebra) algebra_t.push_back(a.transpose());

    auto try_vector = [&](const Mat& v) -> std::optional<Subspace> {
        if (v.is_zero()) return std::nullopt;
        auto s = module_closure(algebra, v);
        if (s.dim() > 0 && s.dim() < n) return s;
        auto st = module_closure(algebra_t, v);
        if (st.dim() > 0 && st.dim() < n) return orthogonal_complement(st);
        return std::nullopt;
    };
    auto try_kernel = [&](const Mat& m) -> std::optional<Subspace> {
        auto k = kernel_basis(m);
        for (std::size_t j = 0; j < k.dim(); ++j) {
            Mat v(n, 1, k.basis().col(j));
            if (auto w = try_vector(v)) return w;
        }
        return std::nullopt;
    };

    for (std::size_t i = 0; i < n; ++i) {
        Mat e(n, 1);
        e(i, 0) = 1;
        if (auto w = try_vector(e)) return w;
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> coef(-3, 3);
    for (int attempt = 0; attempt < 24; ++attempt) {
        Mat r(n, n);
        for (const auto& a : algebra) r += a * Rat(coef(rng));
        // Singular elements: r itself and r - lambda for each rational eigenvalue of r.
        if (auto w = try_kernel(r)) return w;
        try {
            auto dec = weight_decompose(r);
            for (const auto& mu : dec.eigenvalues)
                if (auto w = try_kernel(r - Mat::identity(n) * mu)) return w;
        } catch (const RationalityError&) {
            // irrational or non-diagonalizable element: only its kernel was useful
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// Burnside test: the generated algebra is all of M_n iff V is absolutely irreducible.
inline IrreducibleVerdict check_irreducible(const std::vector<Mat>& gens, std::size_t n, std::uint64_t seed = 1) {
    IrreducibleVerdict v;
    auto algebra = detail::algebra_closure(gens, n);
    v.algebra_dim = algebra.size();
    if (algebra.size() == n * n) {
        v.kind = IrreducibleKind::absolutely_irreducible;
        return v;
    }
    if (auto w = detail::find_witness(algebra, n, seed)) {
        v.kind = IrreducibleKind::reducible;
        v.witness = std::move(w);
    } else {
        v.kind = IrreducibleKind::inconclusive;
    }
    return v;
}

inline IrreducibleVerdict check_irreducible(const RepConfig& cfg) { return check_irreducible(cfg.h_basis, cfg.n); }

}  // namespace equilab
