#pragma once

#include <equilab/exact/subspace.hpp>

#include <random>

namespace testsupport {

using equilab::Mat;
using equilab::Rat;
using equilab::Subspace;

inline Rat small_rat(std::mt19937_64& rng, int num_range = 5, int den_max = 3) {
    std::uniform_int_distribution<int> num(-num_range, num_range);
    std::uniform_int_distribution<int> den(1, den_max);
    Rat r(num(rng), den(rng));
    r.canonicalize();
    return r;
}

inline Mat random_mat(std::mt19937_64& rng, std::size_t r, std::size_t c) {
    Mat m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = small_rat(rng);
    return m;
}

/// Random subspace spanned by `k` random vectors, with some sparsity so that
/// degenerate configurations show up.
inline Subspace random_subspace(std::mt19937_64& rng, std::size_t n, std::size_t k) {
    Mat m(n, k);
    std::bernoulli_distribution zero(0.3);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j)
            if (!zero(rng)) m(i, j) = small_rat(rng);
    return equilab::canonicalize(m);
}

inline std::vector<Rat> vec(std::initializer_list<Rat> v) { return v; }

}  // namespace testsupport
