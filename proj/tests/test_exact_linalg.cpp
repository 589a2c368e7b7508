#include <equilab/exact/json.hpp>
#include <equilab/exact/subspace.hpp>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace equilab;
using testsupport::random_mat;
using testsupport::random_subspace;
using testsupport::vec;

namespace {

Subspace span(std::size_t n, std::initializer_list<std::vector<Rat>> cols) {
    Mat m(n, cols.size());
    std::size_t j = 0;
    for (const auto& c : cols) {
        for (std::size_t i = 0; i < n; ++i) m(i, j) = c[i];
        ++j;
    }
    return canonicalize(m);
}

std::vector<Rat> e(std::size_t n, std::size_t i) {
    std::vector<Rat> v(n);
    v[i] = 1;
    return v;
}

}  // namespace

TEST(Rational, ParsesCanonicalForms) {
    EXPECT_EQ(parse_rat("6/4"), Rat(3, 2));
    EXPECT_EQ(parse_rat(" -1.25 "), Rat(-5, 4));
    EXPECT_EQ(parse_rat("7"), Rat(7));
    EXPECT_EQ(to_string(parse_rat("-10/4")), "-5/2");
    EXPECT_THROW(parse_rat("1/0"), ParseError);
    EXPECT_THROW(parse_rat("abc"), ParseError);
    EXPECT_THROW(parse_rat(""), ParseError);
}

TEST(Matrix, DeterminantAndInverse) {
    Mat a{{2, 1}, {1, 1}};
    EXPECT_EQ(determinant(a), Rat(1));
    EXPECT_EQ(inverse(a), (Mat{{1, -1}, {-1, 2}}));
    EXPECT_THROW(inverse(Mat{{1, 2}, {2, 4}}), SingularMatrix);
    EXPECT_EQ(rank(Mat{{1, 2}, {2, 4}}), 1u);
}

TEST(Canonicalize, DuplicateColumn) {
    Mat m{{1, 1}, {0, 0}, {0, 0}};
    auto s = canonicalize(m);
    EXPECT_EQ(s.dim(), 1u);
    EXPECT_EQ(s.basis(), (Mat{{1}, {0}, {0}}));
}

TEST(Canonicalize, Identity) {
    auto s = canonicalize(Mat::identity(3));
    EXPECT_EQ(s.dim(), 3u);
    EXPECT_EQ(s.basis(), Mat::identity(3));
}

TEST(Canonicalize, HandReducedPlane) {
    // columns (1,1,0),(1,2,0): subtracting gives (0,1,0), then (1,0,0)
    Mat m{{1, 1}, {1, 2}, {0, 0}};
    auto s = canonicalize(m);
    EXPECT_EQ(s, span(3, {e(3, 0), e(3, 1)}));
}

TEST(Canonicalize, ZeroMatrixIsDimZero) {
    auto s = canonicalize(Mat(4, 3));
    EXPECT_EQ(s.dim(), 0u);
    EXPECT_EQ(s.ambient_dim(), 4u);
}

TEST(Kernel, Examples) {
    EXPECT_EQ(kernel_basis(Mat(2, 2)).dim(), 2u);
    EXPECT_EQ(kernel_basis(Mat{{2, 1}, {1, 1}}).dim(), 0u);
    Mat m{{1, 1, 1}};
    auto k = kernel_basis(m);
    EXPECT_EQ(k.dim(), 2u);
    EXPECT_TRUE(k.contains(vec({1, -1, 0})));
    EXPECT_TRUE((m * k.basis()).is_zero());
}

TEST(Sum, Examples) {
    auto s1 = span(3, {e(3, 0)});
    auto s2 = span(3, {e(3, 1)});
    EXPECT_EQ(subspace_sum(s1, s2), span(3, {e(3, 0), e(3, 1)}));
    EXPECT_EQ(subspace_sum(s1, s1), s1);
    EXPECT_EQ(subspace_sum(s1, Subspace(3)), s1);
    EXPECT_THROW(subspace_sum(s1, Subspace(4)), DimensionMismatch);
}

TEST(Intersect, Examples) {
    auto u = span(3, {e(3, 0), e(3, 1)});
    auto w = span(3, {e(3, 1), e(3, 2)});
    EXPECT_EQ(subspace_intersect(u, w), span(3, {e(3, 1)}));
    EXPECT_EQ(subspace_intersect(u, u), u);
    auto p = span(4, {e(4, 0), e(4, 1)});
    auto q = span(4, {vec({1, 0, 1, 0}), vec({0, 1, 0, 1})});
    // rank oracle: [p | q] has rank 4, so the planes are complementary
    EXPECT_EQ(rank(hstack(p.basis(), q.basis())), 4u);
    EXPECT_EQ(subspace_intersect(p, q).dim(), 0u);
    EXPECT_THROW(subspace_intersect(u, Subspace(2)), DimensionMismatch);
}

TEST(Intersect, MultiwayMatchesPairwise) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 50; ++t) {
        std::vector<Subspace> parts;
        for (int i = 0; i < 3; ++i) parts.push_back(random_subspace(rng, 6, 3 + (t + i) % 3));
        auto folded = subspace_intersect(subspace_intersect(parts[0], parts[1]), parts[2]);
        EXPECT_EQ(subspace_intersect(std::span<const Subspace>(parts)), folded);
    }
}

TEST(OrthogonalComplement, Examples) {
    EXPECT_EQ(orthogonal_complement(span(3, {e(3, 0)})), span(3, {e(3, 1), e(3, 2)}));
    EXPECT_EQ(orthogonal_complement(Subspace::full(3)).dim(), 0u);
    auto c = orthogonal_complement(span(2, {vec({1, 1})}));
    EXPECT_EQ(c, span(2, {vec({1, -1})}));
}

TEST(NilpotentExp, Examples) {
    EXPECT_EQ(nilpotent_exp(Mat(3, 3)), Mat::identity(3));
    EXPECT_EQ(nilpotent_exp(Mat{{0, 1}, {0, 0}}), (Mat{{1, 1}, {0, 1}}));
    Mat n{{0, 1, 0}, {0, 0, 1}, {0, 0, 0}};
    Mat expected{{1, 1, Rat(1, 2)}, {0, 1, 1}, {0, 0, 1}};
    EXPECT_EQ(nilpotent_exp(n), expected);
    EXPECT_THROW(nilpotent_exp(Mat{{0, 1}, {1, 0}}), NotNilpotent);
    EXPECT_THROW(nilpotent_exp(Mat{{1}}), NotNilpotent);
}

// Properties over random instances.

TEST(Property, ModularLaw) {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 300; ++t) {
        std::size_t n = 2 + t % 6;
        auto u = random_subspace(rng, n, 1 + t % n);
        auto w = random_subspace(rng, n, 1 + (t / 3) % n);
        auto s = subspace_sum(u, w);
        auto i = subspace_intersect(u, w);
        EXPECT_EQ(s.dim() + i.dim(), u.dim() + w.dim());
        EXPECT_TRUE(s.contains(u));
        EXPECT_TRUE(s.contains(w));
        EXPECT_TRUE(u.contains(i));
        EXPECT_TRUE(w.contains(i));
    }
}

TEST(Property, CanonicalizeIdempotentAndSpanPreserving) {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 200; ++t) {
        std::size_t n = 1 + t % 7;
        Mat m = random_mat(rng, n, 1 + t % 5);
        auto s = canonicalize(m);
        EXPECT_EQ(canonicalize(s.basis()), s);
        EXPECT_EQ(s.dim(), rank(m));
        for (std::size_t j = 0; j < m.cols(); ++j) EXPECT_TRUE(s.contains(m.col(j)));
        auto piv = s.pivots();
        for (std::size_t k = 1; k < piv.size(); ++k) EXPECT_LT(piv[k - 1], piv[k]);
    }
}

TEST(Property, KernelColumnsAnnihilated) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 200; ++t) {
        Mat m = random_mat(rng, 1 + t % 5, 1 + t % 7);
        auto k = kernel_basis(m);
        EXPECT_EQ(k.dim(), m.cols() - rank(m));
        EXPECT_TRUE((m * k.basis()).is_zero() || k.dim() == 0);
    }
}

TEST(Property, ComplementInvolution) {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 200; ++t) {
        std::size_t n = 1 + t % 7;
        auto u = random_subspace(rng, n, t % (n + 1));
        auto c = orthogonal_complement(u);
        EXPECT_EQ(orthogonal_complement(c), u);
        EXPECT_EQ(u.dim() + c.dim(), n);
        EXPECT_EQ(subspace_intersect(u, c).dim(), 0u);
    }
}

TEST(Property, ExpOfNegativeIsInverse) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
        std::size_t n = 1 + t % 6;
        Mat s = random_mat(rng, n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j) s(i, j) = 0;  // strictly upper
        Mat p = random_mat(rng, n, n);
        while (determinant(p) == 0) p = random_mat(rng, n, n);
        Mat nil = p * s * inverse(p);
        EXPECT_EQ(nilpotent_exp(nil) * nilpotent_exp(-nil), Mat::identity(n));
        EXPECT_EQ(determinant(nilpotent_exp(nil)), Rat(1));
    }
}

TEST(Json, RoundTrip) {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 50; ++t) {
        Mat m = random_mat(rng, 1 + t % 4, 1 + t % 5);
        EXPECT_EQ(mat_from_json(Json::parse(mat_to_json(m).dump())), m);
        auto s = random_subspace(rng, 1 + t % 6, t % 4);
        EXPECT_EQ(subspace_from_json(Json::parse(subspace_to_json(s).dump())), s);
    }
    EXPECT_EQ(subspace_to_json(Subspace(3)).at("dim"), 0);
}
