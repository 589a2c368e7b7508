#include <equilab/generic/bounds.hpp>
#include <equilab/generic/subspace_spec.hpp>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace equilab;

namespace {

Subspace coords(std::size_t n, std::initializer_list<std::size_t> idx) {
    std::vector<std::size_t> v(idx);
    return Subspace::coordinate(n, v);
}

}  // namespace

TEST(SampleElement, SingleFactorIsUnitriangular) {
    auto cfg = build_config("sl2_sym:1");
    auto e = sample_element(cfg, 3, 1);
    ASSERT_EQ(e.recipe.size(), 1u);
    EXPECT_EQ(e.matrix(0, 0), Rat(1));
    EXPECT_EQ(e.matrix(1, 1), Rat(1));
    EXPECT_EQ(e.matrix(1, 0), Rat(0));
    EXPECT_NE(e.matrix(0, 1), Rat(0));
    EXPECT_THROW(sample_element(cfg, 3, 0), std::invalid_argument);
}

TEST(SampleElement, DeterministicAndUnimodular) {
    auto cfg = build_config("sl2_sym:1");
    auto a = sample_element(cfg, 7, 4);
    auto b = sample_element(cfg, 7, 4);
    EXPECT_EQ(a.matrix, b.matrix);
    EXPECT_EQ(determinant(a.matrix), Rat(1));
    EXPECT_EQ(replay_recipe(cfg, a.recipe), a.matrix);
    for (const auto& s : a.recipe) {
        EXPECT_NE(s.t, Rat(0));
        EXPECT_LE(abs(s.t.get_num()), 9);
        EXPECT_LE(s.t.get_den(), 9);
    }
    for (const char* name : {"so_pq:2,1", "sp2n:2", "tensor:2,2"}) {
        auto c = build_config(name);
        auto e = sample_element(c, 99, default_complexity(c));
        EXPECT_EQ(determinant(e.matrix), Rat(1));
    }
}

TEST(EvalTree, Examples) {
    auto w = coords(3, {0});
    EXPECT_EQ(eval_tree(TreeOp::leaf(0), {w}), w);
    EXPECT_EQ(eval_tree(parse_tree("S(0,1)"), {coords(3, {0}), coords(3, {1})}), coords(3, {0, 1}));
    EXPECT_EQ(eval_tree(parse_tree("I(0,1)"), {coords(3, {0, 1}), coords(3, {1, 2})}), coords(3, {1}));
    EXPECT_EQ(eval_tree(parse_tree("S(I(0,1),2)"), {coords(3, {0, 1}), coords(3, {1, 2}), coords(3, {2})}),
              coords(3, {1, 2}));
    EXPECT_THROW(eval_tree(parse_tree("S(0,1)"), {w}), TreeShapeError);
    EXPECT_THROW(parse_tree("S(0)"), TreeShapeError);
    EXPECT_THROW(parse_tree("S(0,0)"), TreeShapeError);
    EXPECT_THROW(parse_tree("S(0,2)"), TreeShapeError);
    EXPECT_THROW(parse_tree("X(0,1)"), TreeShapeError);
    EXPECT_EQ(parse_tree(" S( I(0,1) , 2 ) ").to_string(), "S(I(0,1),2)");
    EXPECT_EQ(parse_tree("S(I(0,1),2)").height(), 3u);
}

TEST(EvalTree, Equivariance) {
    auto cfg = build_config("so_pq:2,1");
    std::mt19937_64 rng(5);
    auto tree = parse_tree("S(I(0,1),I(2,3))");
    for (int t = 0; t < 20; ++t) {
        std::vector<Subspace> ls;
        for (int i = 0; i < 4; ++i) ls.push_back(testsupport::random_subspace(rng, 5, 2 + (t + i) % 3));
        auto h = sample_element(cfg, 100 + t, 4).matrix;
        std::vector<Subspace> moved;
        for (const auto& l : ls) moved.push_back(apply(h, l));
        EXPECT_EQ(eval_tree(tree, moved), apply(h, eval_tree(tree, ls)));
    }
}

TEST(GenericTreeDim, Examples) {
    auto cfg = build_config("so_pq:2,1");
    auto dec = weight_decompose(cfg);
    auto top = flag_subspace(dec, Rat(2));
    auto r = generic_tree_dim(cfg, parse_tree("S(0,1)"), top, 50, 1);
    EXPECT_EQ(r.k, 2u);
    EXPECT_TRUE(r.stable);
    auto two = flag_subspace(dec, Rat(1));
    ASSERT_EQ(two.dim(), 2u);
    auto r2 = generic_tree_dim(cfg, parse_tree("I(0,1)"), two, 50, 2);
    EXPECT_EQ(r2.k, 0u);
    EXPECT_TRUE(r2.stable);
    // identity elements: every leaf is W itself
    SamplingOptions id;
    id.identity_elements = true;
    auto r3 = generic_tree_dim(cfg, parse_tree("S(0,1,2)"), two, 10, 3, id);
    EXPECT_EQ(r3.k, 2u);
    EXPECT_EQ(r3.report.dimension_histogram.at(2), 10u);
    EXPECT_THROW(generic_tree_dim(cfg, parse_tree("S(0,1)"), top, 1, 1), std::invalid_argument);
}

TEST(Modal, TieIsUnstable) {
    std::map<std::size_t, std::size_t> h{{1, 5}, {2, 5}};
    EXPECT_FALSE(modal(h, 10).stable);
    EXPECT_TRUE(modal(h, 10).tie);
    std::map<std::size_t, std::size_t> h2{{1, 96}, {2, 4}};
    EXPECT_TRUE(modal(h2, 100).stable);
    std::map<std::size_t, std::size_t> h3{{1, 94}, {2, 6}};
    EXPECT_FALSE(modal(h3, 100).stable);
}

TEST(IntersectionBound, TensorPlanePlaneEquality) {
    auto cfg = build_config("tensor_std:2,2");
    // V1 (x) f1 = span{e1f1, e2f1} = coords {0,2}; e1 (x) V2 = coords {0,1}
    auto w = coords(4, {0, 2});
    auto wp = coords(4, {0, 1});
    auto r = check_intersection_bound(cfg, w, wp, 100, 9);
    EXPECT_EQ(r.passes, 100u);
    EXPECT_EQ(r.dimension_histogram.size(), 1u);
    EXPECT_EQ(r.dimension_histogram.at(1), 100u);  // 1 = (2/4) * 2
}

TEST(IntersectionBound, Examples) {
    auto cfg = build_config("sl2_sym:2");
    auto dec = weight_decompose(cfg);
    auto r = check_intersection_bound(cfg, flag_subspace(dec, Rat(2)), flag_subspace(dec, Rat(0)), 100, 4);
    EXPECT_EQ(r.passes, 100u);
    EXPECT_EQ(modal(r.dimension_histogram, 100).value, 0u);

    auto so = build_config("so_pq:2,1");
    auto sd = weight_decompose(so);
    auto wp = flag_subspace(sd, Rat(0));
    auto full = check_intersection_bound(so, Subspace::full(5), wp, 20, 5);
    EXPECT_EQ(full.passes, 20u);
    EXPECT_EQ(full.dimension_histogram.at(3), 20u);
}

TEST(IntersectionBound, ReducibleRejected) {
    RepConfig cfg;
    cfg.name = "fixture";
    cfg.n = 4;
    auto base = build_config("sl2_sym:1");
    for (const auto& x : base.h_basis) {
        Mat m(4, 4);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) m(i, j) = m(i + 2, j + 2) = x(i, j);
        cfg.h_basis.push_back(m);
    }
    cfg.a_action = cfg.h_basis[1];
    cfg.u_plus_indices = {0};
    cfg.u_minus_indices = {2};
    EXPECT_THROW(check_intersection_bound(cfg, coords(4, {0}), coords(4, {1}), 5, 1), PreconditionError);
}

TEST(ProjectionBound, Examples) {
    auto so = build_config("so_pq:2,1");
    auto dec = weight_decompose(so);
    auto top = flag_subspace(dec, Rat(2));
    auto r = check_projection_bound(so, top, Subspace::full(5), 50, 6);
    EXPECT_EQ(r.passes, 50u);
    EXPECT_EQ(r.dimension_histogram.at(1), 50u);
    EXPECT_EQ(r.duality_failures, 0u);
    auto f = check_projection_bound(so, Subspace::full(5), flag_subspace(dec, Rat(0)), 10, 7);
    EXPECT_EQ(f.dimension_histogram.at(3), 10u);
}

TEST(Duality, RandomInstancesInDimFour) {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 100; ++t) {
        Mat h = testsupport::random_mat(rng, 4, 4);
        while (determinant(h) == 0) h = testsupport::random_mat(rng, 4, 4);
        auto w = testsupport::random_subspace(rng, 4, 1 + t % 4);
        auto wp = testsupport::random_subspace(rng, 4, 1 + (t / 4) % 4);
        auto d = duality_ranks(h, w, wp);
        EXPECT_EQ(d.via_composition, d.via_transpose_image);
    }
}

TEST(SpanningQ, Examples) {
    auto sl2 = build_config("sl2_sym:2");
    auto d2 = weight_decompose(sl2);
    auto r = find_spanning_q(sl2, flag_subspace(d2, Rat(2)), 30, 1);
    EXPECT_EQ(r.q, 3u);
    EXPECT_EQ(r.k_list, (std::vector<std::size_t>{0, 0}));
    EXPECT_TRUE(r.identity_holds);
    EXPECT_TRUE(r.all_below_k);

    auto so = build_config("so_pq:2,1");
    auto d5 = weight_decompose(so);
    auto r2 = find_spanning_q(so, flag_subspace(d5, Rat(1)), 30, 2);
    EXPECT_EQ(r2.q, 3u);
    EXPECT_EQ(r2.k_list, (std::vector<std::size_t>{0, 1}));
    EXPECT_TRUE(r2.identity_holds);

    // hyperplane: k = n - 1 -> q = 2, k_2 = n - 2
    auto r3 = find_spanning_q(so, flag_subspace(d5, Rat(-1)), 30, 3);
    EXPECT_EQ(r3.q, 2u);
    EXPECT_EQ(r3.k_list, (std::vector<std::size_t>{3}));
    EXPECT_TRUE(r3.identity_holds);
}

TEST(SpanningQ, ReducibleWouldNeverSpan) {
    // Identity sampling can never move W, which is what a broken configuration looks like.
    auto so = build_config("so_pq:2,1");
    SamplingOptions id;
    id.identity_elements = true;
    EXPECT_THROW(find_spanning_q(so, coords(5, {0}), 3, 1, id), IrreducibilityViolation);
}

TEST(Submodularity, Examples) {
    auto a = coords(3, {0});
    auto r = submodularity_check(coords(3, {0, 1}), a, a);
    EXPECT_EQ(r.lhs, r.rhs);
    auto r2 = submodularity_check(coords(3, {0, 1}), coords(3, {0}), coords(3, {1}));
    EXPECT_EQ(r2.lhs, 2u);
    EXPECT_EQ(r2.rhs, 2u);
    EXPECT_TRUE(r2.holds);
    EXPECT_THROW(submodularity_check(coords(3, {0}), coords(4, {0}), coords(3, {0})), DimensionMismatch);
}

TEST(Submodularity, RandomTriplesInDimSix) {
    std::size_t strict = 0;
    for (std::uint64_t s = 0; s < 500; ++s) {
        auto t = random_subspace_tuple(6, 3, s);
        auto r = submodularity_check(t[0], t[1], t[2]);
        EXPECT_TRUE(r.holds);
        strict += r.lhs > r.rhs;
    }
    EXPECT_GT(strict, 0u);  // the family is not degenerate: strict inequality occurs
}

TEST(SubspaceSpec, Parse) {
    auto dec = weight_decompose(build_config("so_pq:2,1"));
    EXPECT_EQ(parse_subspace_spec("flag:1", dec).dim(), 2u);
    EXPECT_EQ(parse_subspace_spec("weight:0", dec), coords(5, {2}));
    EXPECT_EQ(parse_subspace_spec("coords:0,2", dec), coords(5, {0, 2}));
    EXPECT_EQ(parse_subspace_spec("full", dec).dim(), 5u);
    EXPECT_THROW(parse_subspace_spec("flag:7", dec), InvalidLevel);
    EXPECT_THROW(parse_subspace_spec("blob:1", dec), ParseError);
    EXPECT_EQ(weight_flag_family(dec).size(), 4u);
}

TEST(Parallel, JobsDoNotChangeResults) {
    auto cfg = build_config("so_pq:2,1");
    auto dec = weight_decompose(cfg);
    SamplingOptions one, four;
    four.jobs = 4;
    auto a = check_intersection_bound(cfg, flag_subspace(dec, Rat(1)), flag_subspace(dec, Rat(0)), 40, 3, one);
    auto b = check_intersection_bound(cfg, flag_subspace(dec, Rat(1)), flag_subspace(dec, Rat(0)), 40, 3, four);
    EXPECT_EQ(a.per_trial_dims, b.per_trial_dims);
}
