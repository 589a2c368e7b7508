#include <equilab/oppenheim/form.hpp>
#include <equilab/oppenheim/search.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

using namespace equilab;

namespace {

// Oracle: every primitive vector of the box, compared exactly in Q(sqrt D).
std::pair<QuadNumber, std::vector<long>> brute_force(const QuadraticForm& q, const Rat& s, long t) {
    std::vector<long> v(q.d, -t), best;
    QuadNumber best_off;
    while (true) {
        long g = 0;
        for (long x : v) g = std::gcd(g, x);
        if (g == 1) {
            QuadNumber off = q.evaluate(v);
            off.a -= s;
            if (sign(off, q.sqrt_d) < 0) off = {-off.a, -off.b};
            if (best.empty() || sign(QuadNumber{off.a - best_off.a, off.b - best_off.b}, q.sqrt_d) < 0) {
                best = v;
                best_off = off;
            }
        }
        std::size_t i = 0;
        while (i < q.d && ++v[i] > t) v[i++] = -t;
        if (i == q.d) break;
    }
    return {best_off, best};
}

bool same(const QuadNumber& x, const QuadNumber& y, long d) { return sign(QuadNumber{x.a - y.a, x.b - y.b}, d) == 0; }

QuadNumber abs_offset(const QuadraticForm& q, const std::vector<long>& v, double s) {
    QuadNumber off = q.evaluate(v);
    off.a -= Rat(s);
    if (sign(off, q.sqrt_d) < 0) off = {-off.a, -off.b};
    return off;
}

std::string random_form_text(std::mt19937_64& rng, std::size_t d) {
    std::uniform_int_distribution<int> c(-3, 3);
    std::string out;
    for (std::size_t i = 1; i <= d; ++i)
        for (std::size_t j = i; j <= d; ++j) {
            const int k = c(rng);
            if (k == 0) continue;
            out += (k < 0 ? "-" : "+") + std::to_string(std::abs(k)) + (rng() % 3 == 0 ? "*sqrt3" : "") + "*x" +
                   std::to_string(i) + (i == j ? "^2" : "*x" + std::to_string(j));
        }
    // force indefiniteness through the first and last diagonal entries
    out += "+5*x1^2-7*x" + std::to_string(d) + "^2";
    return out;
}

}  // namespace

TEST(Form, ParseAndEvaluate) {
    auto q = parse_form("x1^2 + x2^2 - sqrt2*x3^2");
    EXPECT_EQ(q.d, 3u);
    EXPECT_EQ(q.sqrt_d, 2);
    auto v = q.evaluate(std::vector<long>{1, 1, 1});
    EXPECT_EQ(v.a, 2);
    EXPECT_EQ(v.b, -1);
    EXPECT_NEAR(to_double(v, 2), 2 - std::sqrt(2.0), 1e-15);
    EXPECT_EQ(sign(v, 2), 1);

    auto c = parse_form("3/2*x1*x2 - 1/2*sqrt5*x3^2 + x4^2");
    EXPECT_EQ(c.d, 4u);
    EXPECT_EQ(c.a[0][1], Rat(3, 4));
    EXPECT_EQ(c.a[1][0], Rat(3, 4));
    EXPECT_EQ(c.b[2][2], Rat(-1, 2));
    EXPECT_FALSE(c.rational());
    EXPECT_TRUE(parse_form("x1^2-x3^2").rational());
}

TEST(Form, ParseErrors) {
    for (const char* bad : {"", "x1^3", "x1", "x0^2", "2*x1^2+sqrt4*x2^2", "sqrt2*x1^2+sqrt3*x2^2", "x1^2+", "x1*x2*x3",
                            "x1^2*2", "a*x1^2", "sqrt2*sqrt2*x1^2"})
        EXPECT_THROW(parse_form(bad), FormParseError) << bad;
}

TEST(Form, ExactSign) {
    EXPECT_EQ(sign(QuadNumber{Rat(3), Rat(-2)}, 2), 1);   // 3 - 2 sqrt2 > 0
    EXPECT_EQ(sign(QuadNumber{Rat(-3), Rat(2)}, 2), -1);
    EXPECT_EQ(sign(QuadNumber{Rat(2), Rat(-1)}, 4), 0);   // non-squarefree radicand still compares exactly
    EXPECT_EQ(sign(QuadNumber{Rat(0), Rat(0)}, 2), 0);
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> k(-50, 50);
    for (int i = 0; i < 2000; ++i) {
        QuadNumber x{Rat(k(rng), 1 + std::abs(k(rng))), Rat(k(rng), 1 + std::abs(k(rng)))};
        const double f = to_double(x, 3);
        if (std::fabs(f) > 1e-9) {
            EXPECT_EQ(sign(x, 3), f > 0 ? 1 : -1);
        }
    }
}

TEST(Form, Signature) {
    auto q = parse_form("x1^2+x2^2-sqrt2*x3^2");
    auto w = certify_indefinite(q);
    EXPECT_GT(sign(q.evaluate(w.positive), 2), 0);
    EXPECT_LT(sign(q.evaluate(w.negative), 2), 0);
    // semidefinite and definite forms have no negative witness
    EXPECT_THROW(certify_indefinite(parse_form("x1^2+x2^2+sqrt2*x3^2")), SignatureError);
    EXPECT_THROW(certify_indefinite(parse_form("x1^2+2*x1*x2+x2^2+x3^2")), SignatureError);
    // indefinite only through a cross term
    auto c = parse_form("x1^2+x2^2+4*x1*x3");
    auto wc = certify_indefinite(c);
    EXPECT_LT(sign(c.evaluate(wc.negative), 0), 0);
}

TEST(Search, Examples) {
    auto iso = search_min_value(parse_form("x1^2-x3^2"), 0, 10);
    EXPECT_TRUE(iso.exact_hit);
    EXPECT_EQ(iso.best_value, 0.0);
    long g = 0;
    for (long x : iso.best_v) g = std::gcd(g, x);
    EXPECT_EQ(g, 1);
    // x2 is free, so every primitive (a, b, +-a) with |a| = 1 or b coprime hits 0; the
    // lexicographically least among ties is returned
    EXPECT_EQ(iso.best_v, (std::vector<long>{-10, -9, -10}));
    EXPECT_EQ(parse_form("x1^2-x3^2").evaluate(std::vector<long>{1, 0, 1}).a, 0);

    auto q = parse_form("x1^2+x2^2-sqrt2*x3^2");
    auto r = search_min_value(q, 0, 1000);
    EXPECT_FALSE(r.exact_hit);
    EXPECT_GT(sign(abs_offset(q, r.best_v, 0), 2), 0);
    EXPECT_LE(r.best_value, 0.05);
    EXPECT_THROW(search_min_value(parse_form("x1^2+x2^2+x3^2"), 0, 10), SignatureError);
    EXPECT_THROW(search_min_value(q, 0, 10001), BudgetError);
    EXPECT_THROW(search_min_value(q, 0, 0), BudgetError);
    EXPECT_THROW(search_min_value(parse_form("x1^2-x4^2+x2^2+x3^2"), 0, 1000), BudgetError);
    EXPECT_THROW(search_min_value(parse_form("x1^2-x2^2"), 0, 10), std::invalid_argument);
}

TEST(Search, MatchesBruteForce) {
    std::mt19937_64 rng(21);
    const double targets[] = {0.0, 0.5, -1.25, 3.0};
    for (int trial = 0; trial < 24; ++trial) {
        const std::size_t d = trial % 3 == 0 ? 4 : 3;
        const long t = d == 4 ? 5 : 12;
        auto q = parse_form(random_form_text(rng, d));
        const double s = targets[trial % 4];
        auto r = search_min_value(q, s, t);
        auto [oracle_off, oracle_v] = brute_force(q, Rat(s), t);
        ASSERT_TRUE(r.found());
        EXPECT_TRUE(same(abs_offset(q, r.best_v, s), oracle_off, q.sqrt_d)) << trial;
        long g = 0, m = 0;
        for (long x : r.best_v) {
            g = std::gcd(g, x);
            m = std::max(m, std::labs(x));
        }
        EXPECT_EQ(g, 1);
        EXPECT_GT(m, 0);
        EXPECT_LE(m, t);
    }
}

TEST(Search, JobsDoNotChangeResult) {
    auto q = parse_form("x1^2+x2^2-sqrt2*x3^2");
    auto a = search_min_value(q, 0.3, 60, 1);
    auto b = search_min_value(q, 0.3, 60, 3);
    EXPECT_EQ(a.best_v, b.best_v);
    EXPECT_EQ(search_result_to_json(a, 2).dump(), search_result_to_json(b, 2).dump());
}

TEST(Decay, IrrationalForm) {
    auto q = parse_form("x1^2+x2^2-sqrt2*x3^2");
    auto c = decay_curve(q, 0, {10, 100, 1000});
    ASSERT_EQ(c.rows.size(), 3u);
    for (std::size_t i = 0; i < c.rows.size(); ++i) {
        EXPECT_GT(sign(abs_offset(q, c.rows[i].running.best_v, 0), 2), 0);
        EXPECT_FALSE(c.rows[i].running.exact_hit);
        if (i > 0) {
            EXPECT_LE(c.rows[i].running.best_value, c.rows[i - 1].running.best_value);
        }
        // the running minimum equals a fresh search at the same T
        auto fresh = search_min_value(q, 0, c.rows[i].t);
        EXPECT_TRUE(same(abs_offset(q, fresh.best_v, 0), abs_offset(q, c.rows[i].running.best_v, 0), 2));
    }
    ASSERT_TRUE(c.kappa.has_value());
    EXPECT_GT(*c.kappa, 0);
    EXPECT_FALSE(c.kappa_infinite);
}

TEST(Decay, RationalIsotropicAndErrors) {
    auto q = parse_form("x1^2-x3^2");
    auto c = decay_curve(q, 0, {2, 5, 9});
    for (const auto& r : c.rows) {
        EXPECT_TRUE(r.running.exact_hit);
        EXPECT_EQ(r.running.best_value, 0.0);
    }
    EXPECT_TRUE(c.kappa_infinite);
    EXPECT_EQ(decay_curve_to_json(c, 0)["kappa"], "inf");
    EXPECT_THROW(decay_curve(q, 0, {10, 10}), FitError);
    EXPECT_THROW(decay_curve(q, 0, {10, 10, 20}), FitError);
    EXPECT_THROW(decay_curve(q, 0, {30, 20, 10}), FitError);
}

TEST(Decay, PlateausAreExcludedFromFit) {
    auto q = parse_form("x1^2+x2^2-sqrt2*x3^2");
    auto c = decay_curve(q, 0, {10, 11, 12, 100});
    std::size_t improving = 0;
    for (const auto& r : c.rows) improving += r.improved;
    EXPECT_EQ(c.fit_points, improving);
    EXPECT_LT(improving, 4u);
}
