#pragma once

#include <equilab/oppenheim/form.hpp>
#include <equilab/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

namespace equilab {

class BudgetError : public std::length_error {
public:
    using std::length_error::length_error;
};

class FitError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr long kMaxT = 10000;
inline constexpr double kMaxPrefixes = 4.1e8;

/// Norms are sup norms: 0 < max_i |v_i| <= T.
struct SearchResult {
    std::vector<long> best_v;
    double best_value = std::numeric_limits<double>::infinity();  // |Q(v) - s|
    QuadNumber value_exact;                                        // Q(v)
    long t = 0;
    double s = 0;
    bool exact_hit = false;                                        // Q(v) = s exactly
    std::uint64_t candidates = 0;

    [[nodiscard]] bool found() const { return !best_v.empty(); }
};

namespace detail {

struct Candidate {
    std::vector<long> v;
    long double value = std::numeric_limits<long double>::infinity();
};

/// |Q(v) - s| as an exact element of Q(sqrt D), up to sign.
inline QuadNumber offset(const QuadraticForm& q, const std::vector<long>& v, const Rat& s) {
    QuadNumber x = q.evaluate(v);
    x.a -= s;
    if (sign(x, q.sqrt_d) < 0) {
        x.a = -x.a;
        x.b = -x.b;
    }
    return x;
}

/// Strict order: smaller |Q(v) - s| first, exact when the float values are
/// close, then lexicographic on v.
inline bool better(const QuadraticForm& q, const Rat& s, const Candidate& x, const Candidate& y) {
    if (x.v.empty()) return false;
    if (y.v.empty()) return true;
    const long double gap = std::fabs(x.value - y.value);
    if (gap > 1e-9L * (1 + std::max(x.value, y.value))) return x.value < y.value;
    const QuadNumber ex = offset(q, x.v, s), ey = offset(q, y.v, s);
    const int c = sign(QuadNumber{ex.a - ey.a, ex.b - ey.b}, q.sqrt_d);
    if (c != 0) return c < 0;
    return x.v < y.v;
}

struct Scanner {
    const QuadraticForm& q;
    long double s;
    std::vector<std::vector<long double>> g;
    std::uint64_t evaluated = 0;

    Scanner(const QuadraticForm& form, double target) : q(form), s(target) {
        const long double r = std::sqrt(static_cast<long double>(form.sqrt_d));
        g.assign(form.d, std::vector<long double>(form.d));
        for (std::size_t i = 0; i < form.d; ++i)
            for (std::size_t j = 0; j < form.d; ++j)
                g[i][j] = static_cast<long double>(to_double(form.a[i][j])) + r * static_cast<long double>(to_double(form.b[i][j]));
    }

    /// Best primitive completion of the prefix with last coordinate in [lo, hi].
    /// Within one slice candidates are ordered by (float value, v); slices are
    /// merged with the exact order, so results do not depend on the job count.
    void scan(std::vector<long>& v, long lo, long hi, Candidate& best) {
        if (lo > hi) return;
        const std::size_t d = q.d;
        long double c = 0, b = 0;
        for (std::size_t i = 0; i + 1 < d; ++i) {
            b += g[i][d - 1] * static_cast<long double>(v[i]);
            for (std::size_t j = 0; j + 1 < d; ++j) c += g[i][j] * static_cast<long double>(v[i]) * static_cast<long double>(v[j]);
        }
        const long double a = g[d - 1][d - 1];
        long g0 = 0;
        for (std::size_t i = 0; i + 1 < d; ++i) g0 = std::gcd(g0, v[i]);
        auto f = [&](long x) {
            const long double xd = static_cast<long double>(x);
            return std::fabs(a * xd * xd + 2 * b * xd + c - s);
        };
        // |q(x) - s| is monotone between consecutive critical points
        long double crit[5] = {static_cast<long double>(lo), static_cast<long double>(hi)};
        std::size_t nc = 2;
        auto add = [&](long double x) {
            if (x > lo && x < hi) crit[nc++] = x;
        };
        if (a != 0) {
            add(-b / a);
            const long double disc = b * b - a * (c - s);
            if (disc >= 0) {
                const long double r = std::sqrt(disc);
                add((-b - r) / a);
                add((-b + r) / a);
            }
        } else if (b != 0) {
            add((s - c) / (2 * b));
        }
        std::sort(crit, crit + nc);
        auto consider = [&](long x) {
            ++evaluated;
            const long double val = f(x);
            if (val > best.value) return;
            v[d - 1] = x;
            if (val == best.value && !(v < best.v)) return;
            best.v = v;
            best.value = val;
        };
        auto primitive = [&](long x) { return std::gcd(g0, x) == 1; };
        for (std::size_t k = 0; k + 1 < nc; ++k) {
            const long l = static_cast<long>(std::ceil(crit[k])), h = static_cast<long>(std::floor(crit[k + 1]));
            long x = l;
            while (x <= h && !primitive(x)) ++x;
            if (x <= h) consider(x);
            long y = h;
            while (y >= l && !primitive(y)) --y;
            if (y >= l && y != x) consider(y);
        }
    }
};

inline void check_search_args(const QuadraticForm& q, long t) {
    if (q.d < 3 || q.d > 4) throw std::invalid_argument("search needs dimension 3 or 4");
    if (t < 1 || t > kMaxT) throw BudgetError("T must lie in [1, 10^4]");
    if (std::pow(2.0 * static_cast<double>(t) + 1, static_cast<double>(q.d - 1)) > kMaxPrefixes)
        throw BudgetError("enumeration budget exceeded: (2T+1)^(d-1) > 4.1e8");
}

/// Minimum over primitive v with t_prev < |v|_sup <= t (t_prev = 0: all of the box).
inline Candidate scan_shell(const QuadraticForm& q, double s, long t_prev, long t, unsigned jobs, std::uint64_t& evaluated) {
    const std::size_t d = q.d;
    const long side = 2 * t + 1;
    // the first prefix coordinate is split across workers
    auto parts = parallel_map(static_cast<std::size_t>(side), jobs, [&](std::size_t idx) {
        Scanner sc(q, s);
        Candidate best;
        std::vector<long> v(d, 0);
        v[0] = static_cast<long>(idx) - t;
        const std::size_t rest = d - 2;
        std::vector<long> inner(rest, -t);
        while (true) {
            for (std::size_t i = 0; i < rest; ++i) v[1 + i] = inner[i];
            long m = 0;
            for (std::size_t i = 0; i + 1 < d; ++i) m = std::max(m, std::labs(v[i]));
            if (m > t_prev) {
                sc.scan(v, -t, t, best);
            } else {
                sc.scan(v, -t, -t_prev - 1, best);
                sc.scan(v, t_prev + 1, t, best);
            }
            std::size_t i = 0;
            while (i < rest && ++inner[i] > t) inner[i++] = -t;
            if (i == rest) break;
        }
        return std::make_pair(best, sc.evaluated);
    });
    Candidate best;
    const Rat s_exact(s);
    for (auto& [c, n] : parts) {
        evaluated += n;
        if (better(q, s_exact, c, best)) best = std::move(c);
    }
    return best;
}

inline SearchResult finish(const QuadraticForm& q, double s, long t, const Candidate& c, std::uint64_t evaluated) {
    SearchResult r;
    r.t = t;
    r.s = s;
    r.candidates = evaluated;
    if (c.v.empty()) return r;
    r.best_v = c.v;
    r.value_exact = q.evaluate(c.v);
    QuadNumber off = r.value_exact;
    off.a -= Rat(s);
    r.exact_hit = sign(off, q.sqrt_d) == 0;
    r.best_value = std::fabs(to_double(off, q.sqrt_d));
    if (r.exact_hit) r.best_value = 0;
    return r;
}

}  // namespace detail

/// Primitive v with 0 < |v|_sup <= T minimizing |Q(v) - s|: enumerate the first
/// d-1 coordinates, solve the quadratic in v_d, test integer neighbors of the
/// roots, the vertex and the box ends.
inline SearchResult search_min_value(const QuadraticForm& q, double s, long t_bound, unsigned jobs = 1) {
    detail::check_search_args(q, t_bound);
    certify_indefinite(q);
    std::uint64_t evaluated = 0;
    auto best = detail::scan_shell(q, s, 0, t_bound, jobs, evaluated);
    return detail::finish(q, s, t_bound, best, evaluated);
}

struct DecayRow {
    long t = 0;
    SearchResult running;  // best over all T' <= t
    bool improved = false;
};

struct DecayCurve {
    std::vector<DecayRow> rows;
    std::optional<double> kappa;  // slope of -log(min) against log T over improving rows
    bool kappa_infinite = false;  // an exact hit (minimum 0) occurred
    std::size_t fit_points = 0;
};

/// Running minima over growing T; each T only scans the new shell.
inline DecayCurve decay_curve(const QuadraticForm& q, double s, const std::vector<long>& t_list, unsigned jobs = 1) {
    if (!std::is_sorted(t_list.begin(), t_list.end())) throw FitError("t_list must be ascending");
    std::vector<long> distinct(t_list);
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3) throw FitError("decay fit needs at least three distinct T");
    for (long t : distinct) detail::check_search_args(q, t);
    certify_indefinite(q);
    DecayCurve out;
    detail::Candidate best;
    const Rat s_exact(s);
    long prev = 0;
    std::uint64_t evaluated = 0;
    for (long t : distinct) {
        auto shell = detail::scan_shell(q, s, prev, t, jobs, evaluated);
        bool improved = detail::better(q, s_exact, shell, best);
        if (improved) best = std::move(shell);
        out.rows.push_back({t, detail::finish(q, s, t, best, evaluated), improved});
        prev = t;
    }
    std::vector<double> xs, ys;
    for (const auto& r : out.rows) {
        if (r.running.exact_hit) out.kappa_infinite = true;
        if (r.improved && r.running.found() && r.running.best_value > 0) {
            xs.push_back(std::log(static_cast<double>(r.t)));
            ys.push_back(-std::log(r.running.best_value));
        }
    }
    out.fit_points = xs.size();
    if (!out.kappa_infinite && xs.size() >= 2) {
        const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
        const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxy += (xs[i] - mx) * (ys[i] - my);
            sxx += (xs[i] - mx) * (xs[i] - mx);
        }
        out.kappa = sxy / sxx;
    }
    return out;
}

inline Json search_result_to_json(const SearchResult& r, long sqrt_d) {
    Json j{{"T", r.t}, {"s", r.s}, {"found", r.found()}};
    if (r.found()) {
        j["best_v"] = r.best_v;
        j["best_value"] = r.best_value;
        j["value_exact"] = to_string(r.value_exact, sqrt_d);
        j["exact_hit"] = r.exact_hit;
    }
    j["candidates"] = r.candidates;
    return j;
}

inline Json decay_curve_to_json(const DecayCurve& c, long sqrt_d) {
    Json rows = Json::array();
    for (const auto& r : c.rows) {
        Json row = search_result_to_json(r.running, sqrt_d);
        row["improved"] = r.improved;
        rows.push_back(std::move(row));
    }
    Json j{{"rows", std::move(rows)}, {"fit_points", c.fit_points}};
    if (c.kappa_infinite)
        j["kappa"] = "inf";
    else if (c.kappa)
        j["kappa"] = *c.kappa;
    else
        j["kappa"] = nullptr;
    return j;
}

}  // namespace equilab
