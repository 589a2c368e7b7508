#pragma once

#include <equilab/exact/matrix.hpp>
#include <equilab/geometry/pointset.hpp>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace equilab {

namespace detail {

inline double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

inline std::size_t index_of_point(const PointSet& f, std::span<const double> w) {
    if (w.size() != f.n) throw DimensionMismatch("point has the wrong ambient dimension");
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto x = f.point(i);
        bool same = true;
        for (std::size_t c = 0; c < f.n && same; ++c) same = dedup_key(x[c]) == dedup_key(w[c]);
        if (same) return i;
    }
    throw MembershipError("point is not a member of the set");
}

}  // namespace detail

/// G(w) = sum over w' != w of max(|w' - w|, delta)^-alpha, for the i-th point.
inline double alpha_energy_at(const PointSet& f, std::size_t i, double delta, double alpha) {
    auto w = f.point(i);
    double g = 0;
    for (std::size_t j = 0; j < f.size(); ++j)
        if (j != i) g += std::pow(std::max(detail::distance(f.point(j), w), delta), -alpha);
    return g;
}

inline double alpha_energy(const PointSet& f, double delta, double alpha, std::span<const double> w) {
    if (!(alpha > 0 && alpha < static_cast<double>(f.n))) throw ExponentError("alpha must lie in (0, n)");
    if (!(delta > 0)) throw std::invalid_argument("delta must be positive");
    return alpha_energy_at(f, detail::index_of_point(f, w), delta, alpha);
}

/// Smallest C with mu_F(B(x, r)) <= C r^alpha for x in F and dyadic
/// r in [2^-s, 1]; mu_F is normalized counting measure, balls are closed.
inline double frostman_constant(const PointSet& f, int s, double alpha) {
    detail::check_scale(s);
    if (f.size() < 2) throw std::invalid_argument("frostman_constant needs at least two points");
    const double total = static_cast<double>(f.size());
    std::vector<double> dist(f.size());
    double c = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (std::size_t j = 0; j < f.size(); ++j) dist[j] = detail::distance(f.point(i), f.point(j));
        std::sort(dist.begin(), dist.end());
        for (int k = 0; k <= s; ++k) {
            const double r = std::ldexp(1.0, -k);
            const auto inside = std::upper_bound(dist.begin(), dist.end(), r) - dist.begin();
            c = std::max(c, static_cast<double>(inside) / total / std::pow(r, alpha));
        }
    }
    return c;
}

struct EnergyBoundCheck {
    bool holds = false;
    double frostman_c = 0;
    double bound = 0;
    double max_energy = 0;
};

/// Evaluates G^(beta) at every point against 2^n C (1 + 1/(1 - 2^(beta - alpha))) #F
/// with C the (C, alpha) Frostman constant down to scale delta = 2^-s.
inline EnergyBoundCheck frostman_energy_bound_check(const PointSet& f, int s, double alpha, double beta) {
    if (!(beta > 0)) throw ExponentError("beta must be positive");
    if (!(beta < alpha)) throw ExponentError("beta must be smaller than alpha");
    EnergyBoundCheck out;
    out.frostman_c = frostman_constant(f, s, alpha);
    out.bound = std::ldexp(out.frostman_c, static_cast<int>(f.n)) * (1 + 1 / (1 - std::exp2(beta - alpha))) *
                static_cast<double>(f.size());
    const double delta = std::ldexp(1.0, -s);
    for (std::size_t i = 0; i < f.size(); ++i) out.max_energy = std::max(out.max_energy, alpha_energy_at(f, i, delta, beta));
    out.holds = out.max_energy <= out.bound;
    return out;
}

}  // namespace equilab
