#pragma once

#include <equilab/geometry/pointset.hpp>
#include <equilab/seed.hpp>

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace equilab {

// Descriptor grammar (depth defaults to 8):
//   full_grid:N,S                 all points i * 2^-S in [0,1)^N
//   random_subset:N,S,P           grid points kept independently with probability P
//   product_cantor:B:D,D;B:D,..@L one base-B digit set per coordinate, L digits each
//   random_cantor:N:B:K@L         each cell keeps K random subcells out of B^N, L levels
//   weight_aligned:d,d,..@L       per-coordinate box dims, listed by increasing weight
inline constexpr int kDefaultDepth = 8;

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

inline long parse_long(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw SpecError("bad integer '" + s + "' in " + what);
    return v;
}

inline double parse_double(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) throw SpecError("bad number '" + s + "' in " + what);
    return v;
}

inline void check_count(long double count) {
    if (count > static_cast<long double>(kMaxPoints)) throw SizeError("generator would produce more than 2^24 points");
}

inline void check_ambient(long n) {
    if (n < 1 || n > static_cast<long>(kMaxAmbient)) throw SpecError("ambient dimension must be in [1, 9]");
}

inline PointSet full_grid(long n, long s, const std::string& desc, std::uint64_t seed) {
    check_ambient(n);
    if (s < 0 || s > 24) throw SpecError("full_grid scale out of range");
    const std::size_t side = std::size_t{1} << s;
    check_count(std::pow(static_cast<long double>(side), n));
    std::size_t total = 1;
    for (long i = 0; i < n; ++i) total *= side;
    std::vector<double> coords;
    coords.reserve(total * static_cast<std::size_t>(n));
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx;
        for (long c = 0; c < n; ++c) {
            coords.push_back(std::ldexp(static_cast<double>(rest % side), static_cast<int>(-s)));
            rest /= side;
        }
    }
    return make_point_set(static_cast<std::size_t>(n), std::move(coords), desc, seed, static_cast<double>(n));
}

inline PointSet random_subset(long n, long s, double p, const std::string& desc, std::uint64_t seed) {
    if (!(p > 0 && p <= 1)) throw SpecError("random_subset density must lie in (0, 1]");
    auto grid = full_grid(n, s, desc, seed);
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution keep(p);
    std::vector<double> coords;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (keep(rng)) coords.insert(coords.end(), grid.point(i).begin(), grid.point(i).end());
    const double dim = s > 0 ? static_cast<double>(n) + std::log2(p) / static_cast<double>(s) : static_cast<double>(n);
    return make_point_set(static_cast<std::size_t>(n), std::move(coords), desc, seed, dim);
}

inline PointSet product_cantor(const std::vector<std::pair<long, std::vector<long>>>& factors, long depth,
                               const std::string& desc, std::uint64_t seed) {
    check_ambient(static_cast<long>(factors.size()));
    long double count = 1;
    double dim = 0;
    for (const auto& [base, digits] : factors) {
        if (base < 2) throw SpecError("product_cantor base must be at least 2");
        if (digits.empty()) throw SpecError("product_cantor digit set is empty");
        for (auto d : digits)
            if (d < 0 || d >= base) throw SpecError("product_cantor digit out of range");
        count *= std::pow(static_cast<long double>(digits.size()), depth);
        dim += std::log(static_cast<double>(digits.size())) / std::log(static_cast<double>(base));
    }
    check_count(count);
    // per-coordinate value lists, then their product
    std::vector<std::vector<double>> values;
    for (const auto& [base, digits] : factors) {
        std::vector<double> v{0.0};
        double scale = 1;
        for (long l = 0; l < depth; ++l) {
            scale /= static_cast<double>(base);
            std::vector<double> next;
            for (double x : v)
                for (auto d : digits) next.push_back(x + static_cast<double>(d) * scale);
            v = std::move(next);
        }
        values.push_back(std::move(v));
    }
    const std::size_t n = factors.size();
    std::vector<double> coords;
    std::vector<std::size_t> idx(n, 0);
    while (true) {
        for (std::size_t c = 0; c < n; ++c) coords.push_back(values[c][idx[c]]);
        std::size_t c = 0;
        while (c < n && ++idx[c] == values[c].size()) idx[c++] = 0;
        if (c == n) break;
    }
    return make_point_set(n, std::move(coords), desc, seed, dim);
}

inline PointSet random_cantor(long n, long base, long keep, long depth, const std::string& desc, std::uint64_t seed) {
    check_ambient(n);
    if (base < 2) throw SpecError("random_cantor base must be at least 2");
    const long cells = static_cast<long>(std::pow(base, n));
    if (keep < 1 || keep > cells) throw SpecError("random_cantor keep must lie in [1, base^n]");
    check_count(std::pow(static_cast<long double>(keep), depth));
    std::mt19937_64 rng(seed);
    std::vector<double> cur(static_cast<std::size_t>(n), 0.0);
    std::vector<long> sub(static_cast<std::size_t>(cells));
    double scale = 1;
    for (long l = 0; l < depth; ++l) {
        scale /= static_cast<double>(base);
        std::vector<double> next;
        for (std::size_t p = 0; p < cur.size() / static_cast<std::size_t>(n); ++p) {
            for (long k = 0; k < cells; ++k) sub[static_cast<std::size_t>(k)] = k;
            std::shuffle(sub.begin(), sub.end(), rng);
            for (long k = 0; k < keep; ++k) {
                long code = sub[static_cast<std::size_t>(k)];
                for (long c = 0; c < n; ++c) {
                    next.push_back(cur[p * static_cast<std::size_t>(n) + static_cast<std::size_t>(c)] +
                                   static_cast<double>(code % base) * scale);
                    code /= base;
                }
            }
        }
        cur = std::move(next);
    }
    return make_point_set(static_cast<std::size_t>(n), std::move(cur), desc, seed,
                          std::log(static_cast<double>(keep)) / std::log(static_cast<double>(base)));
}

/// Coordinate with box dim d at depth L: binary digits are free on the levels
/// l where floor(l d) increases, and fixed to seeded random bits elsewhere.
inline PointSet weight_aligned(const std::vector<double>& dims_by_increasing_weight, long depth, const std::string& desc,
                               std::uint64_t seed) {
    const std::size_t n = dims_by_increasing_weight.size();
    check_ambient(static_cast<long>(n));
    if (depth < 1 || depth > 40) throw SpecError("weight_aligned depth must lie in [1, 40]");
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> values(n);
    long double count = 1;
    double dim = 0;
    for (std::size_t c = 0; c < n; ++c) {
        // coordinate c has the c-th highest weight
        const double d = dims_by_increasing_weight[n - 1 - c];
        if (!(d >= 0 && d <= 1)) throw SpecError("weight_aligned dims must lie in [0, 1]");
        dim += d;
        std::vector<bool> free(static_cast<std::size_t>(depth) + 1, false);
        std::size_t free_levels = 0;
        for (long l = 1; l <= depth; ++l)
            if (std::floor(static_cast<double>(l) * d) > std::floor(static_cast<double>(l - 1) * d)) {
                free[static_cast<std::size_t>(l)] = true;
                ++free_levels;
            }
        count *= std::pow(2.0L, static_cast<long double>(free_levels));
        check_count(count);
        double base_value = 0;
        for (long l = 1; l <= depth; ++l)
            if (!free[static_cast<std::size_t>(l)] && (rng() & 1u)) base_value += std::ldexp(1.0, static_cast<int>(-l));
        std::vector<double> v{base_value};
        for (long l = 1; l <= depth; ++l) {
            if (!free[static_cast<std::size_t>(l)]) continue;
            const std::size_t m = v.size();
            for (std::size_t i = 0; i < m; ++i) v.push_back(v[i] + std::ldexp(1.0, static_cast<int>(-l)));
        }
        values[c] = std::move(v);
    }
    std::vector<double> coords;
    coords.reserve(static_cast<std::size_t>(count) * n);
    std::vector<std::size_t> idx(n, 0);
    while (true) {
        for (std::size_t c = 0; c < n; ++c) coords.push_back(values[c][idx[c]]);
        std::size_t c = 0;
        while (c < n && ++idx[c] == values[c].size()) idx[c++] = 0;
        if (c == n) break;
    }
    return make_point_set(n, std::move(coords), desc, seed, dim);
}

}  // namespace detail

inline PointSet generate_fractal(const std::string& desc, std::uint64_t seed) {
    const auto colon = desc.find(':');
    if (colon == std::string::npos) throw SpecError("fractal descriptor needs kind:args");
    const std::string kind = desc.substr(0, colon);
    std::string args = desc.substr(colon + 1);
    long depth = kDefaultDepth;
    if (auto at = args.find('@'); at != std::string::npos) {
        depth = detail::parse_long(args.substr(at + 1), desc);
        args = args.substr(0, at);
        if (depth < 0) throw SpecError("negative depth in " + desc);
    }
    auto fields = detail::split(args, ',');
    if (kind == "full_grid") {
        if (fields.size() != 2) throw SpecError("full_grid:N,S expected");
        return detail::full_grid(detail::parse_long(fields[0], desc), detail::parse_long(fields[1], desc), desc, seed);
    }
    if (kind == "random_subset") {
        if (fields.size() != 3) throw SpecError("random_subset:N,S,P expected");
        return detail::random_subset(detail::parse_long(fields[0], desc), detail::parse_long(fields[1], desc),
                                     detail::parse_double(fields[2], desc), desc, seed);
    }
    if (kind == "product_cantor") {
        std::vector<std::pair<long, std::vector<long>>> factors;
        for (const auto& f : detail::split(args, ';')) {
            auto parts = detail::split(f, ':');
            if (parts.size() != 2) throw SpecError("product_cantor factor must be BASE:DIGITS");
            std::vector<long> digits;
            for (const auto& d : detail::split(parts[1], ',')) digits.push_back(detail::parse_long(d, desc));
            factors.emplace_back(detail::parse_long(parts[0], desc), std::move(digits));
        }
        return detail::product_cantor(factors, depth, desc, seed);
    }
    if (kind == "random_cantor") {
        auto parts = detail::split(args, ':');
        if (parts.size() != 3) throw SpecError("random_cantor:N:B:K expected");
        return detail::random_cantor(detail::parse_long(parts[0], desc), detail::parse_long(parts[1], desc),
                                     detail::parse_long(parts[2], desc), depth, desc, seed);
    }
    if (kind == "weight_aligned") {
        std::vector<double> dims;
        for (const auto& f : fields) dims.push_back(detail::parse_double(f, desc));
        return detail::weight_aligned(dims, depth, desc, seed);
    }
    throw SpecError("unknown fractal kind '" + kind + "'");
}

}  // namespace equilab
