#pragma once

#include <equilab/exact/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace equilab {

class SizeError : public std::length_error {
public:
    using std::length_error::length_error;
};

class SpecError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class MembershipError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ExponentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kMaxAmbient = 9;
inline constexpr std::size_t kMaxPoints = std::size_t{1} << 24;
inline constexpr int kDedupBits = 40;

/// Finite subset of the unit box [-1, 1]^n, stored flat (row i = point i),
/// sorted and deduplicated at resolution 2^-40.
struct PointSet {
    std::size_t n = 0;
    std::vector<double> coords;
    std::string provenance;
    std::uint64_t seed = 0;
    double designed_dim = std::numeric_limits<double>::quiet_NaN();

    [[nodiscard]] std::size_t size() const { return n == 0 ? 0 : coords.size() / n; }
    [[nodiscard]] std::span<const double> point(std::size_t i) const { return {coords.data() + i * n, n}; }
};

namespace detail {

inline std::int64_t dedup_key(double x) { return std::llround(std::ldexp(x, kDedupBits)); }

/// Number of distinct rows of an integer key table (count x dim). Rows are
/// packed into one word when the per-column ranges allow it; otherwise they
/// are sorted lexicographically.
inline std::size_t count_distinct_rows(std::vector<std::int64_t>& keys, std::size_t dim) {
    if (dim == 0) return keys.empty() ? 0 : 1;
    const std::size_t count = keys.size() / dim;
    if (count == 0) return 0;
    std::vector<std::int64_t> lo(dim, std::numeric_limits<std::int64_t>::max()),
        hi(dim, std::numeric_limits<std::int64_t>::min());
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t c = 0; c < dim; ++c) {
            lo[c] = std::min(lo[c], keys[i * dim + c]);
            hi[c] = std::max(hi[c], keys[i * dim + c]);
        }
    long double span = 1;
    for (std::size_t c = 0; c < dim; ++c) span *= static_cast<long double>(hi[c] - lo[c]) + 1;
    if (span < 0x1p63L) {
        std::vector<std::uint64_t> packed(count);
        for (std::size_t i = 0; i < count; ++i) {
            std::uint64_t v = 0;
            for (std::size_t c = 0; c < dim; ++c)
                v = v * static_cast<std::uint64_t>(hi[c] - lo[c] + 1) + static_cast<std::uint64_t>(keys[i * dim + c] - lo[c]);
            packed[i] = v;
        }
        std::sort(packed.begin(), packed.end());
        return static_cast<std::size_t>(std::unique(packed.begin(), packed.end()) - packed.begin());
    }
    std::vector<std::uint32_t> order(count);
    std::iota(order.begin(), order.end(), 0u);
    auto row = [&](std::uint32_t i) { return keys.begin() + static_cast<std::ptrdiff_t>(i * dim); };
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return std::lexicographical_compare(row(a), row(a) + static_cast<std::ptrdiff_t>(dim), row(b),
                                            row(b) + static_cast<std::ptrdiff_t>(dim));
    });
    std::size_t distinct = 1;
    for (std::size_t i = 1; i < count; ++i)
        if (!std::equal(row(order[i]), row(order[i]) + static_cast<std::ptrdiff_t>(dim), row(order[i - 1])))
            ++distinct;
    return distinct;
}

inline void check_scale(int s) {
    if (s < 1 || s > 40) throw std::invalid_argument("delta must be 2^-s with 1 <= s <= 40");
}

}  // namespace detail

/// Validates the box and size caps, then sorts and deduplicates.
inline PointSet make_point_set(std::size_t n, std::vector<double> coords, std::string provenance = "explicit",
                               std::uint64_t seed = 0, double designed_dim = std::numeric_limits<double>::quiet_NaN()) {
    if (n == 0 || n > kMaxAmbient) throw SizeError("ambient dimension must be in [1, " + std::to_string(kMaxAmbient) + "]");
    if (coords.size() % n != 0) throw std::invalid_argument("coordinate count is not a multiple of n");
    const std::size_t count = coords.size() / n;
    if (count > kMaxPoints) throw SizeError("point set exceeds 2^24 points");
    std::vector<std::int64_t> keys(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const double x = coords[i];
        if (!std::isfinite(x) || std::fabs(x) > 1.0) throw std::domain_error("point outside the unit box");
        keys[i] = detail::dedup_key(x);
    }
    std::vector<std::uint32_t> order(count);
    std::iota(order.begin(), order.end(), 0u);
    auto row = [&](std::uint32_t i) { return keys.begin() + static_cast<std::ptrdiff_t>(i * n); };
    auto less = [&](std::uint32_t a, std::uint32_t b) {
        return std::lexicographical_compare(row(a), row(a) + static_cast<std::ptrdiff_t>(n), row(b),
                                            row(b) + static_cast<std::ptrdiff_t>(n));
    };
    std::sort(order.begin(), order.end(), less);
    PointSet ps{n, {}, std::move(provenance), seed, designed_dim};
    ps.coords.reserve(coords.size());
    for (std::size_t k = 0; k < count; ++k) {
        if (k > 0 && !less(order[k - 1], order[k])) continue;
        ps.coords.insert(ps.coords.end(), coords.begin() + static_cast<std::ptrdiff_t>(order[k] * n),
                         coords.begin() + static_cast<std::ptrdiff_t>((order[k] + 1) * n));
    }
    return ps;
}

/// Number of distinct rows after bucketing column c of `coords` (row-major,
/// `dim` columns) into half-open cells of side 2^-scale[c] anchored at 0.
inline std::size_t cell_count(std::span<const double> coords, std::size_t dim, std::span<const double> scale_bits) {
    std::vector<double> mult(dim);
    for (std::size_t c = 0; c < dim; ++c) mult[c] = std::exp2(scale_bits[c]);
    std::vector<std::int64_t> keys(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i)
        keys[i] = static_cast<std::int64_t>(std::floor(coords[i] * mult[i % dim]));
    return detail::count_distinct_rows(keys, dim);
}

/// |A|_delta for delta = 2^-s: occupied half-open dyadic cubes anchored at 0.
inline std::size_t covering_number(const PointSet& a, int s) {
    detail::check_scale(s);
    std::vector<double> bits(a.n, static_cast<double>(s));
    return cell_count(a.coords, a.n, bits);
}

/// delta = 2^-s; r_1 <= ... <= r_m = 1; level i covers the next k_i
/// coordinates (weight-adapted order, highest weight first) at scale delta^{r_i}.
struct TubeSpec {
    int s = 1;
    std::vector<double> r;
    std::vector<std::size_t> level_dims;
};

inline void validate_tube_spec(const TubeSpec& t, std::size_t n) {
    if (t.s < 1 || t.s > 40) throw SpecError("tube spec: delta must be 2^-s with 1 <= s <= 40");
    if (t.r.empty() || t.r.size() != t.level_dims.size()) throw SpecError("tube spec: r and level_dims differ in length");
    for (std::size_t i = 0; i < t.r.size(); ++i) {
        if (!(t.r[i] >= 0.0 && t.r[i] <= 1.0)) throw SpecError("tube spec: r_i outside [0, 1]");
        if (i > 0 && t.r[i] < t.r[i - 1]) throw SpecError("tube spec: r must be nondecreasing");
        if (t.level_dims[i] == 0) throw SpecError("tube spec: empty level");
    }
    if (t.r.back() != 1.0) throw SpecError("tube spec: r_m must equal 1");
    if (std::accumulate(t.level_dims.begin(), t.level_dims.end(), std::size_t{0}) != n)
        throw SpecError("tube spec: level dims do not sum to the ambient dimension");
}

/// Level dims taken from the weight multiplicities, highest weight first.
inline TubeSpec tube_spec_for(const std::vector<std::size_t>& ascending_multiplicities, int s, std::vector<double> r) {
    TubeSpec t{s, std::move(r), {ascending_multiplicities.rbegin(), ascending_multiplicities.rend()}};
    return t;
}

inline std::size_t tube_covering_number(const PointSet& a, const TubeSpec& t) {
    validate_tube_spec(t, a.n);
    std::vector<double> bits;
    for (std::size_t i = 0; i < t.r.size(); ++i) bits.insert(bits.end(), t.level_dims[i], t.s * t.r[i]);
    return cell_count(a.coords, a.n, bits);
}

inline Json point_set_to_json(const PointSet& p, bool with_points = true) {
    Json j{{"ambient", p.n}, {"size", p.size()}, {"provenance", p.provenance}, {"seed", p.seed}};
    if (std::isfinite(p.designed_dim)) j["designed_dim"] = p.designed_dim;
    if (with_points) {
        Json pts = Json::array();
        for (std::size_t i = 0; i < p.size(); ++i) {
            auto x = p.point(i);
            pts.push_back(std::vector<double>(x.begin(), x.end()));
        }
        j["points"] = std::move(pts);
    }
    return j;
}

}  // namespace equilab
