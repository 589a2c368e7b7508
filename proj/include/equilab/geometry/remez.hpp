#pragma once

#include <equilab/exact/json.hpp>
#include <equilab/seed.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace equilab {

class DegenerateError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct Monomial {
    double coef = 0;
    std::vector<int> exps;
};

struct Polynomial {
    std::size_t d = 0;
    std::vector<Monomial> terms;

    [[nodiscard]] int degree() const {
        int k = 0;
        for (const auto& t : terms)
            if (t.coef != 0) {
                int s = 0;
                for (int e : t.exps) s += e;
                k = std::max(k, s);
            }
        return k;
    }

    [[nodiscard]] double operator()(const double* x) const {
        double v = 0;
        for (const auto& t : terms) {
            double m = t.coef;
            for (std::size_t i = 0; i < d; ++i)
                for (int e = 0; e < t.exps[i]; ++e) m *= x[i];
            v += m;
        }
        return v;
    }
};

using Box = std::vector<std::pair<double, double>>;

inline void validate_polynomial(const Polynomial& p) {
    if (p.d == 0) throw std::invalid_argument("polynomial needs at least one variable");
    for (const auto& t : p.terms) {
        if (t.exps.size() != p.d) throw std::invalid_argument("monomial has the wrong number of exponents");
        for (int e : t.exps)
            if (e < 0) throw std::invalid_argument("negative exponent");
        if (!std::isfinite(t.coef)) throw std::invalid_argument("non-finite coefficient");
    }
}

/// {"vars": d, "terms": [[coef, e_1, ..., e_d], ...]}
inline Polynomial polynomial_from_json(const Json& j) {
    Polynomial p;
    p.d = j.at("vars").get<std::size_t>();
    for (const auto& row : j.at("terms")) {
        if (!row.is_array() || row.size() != p.d + 1) throw std::invalid_argument("term must be [coef, exponents...]");
        Monomial m{row[0].get<double>(), {}};
        for (std::size_t i = 1; i <= p.d; ++i) m.exps.push_back(row[i].get<int>());
        p.terms.push_back(std::move(m));
    }
    validate_polynomial(p);
    return p;
}

inline Json polynomial_to_json(const Polynomial& p) {
    Json terms = Json::array();
    for (const auto& t : p.terms) {
        Json row = Json::array({t.coef});
        for (int e : t.exps) row.push_back(e);
        terms.push_back(std::move(row));
    }
    return Json{{"vars", p.d}, {"terms", std::move(terms)}};
}

/// Every monomial of total degree <= k with a coefficient uniform in [-1, 1].
inline Polynomial random_polynomial(std::size_t d, int k, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    Polynomial p{d, {}};
    std::vector<int> e(d, 0);
    while (true) {
        int s = 0;
        for (int x : e) s += x;
        if (s <= k) p.terms.push_back({coef(rng), e});
        std::size_t i = 0;
        while (i < d && ++e[i] > k) e[i++] = 0;
        if (i == d) break;
    }
    return p;
}

struct RemezResult {
    double empirical_measure = 0;  // Lebesgue measure of {|P| < eps} in the box, Monte Carlo
    double sup_lower = 0;          // grid + sample maximum of |P|
    double bound = 0;              // C (eps / sup)^(1/(dk)) Leb(B)
    double constant = 0;
    bool ok = false;
};

inline constexpr std::size_t kRemezMinSamples = 10000;

/// Leb{x in B : |P(x)| < eps} <= C (eps / |P|_sup)^(1/(dk)) Leb(B), C = 4^(dk)
/// unless given.
inline RemezResult remez_check(const Polynomial& p, const Box& box, double eps, std::size_t samples, std::uint64_t seed,
                               std::optional<double> constant = std::nullopt) {
    validate_polynomial(p);
    if (box.size() != p.d) throw std::invalid_argument("box dimension differs from the polynomial");
    if (samples < kRemezMinSamples) throw std::invalid_argument("remez_check needs at least 10^4 samples");
    if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
    double volume = 1;
    for (const auto& [lo, hi] : box) {
        if (!(hi > lo)) throw std::invalid_argument("box sides must have positive length");
        volume *= hi - lo;
    }
    const std::size_t d = p.d;
    const int k = p.degree();
    RemezResult r;

    // dense grid with about 4096 nodes
    const std::size_t side = std::max<std::size_t>(3, static_cast<std::size_t>(std::pow(4096.0, 1.0 / static_cast<double>(d))));
    std::vector<double> x(d);
    std::vector<std::size_t> idx(d, 0);
    while (true) {
        for (std::size_t i = 0; i < d; ++i)
            x[i] = box[i].first + (box[i].second - box[i].first) * static_cast<double>(idx[i]) / static_cast<double>(side - 1);
        r.sup_lower = std::max(r.sup_lower, std::fabs(p(x.data())));
        std::size_t i = 0;
        while (i < d && ++idx[i] == side) idx[i++] = 0;
        if (i == d) break;
    }

    std::mt19937_64 rng(derive_seed(seed, 0x4E));
    std::size_t below = 0;
    for (std::size_t t = 0; t < samples; ++t) {
        for (std::size_t i = 0; i < d; ++i) x[i] = std::uniform_real_distribution<double>(box[i].first, box[i].second)(rng);
        const double v = std::fabs(p(x.data()));
        r.sup_lower = std::max(r.sup_lower, v);
        if (v < eps) ++below;
    }
    if (r.sup_lower == 0) throw DegenerateError("polynomial vanishes on the box");
    r.empirical_measure = volume * static_cast<double>(below) / static_cast<double>(samples);
    const int dk = static_cast<int>(d) * k;
    r.constant = constant.value_or(std::pow(4.0, dk));
    const double ratio = eps / r.sup_lower;
    if (dk == 0) {
        // constant polynomial: the sublevel set is empty or everything
        r.bound = ratio > 1 ? r.constant * volume : 0.0;
    } else {
        r.bound = r.constant * std::pow(ratio, 1.0 / dk) * volume;
    }
    r.ok = r.empirical_measure <= r.bound;
    return r;
}

inline Json remez_result_to_json(const RemezResult& r) {
    return Json{{"empirical_measure", r.empirical_measure},
                {"sup_lower", r.sup_lower},
                {"bound", r.bound},
                {"constant", r.constant},
                {"ok", r.ok}};
}

}  // namespace equilab
