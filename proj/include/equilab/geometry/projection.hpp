#pragma once

#include <equilab/bl/datum.hpp>
#include <equilab/generic/sampling.hpp>
#include <equilab/geometry/pointset.hpp>
#include <equilab/parallel.hpp>
#include <equilab/rep/weights.hpp>
#include <equilab/seed.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace equilab {

class HypothesisError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class ProjectionMode { subcritical, supercritical };

inline std::string to_string(ProjectionMode m) { return m == ProjectionMode::subcritical ? "subcritical" : "supercritical"; }

inline ProjectionMode parse_projection_mode(const std::string& s) {
    if (s == "subcritical") return ProjectionMode::subcritical;
    if (s == "supercritical") return ProjectionMode::supercritical;
    throw std::invalid_argument("mode must be subcritical or supercritical");
}

inline constexpr int kMinScaleBits = 1;
inline constexpr int kMaxScaleBits = 14;
inline constexpr std::size_t kMaxNumU = 1000;

struct ProjectionParams {
    Rat mu = 0;
    int s = 10;                   // delta = 2^-s
    double epsilon = 0.05;
    double m_exponent = 1.0;      // M, subcritical only
    std::size_t num_u = 100;
    std::uint64_t seed = 1;
    ProjectionMode mode = ProjectionMode::subcritical;
    std::optional<double> alpha;  // supercritical; defaults to log|A|_delta / log(1/delta)
    unsigned jobs = 1;
};

struct ProjectionTrial {
    std::vector<double> t;        // u = exp(sum t_i N_i) over the u+ generators
    std::size_t covering = 0;
    bool exceptional = false;
};

struct ExceptionalReport {
    ProjectionMode mode = ProjectionMode::subcritical;
    std::size_t num_u = 0;
    std::size_t num_exceptional = 0;
    double exceptional_fraction = 0;
    double threshold = 0;           // delta^eps, the bound on the exceptional fraction
    double covering_threshold = 0;  // u is exceptional when |pi(u.A)|_delta falls below this
    std::size_t set_covering = 0;   // |A|_delta
    std::size_t flag_dim = 0;
    double alpha = 0;
    std::vector<ProjectionTrial> per_u;

    [[nodiscard]] bool passed() const { return exceptional_fraction <= threshold; }
};

namespace detail {

/// exp of a nilpotent matrix by its finite series.
inline Eigen::MatrixXd exp_nilpotent(const Eigen::MatrixXd& x) {
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(n, n), term = out;
    for (Eigen::Index k = 1; k <= n; ++k) {
        term = term * x / static_cast<double>(k);
        out += term;
    }
    return out;
}

}  // namespace detail

/// |pi(u.A)|_delta for the rows `flag` of u.
inline std::size_t projected_covering(const PointSet& a, const Eigen::MatrixXd& u, const std::vector<std::size_t>& flag,
                                      int s) {
    const std::size_t k = flag.size();
    std::vector<double> proj(a.size() * k);
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto x = a.point(i);
        for (std::size_t r = 0; r < k; ++r) {
            double y = 0;
            for (std::size_t c = 0; c < a.n; ++c) y += u(static_cast<Eigen::Index>(flag[r]), static_cast<Eigen::Index>(c)) * x[c];
            proj[i * k + r] = y;
        }
    }
    std::vector<double> bits(k, static_cast<double>(s));
    return cell_count(proj, k, bits);
}

/// Samples u in the unit box of u+ coordinates and counts |pi^(mu)(u.A)|_delta.
/// Subcritical: u is exceptional when the count is below delta^(M eps) |A|_delta^(k/n).
/// Supercritical (mu = mu_max, proximal): below delta^-min(alpha/n + eps, 1).
inline ExceptionalReport projection_experiment(const RepConfig& cfg, const PointSet& a, const ProjectionParams& p) {
    if (a.n != cfg.n) throw DimensionMismatch("point set ambient dimension differs from the configuration");
    if (cfg.n > kMaxAmbient) throw SizeError("projection experiments need n <= 9");
    if (p.s < kMinScaleBits || p.s > kMaxScaleBits) throw std::invalid_argument("delta must be 2^-s with 1 <= s <= 14");
    if (p.num_u == 0 || p.num_u > kMaxNumU) throw std::invalid_argument("num_u must lie in [1, 1000]");
    if (!(p.epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
    if (cfg.u_plus_indices.empty()) throw IncompleteConfig(cfg.name + ": no u+ generators");
    const auto dec = weight_decompose(cfg);
    if (!dec.coordinate_adapted) throw std::invalid_argument("projection experiments need weight-adapted coordinates");
    if (p.mode == ProjectionMode::supercritical) {
        if (!check_proximal(dec)) throw HypothesisError(cfg.name + " is not proximal");
        if (p.mu != dec.mu_max()) throw HypothesisError("supercritical mode projects to the top weight mu_max");
    }
    (void)dec.index_of(p.mu);  // InvalidLevel for a non-weight

    std::vector<std::size_t> flag;
    for (std::size_t i = 0; i < cfg.n; ++i)
        if (cfg.a_action(i, i) >= p.mu) flag.push_back(i);

    ExceptionalReport rep;
    rep.mode = p.mode;
    rep.num_u = p.num_u;
    rep.flag_dim = flag.size();
    rep.set_covering = covering_number(a, p.s);
    const double delta = std::ldexp(1.0, -p.s);
    const double log_a = std::log(static_cast<double>(rep.set_covering));
    rep.threshold = std::pow(delta, p.epsilon);
    rep.alpha = p.alpha.value_or(std::min(log_a / (p.s * std::log(2.0)), static_cast<double>(cfg.n)));
    if (p.mode == ProjectionMode::subcritical) {
        rep.covering_threshold = std::pow(delta, p.m_exponent * p.epsilon) *
                                 std::exp(log_a * static_cast<double>(flag.size()) / static_cast<double>(cfg.n));
    } else {
        rep.covering_threshold = std::pow(delta, -std::min(rep.alpha / static_cast<double>(cfg.n) + p.epsilon, 1.0));
    }

    std::vector<Eigen::MatrixXd> gens;
    for (auto i : cfg.u_plus_indices) gens.push_back(to_eigen(cfg.h_basis[i]));
    rep.per_u = parallel_map(p.num_u, p.jobs, [&](std::size_t idx) {
        std::mt19937_64 rng(derive_seed(p.seed, idx));
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        ProjectionTrial tr;
        Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cfg.n), static_cast<Eigen::Index>(cfg.n));
        for (const auto& g : gens) {
            tr.t.push_back(unif(rng));
            x += tr.t.back() * g;
        }
        tr.covering = projected_covering(a, detail::exp_nilpotent(x), flag, p.s);
        tr.exceptional = static_cast<double>(tr.covering) < rep.covering_threshold;
        return tr;
    });
    for (const auto& tr : rep.per_u) rep.num_exceptional += tr.exceptional ? 1 : 0;
    rep.exceptional_fraction = static_cast<double>(rep.num_exceptional) / static_cast<double>(rep.num_u);
    return rep;
}

/// Smallest M (rounded up to a multiple of 0.1, at least 1) making every
/// trial of a pilot run non-exceptional in subcritical mode.
inline double fit_m_exponent(const ExceptionalReport& pilot, std::size_t n, int s, double epsilon) {
    const double log_delta = -s * std::log(2.0);
    const double log_target =
        std::log(static_cast<double>(pilot.set_covering)) * static_cast<double>(pilot.flag_dim) / static_cast<double>(n);
    double m = 1.0;
    // covering >= delta^(M eps) |A|^(k/n)  <=>  M >= (log covering - (k/n) log|A|) / (eps log delta)
    for (const auto& tr : pilot.per_u)
        m = std::max(m, (std::log(static_cast<double>(tr.covering)) - log_target) / (epsilon * log_delta));
    return std::ceil(m * 10.0) / 10.0;
}

inline Json exceptional_report_to_json(const ExceptionalReport& r, bool with_trials = true) {
    Json j{{"mode", to_string(r.mode)},
           {"num_u", r.num_u},
           {"num_exceptional", r.num_exceptional},
           {"exceptional_fraction", r.exceptional_fraction},
           {"threshold", r.threshold},
           {"covering_threshold", r.covering_threshold},
           {"set_covering", r.set_covering},
           {"flag_dim", r.flag_dim},
           {"alpha", r.alpha},
           {"passed", r.passed()}};
    if (with_trials) {
        Json rows = Json::array();
        for (const auto& t : r.per_u) rows.push_back(Json{{"u", t.t}, {"covering", t.covering}, {"exceptional", t.exceptional}});
        j["per_u"] = std::move(rows);
    }
    return j;
}

}  // namespace equilab
