#pragma once

#include <equilab/generic/sampling.hpp>
#include <equilab/generic/tree.hpp>
#include <equilab/parallel.hpp>

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace equilab {

class IrreducibilityViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TrialFailure {
    std::size_t trial = 0;
    SampledElement element;  // for multi-leaf runs: the first leaf's element
    std::string detail;
};

struct TrialReport {
    std::size_t trials = 0;
    std::size_t passes = 0;
    std::map<std::size_t, std::size_t> dimension_histogram;
    std::vector<TrialFailure> witness_failures;
    std::size_t duality_checks = 0;
    std::size_t duality_failures = 0;
    std::optional<std::string> warning;
    std::vector<std::size_t> per_trial_dims;  // in trial order, for CSV export

    [[nodiscard]] bool all_passed() const { return passes == trials && duality_failures == 0; }
};

inline Json trial_report_to_json(const TrialReport& r) {
    Json hist = Json::object();
    for (const auto& [d, c] : r.dimension_histogram) hist[std::to_string(d)] = c;
    Json fails = Json::array();
    for (const auto& f : r.witness_failures) {
        Json j = recipe_to_json(f.element);
        j["trial"] = f.trial;
        j["detail"] = f.detail;
        fails.push_back(std::move(j));
    }
    Json out{{"trials", r.trials}, {"passes", r.passes}, {"histogram", std::move(hist)}, {"failures", std::move(fails)}};
    if (r.duality_checks) {
        out["duality_checks"] = r.duality_checks;
        out["duality_failures"] = r.duality_failures;
    }
    if (r.warning) out["warning"] = *r.warning;
    return out;
}

/// Modal value of a histogram, provided it is unique and reached in at least
/// `threshold` of the trials.
struct ModalResult {
    std::size_t value = 0;
    std::size_t count = 0;
    bool stable = false;
    bool tie = false;
};

inline ModalResult modal(const std::map<std::size_t, std::size_t>& hist, std::size_t trials, double threshold = 0.95) {
    ModalResult m;
    for (const auto& [v, c] : hist) {
        if (c > m.count) {
            m = {v, c, false, false};
        } else if (c == m.count) {
            m.tie = true;
        }
    }
    m.stable = !m.tie && trials > 0 && static_cast<double>(m.count) >= threshold * static_cast<double>(trials);
    return m;
}

struct GenericDimResult {
    std::size_t k = 0;
    bool stable = false;
    TrialReport report;
};

/// Generic dimension of Phi^(T) evaluated on independently translated copies h_v.W.
inline GenericDimResult generic_tree_dim(const RepConfig& cfg, const TreeOp& t, const Subspace& w,
                                         std::size_t trials, std::uint64_t seed, const SamplingOptions& opt = {}) {
    if (trials < 2) throw std::invalid_argument("generic_tree_dim: need at least 2 trials");
    if (w.ambient_dim() != cfg.n) throw DimensionMismatch("generic_tree_dim: W not in V");
    const std::size_t leaves = t.leaf_count();
    auto dims = parallel_map(trials, opt.jobs, [&](std::size_t trial) {
        std::vector<Subspace> ls;
        for (std::size_t v = 0; v < leaves; ++v) ls.push_back(apply(draw(cfg, derive_seed(seed, trial, v), opt).matrix, w));
        return eval_tree(t, ls).dim();
    });
    GenericDimResult res;
    res.report.trials = trials;
    res.report.per_trial_dims = dims;
    for (auto d : dims) ++res.report.dimension_histogram[d];
    auto m = modal(res.report.dimension_histogram, trials);
    res.k = m.value;
    res.stable = m.stable;
    res.report.passes = m.count;
    if (!m.stable)
        res.report.warning = m.tie ? "unstable dimension: histogram tie" : "unstable dimension: modal value below 95%";
    return res;
}

/// Per trial: d = dim(h.W ∩ W') and the exact test d * n <= dim W * dim W'.
inline TrialReport check_intersection_bound(const VerifiedConfig& vc, const Subspace& w, const Subspace& w_prime,
                                            std::size_t trials, std::uint64_t seed, const SamplingOptions& opt = {}) {
    const RepConfig& cfg = vc.config();
    if (w.ambient_dim() != cfg.n || w_prime.ambient_dim() != cfg.n)
        throw DimensionMismatch("check_intersection_bound: subspaces not in V");
    const std::size_t k = w.dim(), kp = w_prime.dim(), n = cfg.n;
    struct Out {
        std::size_t d = 0;
        SampledElement h;
    };
    auto outs = parallel_map(trials, opt.jobs, [&](std::size_t trial) {
        Out o;
        o.h = draw(cfg, derive_seed(seed, trial), opt);
        o.d = subspace_intersect(apply(o.h.matrix, w), w_prime).dim();
        return o;
    });
    TrialReport r;
    r.trials = trials;
    for (std::size_t i = 0; i < trials; ++i) {
        auto& o = outs[i];
        ++r.dimension_histogram[o.d];
        r.per_trial_dims.push_back(o.d);
        if (o.d * n <= k * kp) {
            ++r.passes;
        } else {
            r.witness_failures.push_back({i, std::move(o.h),
                                          "dim = " + std::to_string(o.d) + " > " + std::to_string(k) + "*" +
                                              std::to_string(kp) + "/" + std::to_string(n)});
        }
    }
    return r;
}

inline TrialReport check_intersection_bound(const RepConfig& cfg, const Subspace& w, const Subspace& w_prime,
                                            std::size_t trials, std::uint64_t seed, const SamplingOptions& opt = {}) {
    return check_intersection_bound(VerifiedConfig(cfg), w, w_prime, trials, seed, opt);
}

/// The two sides of the transpose duality, computed along separate routes:
/// rank(B_W^T h B_{W'}) and rank(B_{h^T W}^T B_{W'}).
struct DualityRanks {
    std::size_t via_composition = 0;
    std::size_t via_transpose_image = 0;
};

inline DualityRanks duality_ranks(const Mat& h, const Subspace& w, const Subspace& w_prime) {
    DualityRanks d;
    if (w.is_zero() || w_prime.is_zero()) return d;
    d.via_composition = rank(w.basis().transpose() * h * w_prime.basis());
    d.via_transpose_image = projection_rank(apply(h.transpose(), w), w_prime);
    return d;
}

/// Per trial: r = rank of the orthogonal projection onto h.W restricted to W',
/// tested as r * n >= dim W * dim W'; the duality identity is checked on every trial.
inline TrialReport check_projection_bound(const VerifiedConfig& vc, const Subspace& w, const Subspace& w_prime,
                                          std::size_t trials, std::uint64_t seed, const SamplingOptions& opt = {}) {
    const RepConfig& cfg = vc.config();
    if (w.ambient_dim() != cfg.n || w_prime.ambient_dim() != cfg.n)
        throw DimensionMismatch("check_projection_bound: subspaces not in V");
    const std::size_t k = w.dim(), kp = w_prime.dim(), n = cfg.n;
    struct Out {
        std::size_t r = 0;
        bool dual_ok = true;
        SampledElement h;
    };
    auto outs = parallel_map(trials, opt.jobs, [&](std::size_t trial) {
        Out o;
        o.h = draw(cfg, derive_seed(seed, trial), opt);
        o.r = projection_rank(apply(o.h.matrix, w), w_prime);
        auto dr = duality_ranks(o.h.matrix, w, w_prime);
        o.dual_ok = dr.via_composition == dr.via_transpose_image;
        return o;
    });
    TrialReport rep;
    rep.trials = trials;
    for (std::size_t i = 0; i < trials; ++i) {
        auto& o = outs[i];
        ++rep.dimension_histogram[o.r];
        rep.per_trial_dims.push_back(o.r);
        ++rep.duality_checks;
        if (!o.dual_ok) ++rep.duality_failures;
        if (o.r * n >= k * kp && o.dual_ok) {
            ++rep.passes;
        } else {
            rep.witness_failures.push_back({i, o.h, o.dual_ok ? "projection rank below bound" : "duality mismatch"});
        }
    }
    return rep;
}

inline TrialReport check_projection_bound(const RepConfig& cfg, const Subspace& w, const Subspace& w_prime,
                                          std::size_t trials, std::uint64_t seed, const SamplingOptions& opt = {}) {
    return check_projection_bound(VerifiedConfig(cfg), w, w_prime, trials, seed, opt);
}

struct SpanningResult {
    std::size_t q = 0;
    std::vector<std::size_t> k_list;  // (k_2, ..., k_q)
    bool stable = false;
    bool identity_holds = false;      // sum k_list == q*k - n
    bool all_below_k = false;
    std::size_t trials = 0;
    std::size_t modal_count = 0;
    std::map<std::vector<std::size_t>, std::size_t> histogram;  // k_list -> count
};

/// Adds generic translates h_1.W, h_2.W, ... until they span V, recording
/// k_{q'} = dim((h_1.W + ... + h_{q'-1}.W) ∩ h_{q'}.W).
inline SpanningResult find_spanning_q(const VerifiedConfig& vc, const Subspace& w, std::size_t trials,
                                      std::uint64_t seed, const SamplingOptions& opt = {}) {
    const RepConfig& cfg = vc.config();
    const std::size_t n = cfg.n, k = w.dim();
    if (w.ambient_dim() != n) throw DimensionMismatch("find_spanning_q: W not in V");
    if (k == 0) throw std::invalid_argument("find_spanning_q: W must be nonzero");
    if (trials == 0) throw std::invalid_argument("find_spanning_q: need at least one trial");
    auto lists = parallel_map(trials, opt.jobs, [&](std::size_t trial) {
        std::vector<std::size_t> ks;
        Subspace acc = apply(draw(cfg, derive_seed(seed, trial, 0), opt).matrix, w);
        std::size_t q = 1;
        while (!acc.is_full()) {
            if (q >= n)
                throw IrreducibilityViolation(cfg.name + ": " + std::to_string(q) +
                                              " translates of W fail to span V");
            auto next = apply(draw(cfg, derive_seed(seed, trial, q), opt).matrix, w);
            ks.push_back(subspace_intersect(acc, next).dim());
            acc = subspace_sum(acc, next);
            ++q;
        }
        return ks;
    });
    SpanningResult res;
    res.trials = trials;
    for (auto& l : lists) ++res.histogram[l];
    const std::vector<std::size_t>* best = nullptr;
    bool tie = false;
    for (const auto& [l, c] : res.histogram) {
        if (c > res.modal_count) {
            res.modal_count = c;
            best = &l;
            tie = false;
        } else if (c == res.modal_count) {
            tie = true;
        }
    }
    res.k_list = *best;
    res.q = res.k_list.size() + 1;
    res.stable = !tie && static_cast<double>(res.modal_count) >= 0.95 * static_cast<double>(trials);
    std::size_t sum = 0;
    res.all_below_k = true;
    for (auto x : res.k_list) {
        sum += x;
        if (x >= k) res.all_below_k = false;
    }
    res.identity_holds = sum + n == res.q * k;
    return res;
}

inline SpanningResult find_spanning_q(const RepConfig& cfg, const Subspace& w, std::size_t trials,
                                      std::uint64_t seed, const SamplingOptions& opt = {}) {
    return find_spanning_q(VerifiedConfig(cfg), w, trials, seed, opt);
}

struct SubmodularityResult {
    std::size_t lhs = 0;  // dim W'∩W1∩W2 + dim W'∩(W1+W2)
    std::size_t rhs = 0;  // dim W'∩W1 + dim W'∩W2
    bool holds = false;
};

inline SubmodularityResult submodularity_check(const Subspace& w_prime, const Subspace& w1, const Subspace& w2) {
    require_same_ambient(w_prime, w1);
    require_same_ambient(w_prime, w2);
    SubmodularityResult r;
    const Subspace all3[3] = {w_prime, w1, w2};
    r.lhs = subspace_intersect(std::span<const Subspace>(all3)).dim() +
            subspace_intersect(w_prime, subspace_sum(w1, w2)).dim();
    r.rhs = subspace_intersect(w_prime, w1).dim() + subspace_intersect(w_prime, w2).dim();
    r.holds = r.lhs >= r.rhs;
    return r;
}

/// Random subspaces spanned by vectors drawn from a small shared pool, so that
/// the members of a tuple overlap nontrivially.
inline std::vector<Subspace> random_subspace_tuple(std::size_t n, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> num(-4, 4), den(1, 3);
    std::size_t pool_size = n + 1;
    std::vector<std::vector<Rat>> pool(pool_size, std::vector<Rat>(n));
    for (auto& v : pool)
        for (auto& x : v) {
            x = Rat(num(rng), den(rng));
            x.canonicalize();
        }
    std::uniform_int_distribution<std::size_t> pick(0, pool_size - 1), dimd(0, n);
    std::vector<Subspace> out;
    for (std::size_t c = 0; c < count; ++c) {
        std::size_t k = dimd(rng);
        Mat b(n, k);
        for (std::size_t j = 0; j < k; ++j) {
            const auto& v = pool[pick(rng)];
            for (std::size_t i = 0; i < n; ++i) b(i, j) = v[i];
        }
        out.push_back(canonicalize(b));
    }
    return out;
}

}  // namespace equilab
