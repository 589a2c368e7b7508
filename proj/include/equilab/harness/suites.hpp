#pragma once

#include <equilab/bl/corpus.hpp>
#include <equilab/bl/estimate.hpp>
#include <equilab/bl/feasibility.hpp>
#include <equilab/generic/bounds.hpp>
#include <equilab/generic/subspace_spec.hpp>
#include <equilab/geometry/energy.hpp>
#include <equilab/geometry/fractal.hpp>
#include <equilab/geometry/projection.hpp>
#include <equilab/geometry/remez.hpp>
#include <equilab/harness/report.hpp>
#include <equilab/oppenheim/search.hpp>
#include <equilab/rep/irreducible.hpp>

#include <chrono>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace equilab {

struct SuiteConfig {
    std::vector<std::string> suites;
    std::uint64_t master_seed = 1;
    unsigned jobs = 1;
    Json params = Json::object();  // per-suite overrides, keyed by suite name
    std::string output;            // empty: standard output
    std::string format = "json";
    bool timing = false;           // add wall-clock time to JSON output
};

inline const std::vector<std::string>& known_suites() {
    static const std::vector<std::string> names{"hypotheses", "generic-dim", "bl", "discretized", "oppenheim"};
    return names;
}

inline const std::vector<std::string>& acceptance_configs() {
    static const std::vector<std::string> names{"so_pq:2,1", "so_pq:2,2", "so_pq:3,1", "sp2n:2", "tensor:2,2", "sl2_sym:4"};
    return names;
}

inline Json default_suite_params(const std::string& suite) {
    if (suite == "hypotheses") {
        Json expect = Json::object();
        for (const auto& c : acceptance_configs()) expect[c] = true;
        return Json{{"configs", acceptance_configs()}, {"expect_proximal", std::move(expect)}};
    }
    if (suite == "generic-dim")
        return Json{{"configs", acceptance_configs()},
                    {"trials", 200},
                    {"projection_trials", 50},
                    {"spanning_trials", 30},
                    {"complexity", 0},
                    {"submodularity_triples", 1000},
                    {"submodularity_dims", {4, 5, 6}},
                    {"duality_instances", 500}};
    if (suite == "bl")
        return Json{{"budget", 2000}, {"restarts", 8}, {"corpus_seed", 1}, {"random_checks", 100}};
    if (suite == "discretized")
        return Json{{"frostman_sets", 10},
                    {"frostman_bits", 8},
                    {"projection_config", "so_pq_complement:2,1"},
                    {"projection_fractal", "weight_aligned:1,1,0.5,0,0"},
                    {"projection_mu", "0"},
                    {"delta_bits", 10},
                    {"epsilon", 0.05},
                    {"num_u", 200},
                    {"pilot_u", 50},
                    {"control_fractal", "full_grid:5,4"},
                    {"remez_polys", 100},
                    {"remez_samples", 100000}};
    if (suite == "oppenheim")
        return Json{{"form", "x1^2+x2^2-sqrt2*x3^2"},
                    {"s", 0},
                    {"t_list", {10, 100, 1000}},
                    {"max_final", 0.05},
                    {"control_form", "x1^2+x2^2-x3^2"},
                    {"control_t", 10}};
    throw UsageError("unknown suite '" + suite + "'");
}

namespace detail {

inline bool same_kind(const Json& a, const Json& b) {
    if (a.is_number() && b.is_number()) return true;
    return a.type() == b.type();
}

}  // namespace detail

/// Defaults overlaid with the user's keys; unknown keys and type changes are
/// usage errors.
inline Json effective_params(const std::string& suite, const Json& overrides) {
    Json p = default_suite_params(suite);
    if (overrides.is_null()) return p;
    if (!overrides.is_object()) throw UsageError("params for '" + suite + "' must be an object");
    for (const auto& [k, v] : overrides.items()) {
        if (!p.contains(k)) throw UsageError("unknown parameter '" + k + "' for suite '" + suite + "'");
        if (!detail::same_kind(p[k], v)) throw UsageError("parameter '" + k + "' for suite '" + suite + "' has the wrong type");
        p[k] = v;
    }
    return p;
}

/// "all" expands to every suite; duplicates are dropped, order is kept.
inline std::vector<std::string> expand_suites(const std::vector<std::string>& names) {
    if (names.empty()) throw UsageError("empty suite list");
    std::vector<std::string> out;
    auto add = [&](const std::string& s) {
        if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    };
    for (const auto& n : names) {
        if (n == "all") {
            for (const auto& s : known_suites()) add(s);
        } else if (std::find(known_suites().begin(), known_suites().end(), n) != known_suites().end()) {
            add(n);
        } else {
            throw UsageError("unknown suite '" + n + "'");
        }
    }
    return out;
}

inline SuiteConfig suite_config_from_json(const Json& j) {
    if (!j.is_object()) throw UsageError("suite configuration must be a JSON object");
    SuiteConfig c;
    for (const auto& [k, v] : j.items()) {
        try {
            if (k == "suite" || k == "suites") {
                if (v.is_string())
                    c.suites = {v.get<std::string>()};
                else
                    c.suites = v.get<std::vector<std::string>>();
            } else if (k == "master_seed" || k == "seed") {
                c.master_seed = v.get<std::uint64_t>();
            } else if (k == "jobs") {
                c.jobs = v.get<unsigned>();
            } else if (k == "params") {
                c.params = v;
            } else if (k == "output" || k == "out") {
                c.output = v.get<std::string>();
            } else if (k == "format") {
                c.format = v.get<std::string>();
            } else if (k == "timing") {
                c.timing = v.get<bool>();
            } else {
                throw UsageError("unknown configuration key '" + k + "'");
            }
        } catch (const Json::exception& e) {
            throw UsageError("configuration key '" + k + "': " + e.what());
        }
    }
    return c;
}

inline Json suite_config_to_json(const SuiteConfig& c) {
    return Json{{"suites", c.suites}, {"master_seed", c.master_seed}, {"jobs", c.jobs}, {"params", c.params},
                {"output", c.output}, {"format", c.format},           {"timing", c.timing}};
}

/// Checks names, parameter keys, jobs and format. Returns the effective
/// parameters of each selected suite.
inline Json validate_suite_config(const SuiteConfig& c) {
    const auto names = expand_suites(c.suites);
    if (c.jobs == 0) throw UsageError("jobs must be at least 1");
    (void)parse_report_format(c.format);
    if (!c.params.is_object()) throw UsageError("params must be an object");
    for (const auto& [k, v] : c.params.items())
        if (std::find(known_suites().begin(), known_suites().end(), k) == known_suites().end())
            throw UsageError("params given for unknown suite '" + k + "'");
    Json eff = Json::object();
    for (const auto& n : names) eff[n] = effective_params(n, c.params.contains(n) ? c.params.at(n) : Json());
    return eff;
}

struct SuiteContext {
    std::uint64_t master_seed = 1;
    unsigned jobs = 1;

    [[nodiscard]] std::uint64_t seed(std::string_view module, std::string_view op, std::uint64_t index = 0) const {
        return derive_seed(master_seed, module, op, index);
    }
};

namespace detail {

/// Runs fn on a fresh item; an exception becomes an "error" verdict.
inline void run_item(std::vector<ReportItem>& out, std::string module, std::string op, std::string label,
                     const std::function<void(ReportItem&)>& fn) {
    auto it = make_item(std::move(module), std::move(op), std::move(label));
    try {
        fn(it);
    } catch (const std::exception& e) {
        it.verdict = Verdict::error;
        it.note = e.what();
        it.trials.clear();
    }
    out.push_back(std::move(it));
}

inline Verdict verdict_of(bool ok) { return ok ? Verdict::pass : Verdict::fail; }

inline std::string fmt_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

}  // namespace detail

inline std::vector<ReportItem> run_hypotheses(const Json& p, const SuiteContext&) {
    std::vector<ReportItem> out;
    const auto& expect = p.at("expect_proximal");
    for (const auto& name : p.at("configs").get<std::vector<std::string>>()) {
        detail::run_item(out, "rep_builder", "hypotheses", name, [&](ReportItem& it) {
            const auto cfg = build_config(name);
            const auto v = check_irreducible(cfg);
            const auto dec = weight_decompose(cfg);
            const bool prox = check_proximal(dec);
            bool ok = v.kind == IrreducibleKind::absolutely_irreducible;
            it.details = Json{{"n", cfg.n},
                              {"irreducible", to_string(v.kind)},
                              {"algebra_dim", v.algebra_dim},
                              {"proximal", prox},
                              {"weights", weights_to_json(dec)}};
            if (v.witness) it.details["witness"] = subspace_to_json(*v.witness);
            if (expect.contains(name)) {
                const bool want = expect.at(name).get<bool>();
                it.details["expected_proximal"] = want;
                ok = ok && prox == want;
            }
            it.verdict = detail::verdict_of(ok);
            it.note = std::string(to_string(v.kind)) + (prox ? ", proximal" : ", not proximal");
        });
    }
    return out;
}

namespace detail {

inline std::string pair_label(const std::string& cfg, const std::string& w, const std::string& wp) {
    return cfg + " W=" + w + " W'=" + wp;
}

/// Random integer matrix with entries in [-4, 4], redrawn until invertible.
inline Mat random_invertible(std::size_t n, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> e(-4, 4);
    while (true) {
        Mat h(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) h(i, j) = e(rng);
        if (determinant(h) != 0) return h;
    }
}

}  // namespace detail

inline std::vector<ReportItem> run_generic_dim(const Json& p, const SuiteContext& ctx) {
    std::vector<ReportItem> out;
    const std::string mod = "generic_dim";
    SamplingOptions opt;
    opt.complexity = p.at("complexity").get<std::size_t>();
    opt.jobs = ctx.jobs;
    const auto trials = p.at("trials").get<std::size_t>();
    const auto ptrials = p.at("projection_trials").get<std::size_t>();
    const auto strials = p.at("spanning_trials").get<std::size_t>();
    std::uint64_t pair_index = 0;
    for (const auto& name : p.at("configs").get<std::vector<std::string>>()) {
        std::optional<VerifiedConfig> vc;
        std::vector<LabelledSubspace> fam;
        detail::run_item(out, mod, "verify_config", name, [&](ReportItem& it) {
            vc.emplace(build_config(name));
            fam = weight_flag_family(weight_decompose(vc->config()));
            it.details = Json{{"irreducible", to_string(vc->verdict().kind)}, {"flags", fam.size()}};
            it.note = std::to_string(fam.size()) + " flags";
        });
        if (!vc) continue;
        const std::size_t n = vc->config().n;
        for (const auto& w : fam)
            for (const auto& wp : fam) {
                const auto idx = pair_index++;
                const auto label = detail::pair_label(name, w.label, wp.label);
                if (trials > 0)
                    detail::run_item(out, mod, "intersection_bound", label, [&](ReportItem& it) {
                        auto r = check_intersection_bound(*vc, w.space, wp.space, trials,
                                                          ctx.seed(mod, "intersection_bound", idx), opt);
                        it.details = trial_report_to_json(r);
                        it.details["bound"] = std::to_string(w.space.dim()) + "*" + std::to_string(wp.space.dim()) + "/" +
                                              std::to_string(n);
                        for (auto d : r.per_trial_dims)
                            it.trials.push_back(Json{{"dim", d}, {"pass", d * n <= w.space.dim() * wp.space.dim()}});
                        it.verdict = detail::verdict_of(r.all_passed());
                        it.note = std::to_string(r.passes) + "/" + std::to_string(r.trials) + " within bound";
                    });
                if (ptrials > 0)
                    detail::run_item(out, mod, "projection_bound", label, [&](ReportItem& it) {
                        auto r = check_projection_bound(*vc, w.space, wp.space, ptrials,
                                                        ctx.seed(mod, "projection_bound", idx), opt);
                        it.details = trial_report_to_json(r);
                        for (auto d : r.per_trial_dims)
                            it.trials.push_back(Json{{"rank", d}, {"pass", d * n >= w.space.dim() * wp.space.dim()}});
                        it.verdict = detail::verdict_of(r.all_passed());
                        it.note = std::to_string(r.passes) + "/" + std::to_string(r.trials) + " within bound";
                    });
            }
        if (strials > 0)
            for (std::size_t f = 0; f < fam.size(); ++f)
                detail::run_item(out, mod, "spanning_q", name + " W=" + fam[f].label, [&](ReportItem& it) {
                    auto r = find_spanning_q(*vc, fam[f].space, strials, ctx.seed(mod, "spanning_q", pair_index + f), opt);
                    const std::size_t k = fam[f].space.dim();
                    // every observed k_list, not only the modal one, must satisfy the identity
                    bool ok = true;
                    Json hist = Json::array();
                    for (const auto& [ks, count] : r.histogram) {
                        std::size_t sum = 0;
                        bool below = true;
                        for (auto x : ks) {
                            sum += x;
                            below = below && x < k;
                        }
                        const std::size_t q = ks.size() + 1;
                        const bool identity = sum + n == q * k;
                        ok = ok && identity && below;
                        hist.push_back(Json{{"k_list", ks}, {"count", count}, {"identity", identity}, {"all_below_k", below}});
                    }
                    it.details = Json{{"q", r.q}, {"k_list", r.k_list}, {"stable", r.stable}, {"k", k}, {"histogram", hist}};
                    it.verdict = detail::verdict_of(ok);
                    std::string ks;
                    for (auto x : r.k_list) ks += (ks.empty() ? "" : ",") + std::to_string(x);
                    it.note = "q = " + std::to_string(r.q) + ", k_list = (" + ks + ")";
                });
        pair_index += fam.size();
    }

    const auto triples = p.at("submodularity_triples").get<std::size_t>();
    const auto dims = p.at("submodularity_dims").get<std::vector<std::size_t>>();
    if (triples > 0)
        detail::run_item(out, mod, "submodularity", std::to_string(triples) + " triples", [&](ReportItem& it) {
            if (dims.empty()) throw UsageError("submodularity_dims is empty");
            auto rows = parallel_map(triples, ctx.jobs, [&](std::size_t i) {
                const std::size_t n = dims[i % dims.size()];
                auto t = random_subspace_tuple(n, 3, ctx.seed(mod, "submodularity", i));
                auto r = submodularity_check(t[0], t[1], t[2]);
                Json row{{"n", n}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"holds", r.holds}};
                if (!r.holds)
                    row["subspaces"] = Json::array({subspace_to_json(t[0]), subspace_to_json(t[1]), subspace_to_json(t[2])});
                return row;
            });
            std::size_t held = 0;
            Json fails = Json::array();
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (rows[i].at("holds").get<bool>())
                    ++held;
                else
                    fails.push_back(Json{{"index", i}, {"subspaces", rows[i].at("subspaces")}});
                rows[i].erase("subspaces");
                it.trials.push_back(std::move(rows[i]));
            }
            it.details = Json{{"triples", triples}, {"held", held}, {"failures", fails}};
            it.verdict = detail::verdict_of(held == triples);
            it.note = std::to_string(held) + "/" + std::to_string(triples) + " hold";
        });

    const auto inst = p.at("duality_instances").get<std::size_t>();
    if (inst > 0)
        detail::run_item(out, mod, "duality", std::to_string(inst) + " instances", [&](ReportItem& it) {
            auto rows = parallel_map(inst, ctx.jobs, [&](std::size_t i) {
                const std::size_t n = 3 + i % 4;
                const auto seed = ctx.seed(mod, "duality", i);
                std::mt19937_64 rng(seed);
                Mat h = detail::random_invertible(n, rng);
                auto ws = random_subspace_tuple(n, 2, derive_seed(seed, 1));
                auto d = duality_ranks(h, ws[0], ws[1]);
                Json row{{"n", n}, {"via_composition", d.via_composition}, {"via_transpose_image", d.via_transpose_image}};
                if (d.via_composition != d.via_transpose_image)
                    row["instance"] =
                        Json{{"h", mat_to_json(h)}, {"w", subspace_to_json(ws[0])}, {"w_prime", subspace_to_json(ws[1])}};
                return row;
            });
            std::size_t equal = 0;
            Json fails = Json::array();
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (rows[i].contains("instance")) {
                    fails.push_back(Json{{"index", i}, {"instance", rows[i].at("instance")}});
                    rows[i].erase("instance");
                } else {
                    ++equal;
                }
                it.trials.push_back(std::move(rows[i]));
            }
            it.details = Json{{"instances", inst}, {"equal", equal}, {"failures", fails}};
            it.verdict = detail::verdict_of(equal == inst);
            it.note = std::to_string(equal) + "/" + std::to_string(inst) + " equal";
        });
    return out;
}

inline BLDatum kernel_violating_datum() { return make_datum(2, {Mat{{1, 0}}}, {Rat(2)}); }

inline std::vector<ReportItem> run_bl(const Json& p, const SuiteContext& ctx) {
    std::vector<ReportItem> out;
    const std::string mod = "bl_toolkit";
    const auto budget = p.at("budget").get<std::size_t>();
    BLEstimateOptions opt;
    opt.restarts = p.at("restarts").get<std::size_t>();
    opt.jobs = ctx.jobs;
    const auto random_checks = p.at("random_checks").get<std::size_t>();

    const std::vector<std::pair<std::string, BLDatum>> unit{
        {"holder n=3 p=(1/2,1/2)", holder_datum(3, {Rat(1, 2), Rat(1, 2)})},
        {"loomis_whitney n=3", loomis_whitney_datum(3)}};
    for (std::size_t i = 0; i < unit.size(); ++i)
        detail::run_item(out, mod, "unit_constant", unit[i].first, [&](ReportItem& it) {
            const auto& d = unit[i].second;
            auto c = check_feasibility(d, FeasibilityMode::coordinate_exhaustive);
            auto e = estimate_bl_constant(d, budget, ctx.seed(mod, "unit_constant", i), opt);
            const bool ok = c.feasible() && !e.bl_infinite && e.lower_bound_variational >= 0.999 &&
                            e.lower_bound_gaussian >= 0.999 && e.lower_bound_variational <= 1 + 1e-6 &&
                            e.lower_bound_gaussian <= 1 + 1e-6;
            it.details = Json{{"feasibility", certificate_to_json(c)}, {"estimate", estimate_to_json(e)}};
            it.verdict = detail::verdict_of(ok);
            it.note = "variational " + detail::fmt_double(e.lower_bound_variational) + ", gaussian " +
                      detail::fmt_double(e.lower_bound_gaussian);
        });

    detail::run_item(out, mod, "kernel_violating", "n=2 map (1 0) p=2", [&](ReportItem& it) {
        const auto d = kernel_violating_datum();
        auto c = check_feasibility(d, FeasibilityMode::lattice);
        auto e = estimate_bl_constant(d, budget, ctx.seed(mod, "kernel_violating"), opt);
        const bool witnessed = !c.feasible() && c.witness && violates(d, *c.witness);
        it.details = Json{{"feasibility", certificate_to_json(c)}, {"estimate", estimate_to_json(e)}};
        it.verdict = detail::verdict_of(witnessed && e.bl_infinite);
        it.note = std::string(witnessed ? "witness found" : "no witness") + ", bl_infinite " + (e.bl_infinite ? "true" : "false");
    });

    const auto corpus = agreement_corpus(p.at("corpus_seed").get<std::uint64_t>());
    for (std::size_t i = 0; i < corpus.size(); ++i)
        detail::run_item(out, mod, "agreement", corpus[i].label, [&](ReportItem& it) {
            const auto& ld = corpus[i];
            auto c = check_feasibility(ld.datum, FeasibilityMode::lattice_plus_random, random_checks,
                                       ctx.seed(mod, "agreement_feasibility", i));
            auto e = estimate_bl_constant(ld.datum, budget, ctx.seed(mod, "agreement_estimate", i), opt);
            bool ok = c.feasible() == ld.feasible_by_construction && c.feasible() == !e.bl_infinite;
            if (c.feasible())
                ok = ok && e.converged;
            else
                ok = ok && c.witness && violates(ld.datum, *c.witness);
            it.details = Json{{"feasible_by_construction", ld.feasible_by_construction},
                              {"feasibility", certificate_to_json(c)},
                              {"estimate", estimate_to_json(e)}};
            if (!ok) it.details["datum"] = datum_to_json(ld.datum);
            it.verdict = detail::verdict_of(ok);
            it.note = std::string(c.feasible() ? "feasible" : "infeasible") + " / " +
                      (e.bl_infinite ? "bl_infinite" : "finite");
        });
    return out;
}

/// Three-dimensional sets of at most ~1700 points, so both exponent pairs
/// (alpha < 3) apply.
inline const std::vector<std::string>& frostman_descriptors() {
    static const std::vector<std::string> d{
        "random_cantor:3:2:5@3",   "random_cantor:3:2:6@4", "random_cantor:3:3:9@3",
        "random_cantor:3:4:12@2",  "random_subset:3,3,0.5", "random_subset:3,4,0.3",
        "product_cantor:3:0,2;3:0,1,2;2:0,1@3",             "random_cantor:3:2:7@3",
        "weight_aligned:1,0.5,1@4"};
    return d;
}

inline std::vector<ReportItem> run_discretized(const Json& p, const SuiteContext& ctx) {
    std::vector<ReportItem> out;
    const std::string mod = "discretized_geometry";

    const auto sets = p.at("frostman_sets").get<std::size_t>();
    const int fbits = p.at("frostman_bits").get<int>();
    const std::vector<std::pair<double, double>> exps{{1.0, 0.5}, {2.5, 2.0}};
    for (std::size_t i = 0; i < sets; ++i) {
        const auto& desc = frostman_descriptors()[i % frostman_descriptors().size()];
        const auto seed = ctx.seed(mod, "frostman_energy", i);
        detail::run_item(out, mod, "frostman_energy", desc + " #" + std::to_string(i), [&](ReportItem& it) {
            auto f = generate_fractal(desc, seed);
            bool ok = true;
            for (const auto& [a, b] : exps) {
                auto r = frostman_energy_bound_check(f, fbits, a, b);
                ok = ok && r.holds;
                it.trials.push_back(Json{{"alpha", a},
                                         {"beta", b},
                                         {"frostman_c", r.frostman_c},
                                         {"max_energy", r.max_energy},
                                         {"bound", r.bound},
                                         {"holds", r.holds}});
            }
            it.details = Json{{"fractal", desc}, {"seed", seed}, {"points", f.size()}, {"scale_bits", fbits}};
            it.verdict = detail::verdict_of(ok);
            it.note = std::to_string(f.size()) + " points";
        });
    }

    const auto cfg_name = p.at("projection_config").get<std::string>();
    const auto mu = parse_rat(p.at("projection_mu").get<std::string>());
    const int sbits = p.at("delta_bits").get<int>();
    const double eps = p.at("epsilon").get<double>();
    std::optional<double> m_fit;
    detail::run_item(out, mod, "projection_pilot", cfg_name, [&](ReportItem& it) {
        const auto cfg = build_config(cfg_name);
        const auto fseed = ctx.seed(mod, "projection_fractal");
        auto a = generate_fractal(p.at("projection_fractal").get<std::string>(), fseed);
        ProjectionParams pp;
        pp.mu = mu;
        pp.s = sbits;
        pp.epsilon = eps;
        pp.num_u = p.at("pilot_u").get<std::size_t>();
        pp.seed = ctx.seed(mod, "projection_pilot");
        pp.jobs = ctx.jobs;
        auto pilot = projection_experiment(cfg, a, pp);
        m_fit = fit_m_exponent(pilot, cfg.n, sbits, eps);
        it.details = exceptional_report_to_json(pilot, false);
        it.details["fitted_m"] = *m_fit;
        it.details["fractal_seed"] = fseed;
        it.note = "M = " + detail::fmt_double(*m_fit);
    });
    if (m_fit)
        detail::run_item(out, mod, "projection_subcritical", cfg_name, [&](ReportItem& it) {
            const auto cfg = build_config(cfg_name);
            auto a = generate_fractal(p.at("projection_fractal").get<std::string>(), ctx.seed(mod, "projection_fractal"));
            ProjectionParams pp;
            pp.mu = mu;
            pp.s = sbits;
            pp.epsilon = eps;
            pp.m_exponent = *m_fit;
            pp.num_u = p.at("num_u").get<std::size_t>();
            pp.seed = ctx.seed(mod, "projection_subcritical");
            pp.jobs = ctx.jobs;
            auto r = projection_experiment(cfg, a, pp);
            it.details = exceptional_report_to_json(r, false);
            it.details["m_exponent"] = *m_fit;
            for (const auto& t : r.per_u) it.trials.push_back(Json{{"u", t.t}, {"covering", t.covering}, {"exceptional", t.exceptional}});
            it.verdict = detail::verdict_of(r.passed());
            it.note = "exceptional fraction " + detail::fmt_double(r.exceptional_fraction) + " <= " +
                      detail::fmt_double(r.threshold);
        });
    for (auto mode : {ProjectionMode::subcritical, ProjectionMode::supercritical})
        detail::run_item(out, mod, "projection_control", p.at("control_fractal").get<std::string>() + " " + to_string(mode),
                         [&](ReportItem& it) {
                             const auto cfg = build_config(cfg_name);
                             const auto dec = weight_decompose(cfg);
                             auto a = generate_fractal(p.at("control_fractal").get<std::string>(), 0);
                             ProjectionParams pp;
                             pp.mu = mode == ProjectionMode::subcritical ? mu : dec.mu_max();
                             pp.mode = mode;
                             pp.s = sbits;
                             pp.epsilon = eps;
                             pp.num_u = std::min<std::size_t>(p.at("num_u").get<std::size_t>(), 50);
                             pp.seed = ctx.seed(mod, "projection_control", mode == ProjectionMode::subcritical ? 0 : 1);
                             pp.jobs = ctx.jobs;
                             auto r = projection_experiment(cfg, a, pp);
                             it.details = exceptional_report_to_json(r, false);
                             for (const auto& t : r.per_u)
                                 it.trials.push_back(
                                     Json{{"u", t.t}, {"covering", t.covering}, {"exceptional", t.exceptional}});
                             it.verdict = detail::verdict_of(r.num_exceptional == 0);
                             it.note = std::to_string(r.num_exceptional) + " exceptional of " + std::to_string(r.num_u);
                         });

    const auto polys = p.at("remez_polys").get<std::size_t>();
    const auto samples = p.at("remez_samples").get<std::size_t>();
    const double eps_cycle[3] = {1e-1, 1e-2, 1e-3};
    for (std::size_t i = 0; i < polys; ++i) {
        const std::size_t d = 1 + i % 2;
        const int k = 1 + static_cast<int>((i / 2) % 4);
        const double e = eps_cycle[i % 3];
        const auto seed = ctx.seed(mod, "remez", i);
        detail::run_item(out, mod, "remez", "d=" + std::to_string(d) + " k=" + std::to_string(k) + " #" + std::to_string(i),
                         [&](ReportItem& it) {
                             auto poly = random_polynomial(d, k, seed);
                             Box box(d, {-1.0, 1.0});
                             auto r = remez_check(poly, box, e, samples, derive_seed(seed, 1));
                             it.details = remez_result_to_json(r);
                             it.details["eps"] = e;
                             it.details["seed"] = seed;
                             if (!r.ok) it.details["polynomial"] = polynomial_to_json(poly);
                             it.verdict = detail::verdict_of(r.ok);
                             it.note = detail::fmt_double(r.empirical_measure) + " <= " + detail::fmt_double(r.bound);
                         });
    }
    return out;
}

inline std::vector<ReportItem> run_oppenheim(const Json& p, const SuiteContext& ctx) {
    std::vector<ReportItem> out;
    const std::string mod = "oppenheim_search";
    const double s = p.at("s").get<double>();
    detail::run_item(out, mod, "decay", p.at("form").get<std::string>(), [&](ReportItem& it) {
        const auto q = parse_form(p.at("form").get<std::string>());
        auto curve = decay_curve(q, s, p.at("t_list").get<std::vector<long>>(), ctx.jobs);
        bool ok = true;
        double prev = std::numeric_limits<double>::infinity();
        for (const auto& row : curve.rows) {
            const auto& r = row.running;
            ok = ok && r.found() && !r.exact_hit && r.best_value <= prev;
            prev = r.best_value;
            Json tr{{"T", row.t}, {"best_value", r.best_value}, {"exact_hit", r.exact_hit}, {"improved", row.improved}};
            if (r.found()) {
                tr["best_v"] = r.best_v;
                tr["value_exact"] = to_string(r.value_exact, q.sqrt_d);
            }
            it.trials.push_back(std::move(tr));
        }
        const double max_final = p.at("max_final").get<double>();
        ok = ok && !curve.rows.empty() && curve.rows.back().running.best_value <= max_final;
        it.details = decay_curve_to_json(curve, q.sqrt_d);
        it.details["max_final"] = max_final;
        it.verdict = detail::verdict_of(ok);
        it.note = "final minimum " + detail::fmt_double(curve.rows.back().running.best_value);
    });
    detail::run_item(out, mod, "isotropic_control", p.at("control_form").get<std::string>(), [&](ReportItem& it) {
        const auto q = parse_form(p.at("control_form").get<std::string>());
        auto r = search_min_value(q, s, p.at("control_t").get<long>(), ctx.jobs);
        it.details = search_result_to_json(r, q.sqrt_d);
        it.verdict = detail::verdict_of(r.exact_hit);
        it.note = r.exact_hit ? "exact zero" : "no exact zero";
    });
    return out;
}

inline std::vector<ReportItem> run_named_suite(const std::string& name, const Json& params, const SuiteContext& ctx) {
    if (name == "hypotheses") return run_hypotheses(params, ctx);
    if (name == "generic-dim") return run_generic_dim(params, ctx);
    if (name == "bl") return run_bl(params, ctx);
    if (name == "discretized") return run_discretized(params, ctx);
    if (name == "oppenheim") return run_oppenheim(params, ctx);
    throw UsageError("unknown suite '" + name + "'");
}

/// Suites run in order with seeds derived from (master_seed, module, op,
/// index), so adding or removing a suite leaves the others unchanged.
inline ExperimentReport run_suite(const SuiteConfig& cfg) {
    const Json eff = validate_suite_config(cfg);
    const auto start = std::chrono::steady_clock::now();
    ExperimentReport r;
    r.suites = expand_suites(cfg.suites);
    r.config = Json{{"suites", r.suites}, {"master_seed", cfg.master_seed}, {"params", eff}};
    SuiteContext ctx{cfg.master_seed, cfg.jobs};
    for (const auto& name : r.suites) {
        auto items = run_named_suite(name, eff.at(name), ctx);
        for (auto& it : items) r.items.push_back(std::move(it));
    }
    r.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace equilab
