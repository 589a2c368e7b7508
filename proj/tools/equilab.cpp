#include <equilab/harness/suites.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace equilab;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

Json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot read '" + path + "'");
    try {
        return Json::parse(f);
    } catch (const Json::exception& e) {
        throw UsageError("'" + path + "' is not valid JSON: " + e.what());
    }
}

bool is_json_path(const std::string& s) { return s.size() > 5 && s.substr(s.size() - 5) == ".json"; }

/// Keys of a JSON options file are long option names of the subcommand (or of
/// the top level, e.g. "jobs"); values replace whatever was given as flags.
void apply_overrides(CLI::App& app, CLI::App& sub, const Json& j, const std::string& skip) {
    if (!j.is_object()) throw UsageError("options file must hold a JSON object");
    for (const auto& [k, v] : j.items()) {
        if (k == skip) continue;
        CLI::Option* opt = sub.get_option_no_throw("--" + k);
        if (!opt) opt = app.get_option_no_throw("--" + k);
        if (!opt) throw UsageError("unknown option '" + k + "' in options file");
        opt->clear();
        auto add = [&](const Json& x) {
            if (x.is_string())
                opt->add_result(x.get<std::string>());
            else
                opt->add_result(x.dump());
        };
        if (v.is_array()) {
            for (const auto& x : v) add(x);
        } else {
            add(v);
        }
        opt->run_callback();
    }
}

struct Output {
    std::string path;
    std::string format = "json";
    bool timing = false;
};

void add_output_options(CLI::App* sub, Output& o) {
    sub->add_option("--out", o.path, "Report path (default: standard output)");
    sub->add_option("--format", o.format, "json, csv or markdown");
    sub->add_flag("--timing", o.timing, "Include wall-clock time in JSON output");
}

int finish(const ExperimentReport& r, const Output& o) {
    const auto fmt = parse_report_format(o.format);
    const auto text = emit_report(r, fmt, o.timing);
    if (o.path.empty())
        std::cout << text;
    else
        write_text(o.path, text);
    const auto s = r.summary();
    std::cerr << s.items << " items: " << s.passed << " passed, " << s.failed << " failed, " << s.errors << " errors\n";
    return r.all_passed() ? kExitPass : kExitFail;
}

ExperimentReport single(std::string suite, Json config, std::vector<ReportItem> items) {
    ExperimentReport r;
    r.suites = {std::move(suite)};
    r.config = std::move(config);
    r.items = std::move(items);
    return r;
}

std::vector<long> parse_long_list(const std::string& s) {
    std::vector<long> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stol(tok));
        } catch (const std::exception&) {
            throw UsageError("bad integer '" + tok + "' in list '" + s + "'");
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact and numerical checks for equidistribution hypotheses"};
    app.require_subcommand(1);
    app.fallthrough();
    unsigned jobs = 1;
    app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    // suites
    std::vector<std::string> suite_names;
    std::uint64_t master_seed = 1;
    std::string suite_config_path;
    Output suite_out;
    auto* suite = app.add_subcommand("suite", "Run named verification suites");
    suite->add_option("names", suite_names, "hypotheses, generic-dim, bl, discretized, oppenheim, all");
    std::vector<CLI::App*> suite_subs{suite};
    for (const auto& n : {"hypotheses", "generic-dim", "discretized", "all"})
        suite_subs.push_back(app.add_subcommand(n, std::string(n) == "all" ? "Run every suite" : std::string("Run the ") + n + " suite"));
    for (auto* s : suite_subs) {
        s->add_option("--seed", master_seed, "Master seed");
        s->add_option("--config", suite_config_path, "Suite configuration JSON (overrides flags)");
        add_output_options(s, suite_out);
    }

    // genericdim
    std::string gd_config, gd_w, gd_wp;
    std::size_t gd_trials = 200, gd_complexity = 0;
    std::uint64_t gd_seed = 1;
    bool gd_projection = false;
    Output gd_out;
    auto* gd = app.add_subcommand("genericdim", "Check the generic intersection or projection bound");
    gd->add_option("--config", gd_config, "Configuration descriptor, or an options .json file")->required();
    gd->add_option("--w", gd_w, "W: flag:MU, weight:MU or coords:i,j");
    gd->add_option("--wprime", gd_wp, "W'");
    gd->add_option("--trials", gd_trials);
    gd->add_option("--seed", gd_seed);
    gd->add_option("--complexity", gd_complexity, "Factors per sampled element (0: default)");
    gd->add_flag("--projection", gd_projection, "Check the projection bound instead");
    add_output_options(gd, gd_out);

    // bl
    std::string bl_datum, bl_mode = "lattice_plus_random", bl_expect;
    std::size_t bl_budget = 2000, bl_random = 100, bl_restarts = 8;
    std::uint64_t bl_seed = 1;
    Output bl_out;
    std::string bl_opts;
    auto* bl = app.add_subcommand("bl", "Brascamp-Lieb data");
    bl->require_subcommand(1);
    auto* bl_check = bl->add_subcommand("check", "Feasibility with an exact witness");
    auto* bl_est = bl->add_subcommand("estimate", "Lower bounds on the constant");
    auto* bl_suite = bl->add_subcommand("suite", "Run the bl suite");
    for (auto* s : {bl_check, bl_est}) {
        s->add_option("--datum", bl_datum, "Datum JSON file")->required();
        s->add_option("--seed", bl_seed);
        s->add_option("--expect", bl_expect, "feasible or infeasible: turn the verdict into a check");
        s->add_option("--options", bl_opts, "Options JSON (overrides flags)");
        add_output_options(s, bl_out);
    }
    bl_check->add_option("--mode", bl_mode, "lattice, lattice_plus_random or coordinate_exhaustive");
    bl_check->add_option("--random", bl_random, "Random subspaces per dimension");
    bl_est->add_option("--budget", bl_budget);
    bl_est->add_option("--restarts", bl_restarts);
    bl_suite->add_option("--seed", master_seed, "Master seed");
    bl_suite->add_option("--config", suite_config_path, "Suite configuration JSON (overrides flags)");
    add_output_options(bl_suite, suite_out);

    // proj-exp
    std::string pe_config, pe_fractal, pe_mu = "0", pe_mode = "subcritical";
    int pe_delta = 10;
    double pe_eps = 0.05, pe_m = 0, pe_alpha = -1;
    std::size_t pe_num_u = 100, pe_pilot_u = 50;
    std::uint64_t pe_seed = 1;
    long long pe_fractal_seed = -1, pe_pilot_seed = -1;
    Output pe_out;
    auto* pe = app.add_subcommand("proj-exp", "Exceptional-set projection experiment");
    pe->add_option("--config", pe_config, "Configuration descriptor, or an options .json file")->required();
    pe->add_option("--fractal", pe_fractal, "Fractal descriptor");
    pe->add_option("--mu", pe_mu, "Flag level");
    pe->add_option("--delta", pe_delta, "delta = 2^-DELTA");
    pe->add_option("--epsilon", pe_eps);
    pe->add_option("--num-u", pe_num_u);
    pe->add_option("--seed", pe_seed);
    pe->add_option("--mode", pe_mode, "subcritical or supercritical");
    pe->add_option("--m-exponent", pe_m, "Threshold exponent M (subcritical; 0: fit from a pilot run)");
    pe->add_option("--pilot-u", pe_pilot_u, "Pilot samples when M is fitted");
    pe->add_option("--pilot-seed", pe_pilot_seed, "Pilot seed (default: derived from --seed)");
    pe->add_option("--fractal-seed", pe_fractal_seed, "Fractal seed (default: --seed)");
    pe->add_option("--alpha", pe_alpha, "Supercritical alpha (default: measured)");
    add_output_options(pe, pe_out);

    // oppenheim
    std::string op_form, op_decay;
    double op_s = 0;
    long op_t = 1000;
    Output op_out;
    std::string op_opts;
    auto* op = app.add_subcommand("oppenheim", "Small values of an indefinite form (no --form: run the suite)");
    op->add_option("--form", op_form, "Form, e.g. \"x1^2+x2^2-sqrt2*x3^2\"");
    op->add_option("--s", op_s, "Target value");
    op->add_option("--T", op_t, "Sup-norm bound");
    op->add_option("--decay", op_decay, "Comma-separated T list: running minima and a decay fit");
    op->add_option("--seed", master_seed, "Master seed (suite mode)");
    op->add_option("--config", suite_config_path, "Suite configuration JSON (suite mode) or options JSON");
    add_output_options(op, op_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        auto run_suites = [&](CLI::App* s, std::vector<std::string> names, Output o) {
            SuiteConfig c;
            c.suites = std::move(names);
            c.master_seed = master_seed;
            c.jobs = jobs;
            c.output = o.path;
            c.format = o.format;
            c.timing = o.timing;
            if (!suite_config_path.empty()) {
                // file values win over flags; keys it does not set keep the flag values
                const Json j = read_json_file(suite_config_path);
                const auto f = suite_config_from_json(j);
                if (j.contains("suite") || j.contains("suites")) c.suites = f.suites;
                if (j.contains("master_seed") || j.contains("seed")) c.master_seed = f.master_seed;
                if (j.contains("jobs")) c.jobs = f.jobs;
                if (j.contains("params")) c.params = f.params;
                if (j.contains("output") || j.contains("out")) c.output = f.output;
                if (j.contains("format")) c.format = f.format;
                if (j.contains("timing")) c.timing = f.timing;
            }
            (void)s;
            auto r = run_suite(c);
            return finish(r, Output{c.output, c.format, c.timing});
        };

        for (auto* s : suite_subs)
            if (s->parsed()) {
                std::vector<std::string> names = s == suite ? suite_names : std::vector<std::string>{s->get_name()};
                return run_suites(s, names, suite_out);
            }
        if (bl_suite->parsed()) return run_suites(bl_suite, {"bl"}, suite_out);

        if (gd->parsed()) {
            if (is_json_path(gd_config)) {
                const Json j = read_json_file(gd_config);
                if (!j.contains("config")) throw UsageError("options file must name a configuration under \"config\"");
                gd_config = j.at("config").get<std::string>();
                apply_overrides(app, *gd, j, "config");
            }
            if (gd_w.empty() || gd_wp.empty()) throw UsageError("--w and --wprime are required");
            const auto cfg = build_config(gd_config);
            const auto dec = weight_decompose(cfg);
            const auto w = parse_subspace_spec(gd_w, dec), wp = parse_subspace_spec(gd_wp, dec);
            const Json config{{"config", gd_config}, {"w", gd_w},         {"wprime", gd_wp},          {"trials", gd_trials},
                              {"seed", gd_seed},     {"complexity", gd_complexity}, {"projection", gd_projection}};
            std::vector<ReportItem> items;
            const std::string label = gd_config + " W=" + gd_w + " W'=" + gd_wp;
            detail::run_item(items, "generic_dim", gd_projection ? "projection_bound" : "intersection_bound", label,
                             [&](ReportItem& it) {
                                 SamplingOptions opt;
                                 opt.complexity = gd_complexity;
                                 opt.jobs = jobs;
                                 VerifiedConfig vc(cfg);
                                 auto r = gd_projection ? check_projection_bound(vc, w, wp, gd_trials, gd_seed, opt)
                                                        : check_intersection_bound(vc, w, wp, gd_trials, gd_seed, opt);
                                 it.details = trial_report_to_json(r);
                                 it.details["dim_w"] = w.dim();
                                 it.details["dim_wprime"] = wp.dim();
                                 it.details["n"] = cfg.n;
                                 const std::size_t kk = w.dim() * wp.dim();
                                 for (auto d : r.per_trial_dims)
                                     it.trials.push_back(Json{{gd_projection ? "rank" : "dim", d},
                                                              {"pass", gd_projection ? d * cfg.n >= kk : d * cfg.n <= kk}});
                                 it.verdict = r.all_passed() ? Verdict::pass : Verdict::fail;
                                 it.note = std::to_string(r.passes) + "/" + std::to_string(r.trials) + " within bound";
                             });
            if (items[0].verdict == Verdict::error) throw UsageError(items[0].note);
            return finish(single("genericdim", config, std::move(items)), gd_out);
        }

        if (bl_check->parsed() || bl_est->parsed()) {
            CLI::App* s = bl_check->parsed() ? bl_check : bl_est;
            if (!bl_opts.empty()) apply_overrides(app, *s, read_json_file(bl_opts), "");
            const BLDatum d = datum_from_json(read_json_file(bl_datum));
            if (!bl_expect.empty() && bl_expect != "feasible" && bl_expect != "infeasible")
                throw UsageError("--expect must be feasible or infeasible");
            std::vector<ReportItem> items;
            Json config{{"datum", bl_datum}, {"seed", bl_seed}};
            auto it = make_item("bl_toolkit", bl_check->parsed() ? "check" : "estimate", bl_datum);
            bool feasible = false;
            if (bl_check->parsed()) {
                FeasibilityMode mode;
                if (bl_mode == "lattice")
                    mode = FeasibilityMode::lattice;
                else if (bl_mode == "lattice_plus_random")
                    mode = FeasibilityMode::lattice_plus_random;
                else if (bl_mode == "coordinate_exhaustive")
                    mode = FeasibilityMode::coordinate_exhaustive;
                else
                    throw UsageError("unknown feasibility mode '" + bl_mode + "'");
                config["mode"] = bl_mode;
                config["random"] = bl_random;
                auto c = check_feasibility(d, mode, mode == FeasibilityMode::lattice_plus_random ? bl_random : 0, bl_seed);
                feasible = c.feasible();
                it.details = certificate_to_json(c);
                it.note = c.feasible() ? "feasible (" + to_string(c.status) + ")" : "infeasible";
            } else {
                BLEstimateOptions opt;
                opt.restarts = bl_restarts;
                opt.jobs = jobs;
                config["budget"] = bl_budget;
                config["restarts"] = bl_restarts;
                auto e = estimate_bl_constant(d, bl_budget, bl_seed, opt);
                feasible = !e.bl_infinite;
                it.details = estimate_to_json(e);
                it.note = e.bl_infinite ? "bl_infinite"
                                        : "BL >= " + detail::fmt_double(std::max(e.lower_bound_variational, e.lower_bound_gaussian));
            }
            if (!bl_expect.empty()) {
                config["expect"] = bl_expect;
                it.verdict = feasible == (bl_expect == "feasible") ? Verdict::pass : Verdict::fail;
            }
            items.push_back(std::move(it));
            return finish(single("bl", config, std::move(items)), bl_out);
        }

        if (pe->parsed()) {
            if (is_json_path(pe_config)) {
                const Json j = read_json_file(pe_config);
                if (!j.contains("config")) throw UsageError("options file must name a configuration under \"config\"");
                pe_config = j.at("config").get<std::string>();
                apply_overrides(app, *pe, j, "config");
            }
            if (pe_fractal.empty()) throw UsageError("--fractal is required");
            const auto cfg = build_config(pe_config);
            const auto fseed = pe_fractal_seed >= 0 ? static_cast<std::uint64_t>(pe_fractal_seed) : pe_seed;
            const auto a = generate_fractal(pe_fractal, fseed);
            ProjectionParams pp;
            pp.mu = parse_rat(pe_mu);
            pp.s = pe_delta;
            pp.epsilon = pe_eps;
            pp.num_u = pe_num_u;
            pp.seed = pe_seed;
            pp.mode = parse_projection_mode(pe_mode);
            pp.jobs = jobs;
            if (pe_alpha >= 0) pp.alpha = pe_alpha;
            Json config{{"config", pe_config}, {"fractal", pe_fractal}, {"fractal_seed", fseed}, {"mu", pe_mu},
                        {"delta_bits", pe_delta}, {"epsilon", pe_eps},   {"num_u", pe_num_u},    {"seed", pe_seed},
                        {"mode", pe_mode}};
            std::vector<ReportItem> items;
            if (pp.mode == ProjectionMode::subcritical) {
                if (pe_m > 0) {
                    pp.m_exponent = pe_m;
                } else {
                    ProjectionParams pilot = pp;
                    pilot.num_u = pe_pilot_u;
                    pilot.seed = pe_pilot_seed >= 0 ? static_cast<std::uint64_t>(pe_pilot_seed) : derive_seed(pe_seed, 0x9111);
                    auto pr = projection_experiment(cfg, a, pilot);
                    pp.m_exponent = fit_m_exponent(pr, cfg.n, pp.s, pp.epsilon);
                    auto it = make_item("discretized_geometry", "projection_pilot", pe_config);
                    it.details = exceptional_report_to_json(pr, false);
                    it.details["fitted_m"] = pp.m_exponent;
                    it.details["pilot_seed"] = pilot.seed;
                    it.note = "M = " + detail::fmt_double(pp.m_exponent);
                    items.push_back(std::move(it));
                    config["pilot_u"] = pe_pilot_u;
                    config["pilot_seed"] = pilot.seed;
                }
                config["m_exponent"] = pp.m_exponent;
            }
            auto r = projection_experiment(cfg, a, pp);
            auto it = make_item("discretized_geometry", "projection_" + pe_mode, pe_config);
            it.details = exceptional_report_to_json(r, false);
            for (const auto& t : r.per_u) it.trials.push_back(Json{{"u", t.t}, {"covering", t.covering}, {"exceptional", t.exceptional}});
            it.verdict = r.passed() ? Verdict::pass : Verdict::fail;
            it.note = "exceptional fraction " + detail::fmt_double(r.exceptional_fraction) + " <= " + detail::fmt_double(r.threshold);
            items.push_back(std::move(it));
            return finish(single("proj-exp", config, std::move(items)), pe_out);
        }

        if (op->parsed()) {
            if (op_form.empty() && (suite_config_path.empty() || !read_json_file(suite_config_path).contains("form")))
                return run_suites(op, {"oppenheim"}, op_out);
            if (!suite_config_path.empty()) apply_overrides(app, *op, read_json_file(suite_config_path), "");
            const auto q = parse_form(op_form);
            Json config{{"form", op_form}, {"s", op_s}};
            auto it = make_item("oppenheim_search", op_decay.empty() ? "search" : "decay", op_form);
            if (op_decay.empty()) {
                config["T"] = op_t;
                auto r = search_min_value(q, op_s, op_t, jobs);
                it.details = search_result_to_json(r, q.sqrt_d);
                it.verdict = r.found() ? Verdict::pass : Verdict::fail;
                it.note = r.exact_hit ? "exact hit" : "minimum " + detail::fmt_double(r.best_value);
            } else {
                const auto ts = parse_long_list(op_decay);
                config["t_list"] = ts;
                auto c = decay_curve(q, op_s, ts, jobs);
                it.details = decay_curve_to_json(c, q.sqrt_d);
                for (const auto& row : c.rows)
                    it.trials.push_back(Json{{"T", row.t}, {"best_value", row.running.best_value},
                                             {"exact_hit", row.running.exact_hit}, {"improved", row.improved}});
                it.note = "kappa " + it.details.at("kappa").dump();
            }
            return finish(single("oppenheim", config, {std::move(it)}), op_out);
        }
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
