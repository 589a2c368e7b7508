#include <equilab/harness/suites.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

using namespace equilab;

namespace {

/// Every suite at a size that runs in a few seconds.
SuiteConfig small_all(std::uint64_t seed = 5) {
    SuiteConfig c;
    c.suites = {"all"};
    c.master_seed = seed;
    c.params = Json{
        {"hypotheses", {{"configs", {"sl2_sym:2", "so_pq:2,1"}}}},
        {"generic-dim",
         {{"configs", {"sl2_sym:2"}},
          {"trials", 5},
          {"projection_trials", 3},
          {"spanning_trials", 3},
          {"submodularity_triples", 20},
          {"duality_instances", 20}}},
        {"bl", {{"budget", 200}, {"restarts", 2}, {"random_checks", 5}}},
        {"discretized",
         {{"frostman_sets", 2},
          {"projection_fractal", "weight_aligned:1,1,0.5,0,0@4"},
          {"delta_bits", 6},
          {"num_u", 5},
          {"pilot_u", 5},
          {"control_fractal", "full_grid:5,2"},
          {"remez_polys", 3},
          {"remez_samples", 10000}}},
        {"oppenheim", {{"t_list", {5, 10, 20}}, {"control_t", 5}, {"max_final", 1.0}}}};
    return c;
}

/// Minimal RFC 4180 reader for the CSV oracle.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            row.push_back(field);
            field.clear();
        } else if (c == '\n') {
            row.push_back(field);
            rows.push_back(row);
            row.clear();
            field.clear();
        } else {
            field += c;
        }
    }
    return rows;
}

}  // namespace

TEST(SuiteConfig, ExpandAndValidate) {
    EXPECT_EQ(expand_suites({"all"}), known_suites());
    EXPECT_EQ(expand_suites({"bl", "all", "bl"}),
              (std::vector<std::string>{"bl", "hypotheses", "generic-dim", "discretized", "oppenheim"}));
    EXPECT_THROW(expand_suites({}), UsageError);
    EXPECT_THROW(expand_suites({"nope"}), UsageError);

    SuiteConfig c;
    c.suites = {"bl"};
    EXPECT_NO_THROW(validate_suite_config(c));
    c.params = Json{{"bl", {{"budjet", 5}}}};
    EXPECT_THROW(validate_suite_config(c), UsageError);
    c.params = Json{{"bl", {{"budget", "many"}}}};
    EXPECT_THROW(validate_suite_config(c), UsageError);
    c.params = Json{{"nope", Json::object()}};
    EXPECT_THROW(validate_suite_config(c), UsageError);
    c.params = Json::object();
    c.jobs = 0;
    EXPECT_THROW(validate_suite_config(c), UsageError);
    c.jobs = 1;
    c.format = "xml";
    EXPECT_THROW(validate_suite_config(c), UsageError);
}

TEST(SuiteConfig, JsonRoundTripAndErrors) {
    auto c = small_all(17);
    c.format = "csv";
    auto back = suite_config_from_json(suite_config_to_json(c));
    EXPECT_EQ(suite_config_to_json(back), suite_config_to_json(c));
    EXPECT_EQ(suite_config_from_json(Json{{"suite", "bl"}}).suites, std::vector<std::string>{"bl"});
    EXPECT_THROW(suite_config_from_json(Json{{"colour", "red"}}), UsageError);
    EXPECT_THROW(suite_config_from_json(Json{{"master_seed", "x"}}), UsageError);
    EXPECT_THROW(suite_config_from_json(Json::array()), UsageError);
}

TEST(RunSuite, HypothesesOverBuiltInConfigs) {
    SuiteConfig c;
    c.suites = {"hypotheses"};
    auto r = run_suite(c);
    ASSERT_EQ(r.items.size(), acceptance_configs().size());
    for (const auto& it : r.items) {
        EXPECT_EQ(it.verdict, Verdict::pass) << it.label;
        EXPECT_EQ(it.details.at("irreducible"), "absolutely_irreducible");
        EXPECT_TRUE(it.details.at("proximal").get<bool>());
    }
}

TEST(RunSuite, PreconditionFailuresAreRecordedPerItem) {
    SuiteConfig c;
    c.suites = {"hypotheses"};
    c.params = Json{{"hypotheses", {{"configs", {"sl2_sym:2", "bogus:3", "so_pq:2,1"}}}}};
    auto r = run_suite(c);
    ASSERT_EQ(r.items.size(), 3u);
    EXPECT_EQ(r.items[0].verdict, Verdict::pass);
    EXPECT_EQ(r.items[1].verdict, Verdict::error);
    EXPECT_FALSE(r.items[1].note.empty());
    EXPECT_EQ(r.items[2].verdict, Verdict::pass);
    EXPECT_EQ(r.summary().errors, 1u);
    EXPECT_FALSE(r.all_passed());
}

TEST(RunSuite, WrongProximalityExpectationFails) {
    SuiteConfig c;
    c.suites = {"hypotheses"};
    c.params = Json{{"hypotheses", {{"configs", {"sl2_sym:2"}}, {"expect_proximal", {{"sl2_sym:2", false}}}}}};
    auto r = run_suite(c);
    EXPECT_EQ(r.items.at(0).verdict, Verdict::fail);
}

TEST(RunSuite, AllIsDeterministicAndJobIndependent) {
    auto c = small_all();
    auto a = run_suite(c);
    auto b = run_suite(c);
    c.jobs = 3;
    auto p = run_suite(c);
    EXPECT_EQ(report_hash(a), report_hash(b));
    EXPECT_EQ(report_hash(a), report_hash(p));
    EXPECT_EQ(emit_report(a, ReportFormat::json), emit_report(b, ReportFormat::json));
    EXPECT_EQ(a.summary().items, a.items.size());

    c.master_seed = 6;
    EXPECT_NE(report_hash(run_suite(c)), report_hash(a));
}

TEST(RunSuite, SuitesComposeWithIndependentSeeds) {
    auto all = run_suite(small_all());
    auto only = small_all();
    only.suites = {"oppenheim", "generic-dim"};
    auto part = run_suite(only);
    // the generic-dim and oppenheim items of `all` are reproduced alone
    std::vector<std::string> from_all, from_part;
    for (const auto& it : all.items)
        if (it.module == "generic_dim" || it.module == "oppenheim_search") from_all.push_back(item_to_json(it).dump());
    for (const auto& it : part.items) from_part.push_back(item_to_json(it).dump());
    std::sort(from_all.begin(), from_all.end());
    std::sort(from_part.begin(), from_part.end());
    EXPECT_EQ(from_all, from_part);
}

TEST(RunSuite, FailingTrialsCarryRecipes) {
    // a single u+ factor preserves every flag, so h.W = W and the bound breaks
    SuiteConfig c;
    c.suites = {"generic-dim"};
    c.params = Json{{"generic-dim",
                     {{"configs", {"sl2_sym:2"}},
                      {"trials", 4},
                      {"projection_trials", 0},
                      {"spanning_trials", 0},
                      {"complexity", 1},
                      {"submodularity_triples", 0},
                      {"duality_instances", 0}}}};
    auto r = run_suite(c);
    bool saw = false;
    for (const auto& it : r.items) {
        if (it.op != "intersection_bound" || it.label != "sl2_sym:2 W=flag:0 W'=flag:0") continue;
        saw = true;
        EXPECT_EQ(it.verdict, Verdict::fail);
        const auto& fails = it.details.at("failures");
        ASSERT_EQ(fails.size(), 4u);
        for (const auto& f : fails) {
            ASSERT_EQ(f.at("recipe").size(), 1u);
            // replaying the recipe reproduces the failing dimension
            const auto cfg = build_config("sl2_sym:2");
            std::vector<RecipeStep> steps{{f.at("recipe")[0].at("generator").get<std::size_t>(),
                                           parse_rat(f.at("recipe")[0].at("t").get<std::string>())}};
            const auto dec = weight_decompose(cfg);
            const auto w = flag_subspace(dec, Rat(0));
            EXPECT_EQ(subspace_intersect(apply(replay_recipe(cfg, steps), w), w).dim(), 2u);
        }
    }
    EXPECT_TRUE(saw);
}

TEST(Report, SummaryMatchesVerdicts) {
    std::mt19937_64 rng(3);
    for (int round = 0; round < 20; ++round) {
        ExperimentReport r;
        std::size_t counts[3] = {0, 0, 0};
        const int n = static_cast<int>(rng() % 30);
        for (int i = 0; i < n; ++i) {
            auto it = make_item("m", "op", std::to_string(i));
            const auto v = rng() % 3;
            it.verdict = static_cast<Verdict>(v);
            ++counts[v];
            r.items.push_back(it);
        }
        const auto s = r.summary();
        EXPECT_EQ(s.items, static_cast<std::size_t>(n));
        EXPECT_EQ(s.passed, counts[0]);
        EXPECT_EQ(s.failed, counts[1]);
        EXPECT_EQ(s.errors, counts[2]);
        EXPECT_EQ(s.passed + s.failed + s.errors, s.items);
        EXPECT_EQ(r.all_passed(), counts[1] + counts[2] == 0);
    }
}

TEST(Report, JsonRoundTrip) {
    auto r = run_suite(small_all());
    r.wall_clock_seconds = 1.25;
    for (bool timing : {false, true}) {
        const Json j = report_to_json(r, timing);
        EXPECT_EQ(report_to_json(report_from_json(Json::parse(j.dump())), timing), j);
    }
    EXPECT_FALSE(report_to_json(r).contains("wall_clock_seconds"));
    EXPECT_EQ(report_to_json(r, true).at("wall_clock_seconds"), 1.25);
}

TEST(Report, EmptyReportGivesValidEmptyTables) {
    ExperimentReport r;
    r.suites = {"bl"};
    r.items.push_back(make_item("bl_toolkit", "check", "no trials"));
    const auto csv = parse_csv(emit_report(r, ReportFormat::csv));
    ASSERT_EQ(csv.size(), 1u);
    EXPECT_EQ(csv[0], (std::vector<std::string>{"module", "op", "label", "verdict", "trial"}));
    const auto md = emit_report(r, ReportFormat::markdown);
    EXPECT_NE(md.find("| module | op | label | verdict | note |"), std::string::npos);
    EXPECT_NE(md.find("1 items: 1 passed, 0 failed, 0 errors"), std::string::npos);

    ExperimentReport none;
    none.suites = {"hypotheses"};
    EXPECT_EQ(parse_csv(emit_report(none, ReportFormat::csv)).size(), 1u);
    EXPECT_NE(emit_report(none, ReportFormat::markdown).find("0 items"), std::string::npos);
    EXPECT_EQ(report_from_json(report_to_json(none)).items.size(), 0u);
}

TEST(Report, GenericDimCsvHasOneRowPerTrial) {
    SuiteConfig c;
    c.suites = {"generic-dim"};
    c.params = Json{{"generic-dim",
                     {{"configs", {"so_pq:2,1"}},
                      {"trials", 7},
                      {"projection_trials", 0},
                      {"spanning_trials", 0},
                      {"submodularity_triples", 0},
                      {"duality_instances", 0}}}};
    auto r = run_suite(c);
    std::size_t trials = 0;
    for (const auto& it : r.items) trials += it.trials.size();
    EXPECT_EQ(trials, 16u * 7u);  // four flags, all ordered pairs
    const auto rows = parse_csv(emit_report(r, ReportFormat::csv));
    EXPECT_EQ(rows.size(), trials + 1);
    for (const auto& row : rows) EXPECT_EQ(row.size(), rows[0].size());
}

TEST(Report, CsvAndMarkdownEscaping) {
    ExperimentReport r;
    r.suites = {"x"};
    auto it = make_item("mod", "op", "a,b \"quoted\"");
    it.note = "pipe | here";
    it.trials.push_back(Json{{"v", "x,y"}, {"arr", {1, 2}}});
    it.trials.push_back(Json{{"w", 3}});
    r.items.push_back(it);
    const auto rows = parse_csv(emit_report(r, ReportFormat::csv));
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"module", "op", "label", "verdict", "trial", "v", "arr", "w"}));
    EXPECT_EQ(rows[1], (std::vector<std::string>{"mod", "op", "a,b \"quoted\"", "pass", "0", "x,y", "[1,2]", ""}));
    EXPECT_EQ(rows[2], (std::vector<std::string>{"mod", "op", "a,b \"quoted\"", "pass", "1", "", "", "3"}));
    EXPECT_NE(emit_report(r, ReportFormat::markdown).find("pipe \\| here"), std::string::npos);
}

TEST(Report, UnwritablePathIsIoError) {
    ExperimentReport r;
    r.suites = {"bl"};
    EXPECT_THROW(write_report(r, ReportFormat::json, "/nonexistent-dir/report.json"), IoError);
    const auto path = (std::filesystem::temp_directory_path() / "equilab_report_test.md").string();
    write_report(r, ReportFormat::markdown, path);
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    EXPECT_EQ(ss.str(), emit_report(r, ReportFormat::markdown));
    std::filesystem::remove(path);
}

TEST(Report, FormatNames) {
    EXPECT_EQ(parse_report_format("json"), ReportFormat::json);
    EXPECT_EQ(parse_report_format("csv"), ReportFormat::csv);
    EXPECT_EQ(parse_report_format("md"), ReportFormat::markdown);
    EXPECT_THROW(parse_report_format("pdf"), UsageError);
}
