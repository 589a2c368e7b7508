#pragma once

#include <equilab/exact/json.hpp>
#include <equilab/seed.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace equilab {

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kToolVersion = "0.1.0";

enum class Verdict { pass, fail, error };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::error: return "error";
    }
    return "error";
}

inline Verdict parse_verdict(const std::string& s) {
    if (s == "pass") return Verdict::pass;
    if (s == "fail") return Verdict::fail;
    if (s == "error") return Verdict::error;
    throw std::invalid_argument("unknown verdict '" + s + "'");
}

/// One checked operation. `trials` holds flat per-trial rows for CSV export;
/// `details` is free-form and carries recipes of failing trials.
struct ReportItem {
    std::string module;
    std::string op;
    std::string label;
    Verdict verdict = Verdict::pass;
    std::string note;
    Json details = Json::object();
    std::vector<Json> trials;
};

inline ReportItem make_item(std::string module, std::string op, std::string label) {
    ReportItem it;
    it.module = std::move(module);
    it.op = std::move(op);
    it.label = std::move(label);
    return it;
}

struct ReportSummary {
    std::size_t items = 0;
    std::size_t passed = 0;
    std::size_t failed = 0;
    std::size_t errors = 0;
};

struct ExperimentReport {
    std::vector<std::string> suites;
    Json config = Json::object();  // the result-relevant part of the SuiteConfig
    std::vector<ReportItem> items;
    double wall_clock_seconds = 0;

    [[nodiscard]] ReportSummary summary() const {
        ReportSummary s;
        for (const auto& it : items) {
            ++s.items;
            if (it.verdict == Verdict::pass) ++s.passed;
            if (it.verdict == Verdict::fail) ++s.failed;
            if (it.verdict == Verdict::error) ++s.errors;
        }
        return s;
    }

    [[nodiscard]] bool all_passed() const {
        auto s = summary();
        return s.passed == s.items;
    }
};

inline std::string hex64(std::uint64_t x) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

inline std::string config_hash(const Json& config) { return hex64(stable_hash(config.dump())); }

inline Json item_to_json(const ReportItem& it) {
    Json trials = Json::array();
    for (const auto& t : it.trials) trials.push_back(t);
    return Json{{"module", it.module}, {"op", it.op},        {"label", it.label},     {"verdict", to_string(it.verdict)},
                {"note", it.note},     {"details", it.details}, {"trials", std::move(trials)}};
}

/// Wall-clock time is left out unless asked for, so that equal configurations
/// give byte-identical documents.
inline Json report_to_json(const ExperimentReport& r, bool include_timing = false) {
    const auto s = r.summary();
    Json items = Json::array();
    for (const auto& it : r.items) items.push_back(item_to_json(it));
    Json j{{"tool", "equilab"},
           {"version", kToolVersion},
           {"suites", r.suites},
           {"config", r.config},
           {"config_hash", config_hash(r.config)},
           {"summary", Json{{"items", s.items}, {"passed", s.passed}, {"failed", s.failed}, {"errors", s.errors}}},
           {"items", std::move(items)}};
    if (include_timing) j["wall_clock_seconds"] = r.wall_clock_seconds;
    return j;
}

inline ExperimentReport report_from_json(const Json& j) {
    ExperimentReport r;
    r.suites = j.at("suites").get<std::vector<std::string>>();
    r.config = j.at("config");
    if (j.contains("wall_clock_seconds")) r.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
    for (const auto& ji : j.at("items")) {
        ReportItem it;
        it.module = ji.at("module").get<std::string>();
        it.op = ji.at("op").get<std::string>();
        it.label = ji.at("label").get<std::string>();
        it.verdict = parse_verdict(ji.at("verdict").get<std::string>());
        it.note = ji.value("note", "");
        it.details = ji.at("details");
        for (const auto& t : ji.at("trials")) it.trials.push_back(t);
        r.items.push_back(std::move(it));
    }
    return r;
}

/// Hash of the deterministic JSON document.
inline std::string report_hash(const ExperimentReport& r) { return hex64(stable_hash(report_to_json(r).dump())); }

enum class ReportFormat { json, csv, markdown };

inline ReportFormat parse_report_format(const std::string& s) {
    if (s == "json") return ReportFormat::json;
    if (s == "csv") return ReportFormat::csv;
    if (s == "markdown" || s == "md") return ReportFormat::markdown;
    throw UsageError("unknown report format '" + s + "' (json, csv, markdown)");
}

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string csv_value(const Json& v) {
    if (v.is_string()) return csv_field(v.get<std::string>());
    if (v.is_null()) return "";
    return csv_field(v.dump());
}

inline std::string md_cell(std::string s) {
    std::string out;
    for (char c : s) {
        if (c == '|') out += '\\';
        out += c == '\n' ? ' ' : c;
    }
    return out;
}

}  // namespace detail

/// One row per trial over all items. Columns: the item key, the trial index,
/// then every trial field in first-seen order.
inline std::string report_to_csv(const ExperimentReport& r) {
    std::vector<std::string> keys;
    for (const auto& it : r.items)
        for (const auto& row : it.trials)
            for (const auto& [k, v] : row.items())
                if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    std::ostringstream out;
    out << "module,op,label,verdict,trial";
    for (const auto& k : keys) out << ',' << detail::csv_field(k);
    out << '\n';
    for (const auto& it : r.items)
        for (std::size_t t = 0; t < it.trials.size(); ++t) {
            out << detail::csv_field(it.module) << ',' << detail::csv_field(it.op) << ',' << detail::csv_field(it.label)
                << ',' << to_string(it.verdict) << ',' << t;
            for (const auto& k : keys) {
                out << ',';
                if (it.trials[t].contains(k)) out << detail::csv_value(it.trials[t].at(k));
            }
            out << '\n';
        }
    return out.str();
}

inline std::string report_to_markdown(const ExperimentReport& r) {
    const auto s = r.summary();
    std::ostringstream out;
    std::string names;
    for (const auto& n : r.suites) names += (names.empty() ? "" : ", ") + n;
    out << "# equilab report: " << names << "\n\n";
    out << "| module | op | label | verdict | note |\n|---|---|---|---|---|\n";
    for (const auto& it : r.items)
        out << "| " << detail::md_cell(it.module) << " | " << detail::md_cell(it.op) << " | " << detail::md_cell(it.label)
            << " | " << to_string(it.verdict) << " | " << detail::md_cell(it.note) << " |\n";
    out << "\n" << s.items << " items: " << s.passed << " passed, " << s.failed << " failed, " << s.errors
        << " errors. Config hash " << config_hash(r.config) << ".\n";
    return out.str();
}

inline std::string emit_report(const ExperimentReport& r, ReportFormat f, bool include_timing = false) {
    switch (f) {
        case ReportFormat::json: return report_to_json(r, include_timing).dump(2) + "\n";
        case ReportFormat::csv: return report_to_csv(r);
        case ReportFormat::markdown: return report_to_markdown(r);
    }
    return {};
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << text;
    f.flush();
    if (!f) throw IoError("write to '" + path + "' failed");
}

inline void write_report(const ExperimentReport& r, ReportFormat f, const std::string& path, bool include_timing = false) {
    write_text(path, emit_report(r, f, include_timing));
}

}  // namespace equilab
