#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rwl/model.hpp"

namespace rwl {

inline constexpr std::string_view report_schema_version = "1.0.0";

enum class Op { le, ge, gt, finite };

constexpr std::string_view to_string(Op op) {
    switch (op) {
    case Op::le: return "<=";
    case Op::ge: return ">=";
    case Op::gt: return ">";
    case Op::finite: return "finite";
    }
    return "?";
}

/// One row of the threshold table: metric op (value | metrics[ref]).
struct Rule {
    std::string_view experiment;
    std::string_view metric;
    Op op;
    double value = 0.0;
    std::string_view ref{};
};

/// Static pass criteria, versioned with the repository. A report passes iff
/// every rule of its experiment holds on its metrics.
inline const std::vector<Rule>& threshold_table() {
    static const std::vector<Rule> table = {
        {"conservation", "surrogate_drift", Op::le, 1e-6},
        {"conservation", "ratio_min", Op::ge, 0.0, "ratio_lower"},
        {"conservation", "ratio_max", Op::le, 0.0, "ratio_upper"},

        {"channel", "failures", Op::le, 0.0},
        {"channel", "grid_failures", Op::le, 0.0},
        {"channel", "worst_margin", Op::ge, 0.5},

        {"huygens", "compact_residual", Op::le, 1e-10},
        {"huygens", "huyg1_monotone_violations", Op::le, 0.0},
        {"huygens", "huyg1_residual_at_max_R", Op::le, 1e-3},
        {"huygens", "huyg2_monotone_violations", Op::le, 0.0},
        {"huygens", "huyg2_residual_at_max_R", Op::le, 1e-3},

        {"exterior_decay", "monotone_violations", Op::le, 0.0},
        {"exterior_decay", "decay_ratio_at_max_R", Op::le, 1e-3},
        {"exterior_decay", "finite_speed_error", Op::le, 1e-10},

        {"smalldata", "fitted_slope", Op::ge, 0.0, "slope_floor"},
        {"smalldata", "min_pair_exponent", Op::ge, 2.0},
        {"smalldata", "blowups", Op::le, 0.0},
        {"smalldata", "finite_speed_error", Op::le, 1e-10},

        {"stationary", "R1", Op::gt, 0.0},
        {"stationary", "R1_tolerance_drift", Op::le, 1e-4},
        {"stationary", "last_abs_Z", Op::ge, 1e6},
        {"stationary", "outer_r2dZ_error", Op::le, 1e-4},
        {"stationary", "convexity_violations", Op::le, 0.0},
        {"stationary", "scaling_ratio_defect_max", Op::le, 1e-2},
        {"stationary", "scaling_pointwise_defect_ell2", Op::le, 1e-6},
        {"stationary", "sign_symmetry_defect", Op::le, 1e-10},
        {"stationary", "focusing_blowups", Op::le, 0.0},
        {"stationary", "focusing_r_inner", Op::le, 1.000001e-3},
        {"stationary", "focusing_r2_defect_max", Op::finite},
        {"stationary", "derivative_mass_growth_violations", Op::le, 0.0},

        {"blowup_ode", "trace_error", Op::le, 1e-5},
        {"blowup_ode", "t_star_error_steps", Op::le, 2.0},
        {"blowup_ode", "exponent_relative_error", Op::le, 0.05},
        {"blowup_ode", "c_p_fit_relative_error", Op::le, 0.05},
        {"blowup_ode", "oracle_selfsimilar_error", Op::le, 1e-8},
        {"blowup_ode", "oracle_blowup_time_error", Op::le, 1e-6},
        {"blowup_ode", "finite_speed_error", Op::le, 1e-10},

        {"hardy", "C_position_origin", Op::finite},
        {"hardy", "C_derivative_origin", Op::finite},
        {"hardy", "C_position_infinity", Op::finite},
        {"hardy", "young_bound_ratio", Op::le, 1.0},
        {"hardy", "utov_m2_mismatch", Op::le, 1e-6},
        {"hardy", "utov_K", Op::finite},
        {"hardy", "C_radial_sobolev", Op::finite},

        {"operators", "boundop_spread", Op::le, 0.2},
        {"operators", "boundcharac_interior_spread", Op::le, 0.2},
        {"operators", "boundcharac_exterior_spread", Op::le, 0.2},
        {"operators", "cont_generic_violations", Op::le, 0.0},
        {"operators", "cont_extremum_violations", Op::le, 0.0},
        {"operators", "cont_extremum_final", Op::le, 1e-2},

        {"norms", "nonfinite_count", Op::le, 0.0},

        {"simulate", "unstable", Op::le, 0.0},

        {"linear", "surrogate_drift", Op::le, 1e-6},
    };
    return table;
}

inline std::vector<Rule> rules_for(std::string_view experiment) {
    std::vector<Rule> out;
    for (const auto& rule : threshold_table())
        if (rule.experiment == experiment) out.push_back(rule);
    return out;
}

/// Tabular payload written next to a report as <name>.csv.
struct Series {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add(std::vector<double> row) {
        require(row.size() == columns.size(), ErrorCode::PreconditionViolated, "row width differs from header");
        rows.push_back(std::move(row));
    }
};

struct ExperimentReport {
    std::string experiment;
    std::string name;
    Params params{};
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::string> notes;
    std::vector<Series> series;
    bool pass = false;

    void set(const std::string& key, double value) {
        for (auto& [k, v] : metrics) {
            if (k == key) {
                v = value;
                return;
            }
        }
        metrics.emplace_back(key, value);
    }

    const double* find(std::string_view key) const {
        for (const auto& [k, v] : metrics)
            if (k == key) return &v;
        return nullptr;
    }

    double get(std::string_view key) const {
        const double* v = find(key);
        require(v != nullptr, ErrorCode::PreconditionViolated, "missing metric " + std::string(key));
        return *v;
    }
};

inline bool rule_holds(const Rule& rule, const ExperimentReport& report) {
    const double* value = report.find(rule.metric);
    if (value == nullptr) return false;
    if (rule.op == Op::finite) return std::isfinite(*value);
    double bound = rule.value;
    if (!rule.ref.empty()) {
        const double* ref = report.find(rule.ref);
        if (ref == nullptr) return false;
        bound = *ref;
    }
    switch (rule.op) {
    case Op::le: return *value <= bound;
    case Op::ge: return *value >= bound;
    case Op::gt: return *value > bound;
    case Op::finite: break;
    }
    return false;
}

/// Pass flag as a pure function of the metrics and the threshold table.
inline bool evaluate(const ExperimentReport& report) {
    const auto rules = rules_for(report.experiment);
    return std::all_of(rules.begin(), rules.end(), [&](const Rule& r) { return rule_holds(r, report); });
}

inline ExperimentReport& finalize(ExperimentReport& report) {
    report.pass = evaluate(report);
    return report;
}

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

inline nlohmann::ordered_json json_number(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

inline nlohmann::ordered_json params_json(const Params& params) {
    return {{"p", params.p}, {"iota", static_cast<int>(params.iota)}, {"m", params.m}, {"s_c", params.s_c}};
}

inline nlohmann::ordered_json to_json(const ExperimentReport& report) {
    nlohmann::ordered_json j;
    j["schema_version"] = report_schema_version;
    j["experiment"] = report.experiment;
    j["name"] = report.name;
    j["params"] = params_json(report.params);
    j["config"] = report.config;
    auto rules = nlohmann::ordered_json::array();
    for (const auto& rule : rules_for(report.experiment)) {
        nlohmann::ordered_json r;
        r["metric"] = rule.metric;
        r["op"] = to_string(rule.op);
        if (!rule.ref.empty()) r["ref"] = rule.ref;
        else if (rule.op != Op::finite) r["value"] = rule.value;
        r["holds"] = rule_holds(rule, report);
        rules.push_back(std::move(r));
    }
    j["thresholds"] = std::move(rules);
    auto metrics = nlohmann::ordered_json::object();
    for (const auto& [k, v] : report.metrics) metrics[k] = json_number(v);
    j["metrics"] = std::move(metrics);
    j["pass"] = report.pass;
    auto series = nlohmann::ordered_json::array();
    for (const auto& s : report.series) series.push_back(s.name + ".csv");
    j["series"] = std::move(series);
    j["notes"] = report.notes;
    return j;
}

/// Reads the metrics back from a serialized report (non-finite values are strings).
inline ExperimentReport from_json(const nlohmann::ordered_json& j) {
    ExperimentReport report;
    report.experiment = j.at("experiment").get<std::string>();
    report.name = j.at("name").get<std::string>();
    for (const auto& [k, v] : j.at("metrics").items()) {
        double x = 0.0;
        if (v.is_number()) x = v.get<double>();
        else {
            const auto s = v.get<std::string>();
            x = s == "inf" ? INFINITY : s == "-inf" ? -INFINITY : NAN;
        }
        report.metrics.emplace_back(k, x);
    }
    report.pass = j.at("pass").get<bool>();
    return report;
}

inline std::string csv_string(const Series& series) {
    std::string out;
    for (std::size_t c = 0; c < series.columns.size(); ++c) {
        if (c > 0) out += ',';
        out += series.columns[c];
    }
    out += '\n';
    for (const auto& row : series.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out += ',';
            out += format_double(row[c]);
        }
        out += '\n';
    }
    return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorCode::IoError, "cannot write " + path.string());
    out << text;
    require(static_cast<bool>(out), ErrorCode::IoError, "write failed for " + path.string());
}

inline void write_series(const Series& series, const std::filesystem::path& path) {
    write_text(path, csv_string(series));
}

/// Writes <dir>/<name>.json and one CSV per series.
inline void write_report(const ExperimentReport& report, const std::filesystem::path& dir, bool json = true,
                         bool csv = true) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    require(!ec, ErrorCode::IoError, "cannot create " + dir.string());
    if (json) write_text(dir / (report.name + ".json"), to_json(report).dump(2) + "\n");
    if (csv)
        for (const auto& s : report.series) write_series(s, dir / (s.name + ".csv"));
}

} // namespace rwl
