// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <string>
#include <vector>

#include "rwl/cli.hpp"

using namespace rwl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) { return format_double(x); }

std::string failing_rules(const ExperimentReport& r) {
    std::string out;
    for (const auto& rule : rules_for(r.experiment)) {
        if (rule_holds(rule, r)) continue;
        const double* v = r.find(rule.metric);
        out += " " + std::string(rule.metric) + "=" + (v ? fmt(*v) : "missing");
    }
    return out;
}

RunConfig config(const std::string& command, std::uint64_t seed = 42) {
    RunConfig c = cli::default_config(command);
    c.experiment.seed = seed;
    return c;
}

// Leapfrog with the nonlinearity off against the profile evaluation.
Outcome dalembert_exactness() {
    const auto t0 = std::chrono::steady_clock::now();
    const Params params = make_params(7.0, Sign::focusing);
    const RadialGrid grid(16.0, 4096);
    SplitMix64 rng(2024);
    SampledFunction w0(grid), w1(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.node(i) < 5.0) {
            w0[i] = rng.uniform(-1.0, 1.0);
            w1[i] = rng.uniform(-1.0, 1.0);
        }
    }
    const RadialState data(params, grid, w0, w1);
    SolverConfig sc;
    sc.t_end = 10.0;
    sc.nonlinear = false;
    sc.record_stride = 16;
    const Trajectory traj = evolve(data, sc);
    const FreeWaveProfile profile = build_free_profile(data, grid.r_max() + sc.t_end);
    double worst = 0.0, worst_r = 0.0, worst_v = 0.0;
    for (const auto& s : traj.states) {
        const RadialState e = eval_linear(profile, params, s.time, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double d = std::fabs(s.w[i] - e.w[i]);
            if (d > worst) worst = d, worst_r = grid.node(i);
            worst_v = std::max(worst_v, grid.node(i) * d);
        }
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-12 && secs <= 2.0 && traj.states.size() == 161,
            "max|w - w_lin| = " + fmt(worst) + " at r = " + fmt(worst_r) + ", max|v - v_lin| = " + fmt(worst_v) +
                ", " + fmt(secs) + " s"};
}

Outcome report_outcome(const ExperimentReport& r, const std::string& extra = {}) {
    std::string detail = r.name + (r.pass ? " pass" : " fail:" + failing_rules(r));
    if (!extra.empty()) detail += ", " + extra;
    return {r.pass, detail};
}

Outcome conservation() {
    std::string detail;
    bool pass = true;
    for (double p : {7.0, 9.0}) {
        RunConfig c = config("conservation");
        c.p = p;
        const ExperimentReport r = run_conservation(c);
        pass = pass && r.pass;
        detail += r.name + " drift=" + fmt(r.get("surrogate_drift")) + " ratio in [" + fmt(r.get("ratio_min")) + ", " +
                  fmt(r.get("ratio_max")) + "]" + (r.pass ? "" : failing_rules(r)) + "; ";
    }
    return {pass, detail};
}

Outcome channel() {
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentReport r = run_channel(config("channel"));
    const double secs = seconds_since(t0);
    const bool ok = r.pass && r.get("trials") == 100.0 && r.get("R") == 0.5 && secs <= 30.0;
    return {ok, "failures=" + fmt(r.get("failures")) + " grid_failures=" + fmt(r.get("grid_failures")) +
                    " worst_margin=" + fmt(r.get("worst_margin")) + ", " + fmt(secs) + " s"};
}

Outcome hardy() {
    const ExperimentReport r = run_hardy(config("hardy"));
    const bool ok = r.pass && r.series.front().rows.size() == 50;
    return {ok, report_outcome(r, "utov_m2_mismatch=" + fmt(r.get("utov_m2_mismatch"))).detail};
}

Outcome stationary() {
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentReport r = run_stationary_suite(config("stationary"));
    const double secs = seconds_since(t0);
    return {r.pass && secs <= 5.0,
            report_outcome(r, "R1=" + fmt(r.get("R1")) + ", " + fmt(secs) + " s").detail};
}

Outcome finite_speed(const std::vector<ExperimentReport>& nonlinear_runs) {
    double worst = 0.0;
    std::string detail;
    for (const auto& r : nonlinear_runs) {
        const double e = r.get("finite_speed_error");
        worst = std::max(worst, e);
        detail += r.name + "=" + fmt(e) + " ";
    }
    // Direct check on a focusing and a defocusing run.
    for (Sign iota : {Sign::focusing, Sign::defocusing}) {
        const Params params = make_params(7.0, iota);
        const RadialGrid grid(16.0, 1600);
        DataSpec spec;
        spec.amplitude = 0.9;
        const RadialState data = make_data(spec, params, grid);
        RadialState modified = data;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double r = grid.node(i);
            modified.w[i] += 0.3 * bump(r / 1.5);
            modified.wt[i] -= 0.2 * bump(r / 1.5);
        }
        SolverConfig sc;
        sc.t_end = 8.0;
        sc.record_stride = 4;
        const double e = check_finite_speed(data, modified, 1.5, sc);
        worst = std::max(worst, e);
        detail += std::string(iota == Sign::focusing ? "focusing" : "defocusing") + "=" + fmt(e) + " ";
    }
    return {worst <= 1e-10, detail};
}

Outcome small_data(ExperimentReport& out) {
    const auto t0 = std::chrono::steady_clock::now();
    out = run_smalldata_rate(config("smalldata"));
    const double secs = seconds_since(t0);
    return {out.pass && secs <= 60.0,
            report_outcome(out, "slope=" + fmt(out.get("fitted_slope")) + " floor=" + fmt(out.get("slope_floor")) + ", " +
                                    fmt(secs) + " s")
                .detail};
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        files[fs::relative(entry.path(), dir).string()] =
            std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    return files;
}

Outcome determinism(const fs::path& root) {
    const fs::path a = root / "run_a", b = root / "run_b";
    fs::remove_all(a);
    fs::remove_all(b);
    auto run = [](const fs::path& dir, const char* threads) {
        const std::string out = dir.string();
        const char* argv[] = {"rwl", "all", "--seed", "42", "--quiet", "--threads", threads, "--out", out.c_str()};
        std::ostringstream sink_out, sink_err;
        return cli::dispatch(9, argv, sink_out, sink_err);
    };
    const int ca = run(a, "1");
    const int cb = run(b, "4");
    const auto ta = read_tree(a), tb = read_tree(b);
    const bool same = !ta.empty() && ta == tb;
    return {same && ca == cb, std::to_string(ta.size()) + " files, " + (same ? "identical" : "differ") +
                                  ", exit codes " + std::to_string(ca) + "/" + std::to_string(cb)};
}

} // namespace

int main(int argc, char** argv) {
    const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "rwl-acceptance";
    fs::create_directories(root);
    int failures = 0;
    auto check = [&](const std::string& name, const std::function<Outcome()>& fn) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    };

    std::vector<ExperimentReport> nonlinear_runs;
    check("dalembert exactness", dalembert_exactness);
    check("generalized energy conservation (p = 7, 9)", conservation);
    check("channel dichotomy (100 trials, R = 0.5)", channel);
    check("hardy and UtoV inequalities (50 functions)", hardy);
    check("stationary solutions (p = 7)", stationary);
    check("ode blow-up oracle (plateau, p = 7)", [&] {
        const ExperimentReport r = run_blowup_ode(config("blowup-ode"));
        nonlinear_runs.push_back(r);
        return report_outcome(r, "trace_error=" + fmt(r.get("trace_error")) +
                                     " t_star_error_steps=" + fmt(r.get("t_star_error_steps")) +
                                     " exponent_relative_error=" + fmt(r.get("exponent_relative_error")));
    });
    check("small-data rate (p = 7)", [&] {
        ExperimentReport r;
        const Outcome o = small_data(r);
        nonlinear_runs.push_back(r);
        return o;
    });
    check("exterior decay (defocusing, p = 7)", [&] {
        const ExperimentReport r = run_exterior_decay(config("exterior-decay"));
        nonlinear_runs.push_back(r);
        return report_outcome(r);
    });
    check("grid finite speed of propagation", [&] { return finite_speed(nonlinear_runs); });
    check("huygens localization", [] {
        const ExperimentReport r = run_huygens(config("huygens"));
        return Outcome{r.pass && r.get("compact_residual") <= 1e-10,
                       report_outcome(r, "compact_residual=" + fmt(r.get("compact_residual"))).detail};
    });
    check("operator bounds and continuity in R", [] {
        const ExperimentReport r = run_operator_bounds(config("operators"));
        return report_outcome(r, "spreads " + fmt(r.get("boundop_spread")) + "/" +
                                     fmt(r.get("boundcharac_exterior_spread")) +
                                     " cont_extremum_final=" + fmt(r.get("cont_extremum_final")));
    });
    check("determinism of `rwl all --seed 42`", [&] { return determinism(root); });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
