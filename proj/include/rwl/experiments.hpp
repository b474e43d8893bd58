#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "rwl/config.hpp"
#include "rwl/dalembert.hpp"
#include "rwl/data.hpp"
#include "rwl/energetics.hpp"
#include "rwl/nonlinear.hpp"
#include "rwl/ode.hpp"
#include "rwl/operators.hpp"
#include "rwl/report.hpp"
#include "rwl/stationary.hpp"

namespace rwl {

struct LineFit {
    double slope;
    double intercept;
};

/// Least-squares line through (x, y).
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, ErrorCode::PreconditionViolated, "fit needs two points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    require(sxx > 0.0, ErrorCode::PreconditionViolated, "fit needs distinct abscissae");
    const double slope = sxy / sxx;
    return LineFit{slope, my - slope * mx};
}

/// Number of k with values[k] > values[k - 1].
inline std::size_t increase_count(const std::vector<double>& values) {
    std::size_t count = 0;
    for (std::size_t k = 1; k < values.size(); ++k)
        if (values[k] > values[k - 1]) ++count;
    return count;
}

/// Blow-up time of y'' = |y|^{p-1} y, y(0) = A > 0, y'(0) = 0:
/// sqrt((p+1)/2) A^{(1-p)/2} B(1/2 - 1/(p+1), 1/2) / (p+1).
inline double ode_blowup_time(double p, double A) {
    return std::sqrt(0.5 * (p + 1.0)) * std::pow(A, 0.5 * (1.0 - p)) * std::beta(0.5 - 1.0 / (p + 1.0), 0.5) /
           (p + 1.0);
}

/// c_p with c_p^{p-1} = 2(p+1)/(p-1)^2, the prefactor of c_p (T - t)^{-2/(p-1)}.
inline double selfsimilar_constant(double p) {
    return std::pow(2.0 * (p + 1.0) / ((p - 1.0) * (p - 1.0)), 1.0 / (p - 1.0));
}

namespace detail {

inline std::string p_tag(double p) { return "p" + format_double(p); }

inline ExperimentReport new_report(const std::string& experiment, const std::string& name, const RunConfig& cfg) {
    ExperimentReport report;
    report.experiment = experiment;
    report.name = name;
    report.params = cfg.params();
    report.config = config_json(cfg);
    return report;
}

inline std::uint64_t require_seed(const RunConfig& cfg) {
    require(cfg.experiment.seed.has_value(), ErrorCode::ConfigError,
            "experiment '" + cfg.command + "' is randomized and needs experiment.seed or --seed");
    return *cfg.experiment.seed;
}

inline std::vector<std::uint64_t> trial_seeds(std::uint64_t seed, std::size_t count) {
    SplitMix64 master(seed);
    std::vector<std::uint64_t> out(count);
    for (auto& s : out) s = master.next();
    return out;
}

inline std::vector<double> or_default(const std::vector<double>& xs, std::vector<double> fallback) {
    return xs.empty() ? fallback : xs;
}

inline std::vector<double> integer_times(double t_end) {
    std::vector<double> out;
    for (int k = 0; k <= static_cast<int>(std::floor(t_end + 1e-9)); ++k) out.push_back(k);
    return out;
}

inline SolverConfig solver_config(const RunConfig& cfg) {
    SolverConfig sc;
    sc.dt_ratio = cfg.grid.dt_ratio;
    sc.t_end = cfg.grid.t_end;
    sc.record_stride = cfg.grid.record_stride;
    return sc;
}

/// ||r^{1-2/m} d_r u||^m + ||r^{1-2/m} d_t u||^m over R^3, without the 4 pi.
inline double weighted_gradient_power(const SampledFunction& u, const SampledFunction& ut, double m) {
    const auto& grid = u.grid();
    const SampledFunction du = differentiate(u);
    SampledFunction g(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid.node(i);
        g[i] = abs_power(r * du[i], m) + abs_power(r * ut[i], m);
    }
    return integrate(g, 0.0, grid.r_max());
}

inline std::string column(const std::string& prefix, double x) { return prefix + format_double(x); }

} // namespace detail

/// Almost-conservation of E_m for free waves and exact conservation of the
/// full-line fdot mass.
inline ExperimentReport run_conservation(const RunConfig& cfg) {
    const Params params = cfg.params();
    const RadialGrid grid = cfg.radial_grid();
    const RadialState data = make_data(cfg.data, params, grid);
    const auto times = detail::or_default(cfg.experiment.times, detail::integer_times(10.0));
    double t_max = 0.0;
    for (double t : times) t_max = std::max(t_max, std::fabs(t));
    require(numerical_support(data) + t_max <= grid.r_max() * (1.0 + 1e-12), ErrorCode::CausalClosureViolated,
            "support + max |t| exceeds r_max");

    const double m = params.m;
    const FreeWaveProfile profile = build_free_profile(data, grid.r_max() + t_max);
    const double mass = full_line_mass(profile, m);
    const double e0 = generalized_energy(eval_linear(profile, params, 0.0, grid));

    ExperimentReport report = detail::new_report("conservation", "conservation_" + detail::p_tag(params.p), cfg);
    Series series{report.name, {"t", "E_m", "E_m_ratio", "fdot_mass", "E_m_profile"}, {}};
    double ratio_min = 1.0, ratio_max = 1.0, drift = 0.0, mismatch = 0.0;
    for (double t : times) {
        const RadialState state = eval_linear(profile, params, t, grid);
        const double e = generalized_energy(state);
        const double shifted = shifted_mass(profile, m, t, grid);
        const double via_profile = profile_energy(profile, m, t, grid);
        const double ratio = e0 > 0.0 ? e / e0 : 1.0;
        ratio_min = std::min(ratio_min, ratio);
        ratio_max = std::max(ratio_max, ratio);
        if (mass > 0.0) drift = std::max(drift, std::fabs(shifted - mass) / mass);
        if (e0 > 0.0) mismatch = std::max(mismatch, std::fabs(e - via_profile) / e0);
        series.add({t, e, ratio, shifted, via_profile});
    }
    report.set("E_m0", e0);
    report.set("fdot_mass", mass);
    report.set("ratio_min", ratio_min);
    report.set("ratio_max", ratio_max);
    report.set("ratio_lower", std::pow(2.0, 1.0 - m) / 1.1);
    report.set("ratio_upper", 1.1 * std::pow(2.0, m - 1.0));
    report.set("ratio_spread", ratio_max - ratio_min);
    report.set("surrogate_drift", drift);
    report.set("grid_profile_mismatch", mismatch);
    report.series.push_back(std::move(series));
    if (e0 == 0.0) report.notes.push_back("zero data: ratios defined as 1");
    return finalize(report);
}

/// Exterior channel dichotomy over seeded compactly supported data.
inline ExperimentReport run_channel(const RunConfig& cfg) {
    const Params params = cfg.params();
    const RadialGrid grid = cfg.radial_grid();
    const std::uint64_t seed = detail::require_seed(cfg);
    const double R = cfg.experiment.R.empty() ? 0.5 : cfg.experiment.R.front();
    const double horizon = cfg.experiment.horizon;
    require(R + horizon <= grid.r_max(), ErrorCode::ConeLeftDomain, "R + horizon exceeds r_max");
    std::vector<double> taus = cfg.experiment.times;
    if (taus.empty())
        for (int k = 0; k <= 40; ++k) taus.push_back(horizon * k / 40.0);
    const double m = params.m;

    ExperimentReport report = detail::new_report("channel", "channel_" + detail::p_tag(params.p), cfg);
    Series series{report.name, {"trial", "M_minus", "M_plus", "direction", "min_ratio", "min_grid_ratio"}, {}};
    std::size_t failures = 0, grid_failures = 0, forward = 0, backward = 0, both = 0;
    double worst = std::numeric_limits<double>::infinity();
    double grid_worst = std::numeric_limits<double>::infinity();
    const auto seeds = detail::trial_seeds(seed, cfg.experiment.trials);
    for (std::size_t trial = 0; trial < seeds.size(); ++trial) {
        DataSpec spec = cfg.data;
        spec.family = Family::bump_sum;
        spec.seed = seeds[trial];
        const RadialState data = make_data(spec, params, grid);
        require(numerical_support(data) + horizon <= grid.r_max() * (1.0 + 1e-12), ErrorCode::CausalClosureViolated,
                "support + horizon exceeds r_max");
        const FreeWaveProfile profile = build_free_profile(data, grid.r_max() + horizon);
        const double L = profile.L();
        const double m_minus = profile_mass(profile, m, -L, -R);
        const double m_plus = profile_mass(profile, m, R, L);
        const double e0 = exterior_surrogate(profile, m, R, 0.0);
        std::vector<double> directions;
        if (m_minus >= m_plus) directions.push_back(1.0);
        if (m_minus <= m_plus) directions.push_back(-1.0);
        if (directions.size() == 2) ++both;
        else if (directions.front() > 0) ++forward;
        else ++backward;

        double trial_min = 1.0, trial_grid_min = std::numeric_limits<double>::infinity();
        for (double dir : directions) {
            for (double tau : taus) {
                const double t = dir * tau;
                const double et = exterior_surrogate(profile, m, R, t);
                if (e0 > 0.0) {
                    trial_min = std::min(trial_min, et / e0);
                    if (et < 0.5 * e0) ++failures;
                }
                const double eg = exterior_generalized_energy(eval_linear(profile, params, t, grid), R);
                if (e0 > 0.0) {
                    trial_grid_min = std::min(trial_grid_min, eg / (2.0 * e0));
                    if (eg < (0.5 - 0.05) * 2.0 * e0) ++grid_failures;
                }
            }
        }
        worst = std::min(worst, trial_min);
        grid_worst = std::min(grid_worst, trial_grid_min);
        const double dir_code = directions.size() == 2 ? 0.0 : directions.front();
        series.add({static_cast<double>(trial), m_minus, m_plus, dir_code, trial_min, trial_grid_min});
    }
    report.set("trials", static_cast<double>(seeds.size()));
    report.set("R", R);
    report.set("horizon", horizon);
    report.set("failures", static_cast<double>(failures));
    report.set("grid_failures", static_cast<double>(grid_failures));
    report.set("worst_margin", std::isfinite(worst) ? worst : 1.0);
    report.set("grid_worst_margin", grid_worst);
    report.set("certified_forward", static_cast<double>(forward));
    report.set("certified_backward", static_cast<double>(backward));
    report.set("certified_both", static_cast<double>(both));
    report.series.push_back(std::move(series));
    report.notes.push_back("direction: +1 certifies t >= 0, -1 certifies t <= 0, 0 both");
    report.notes.push_back("grid check: E_{m,R}(t) >= (1/2 - 0.05) * 2 * surrogate(0)");
    return finalize(report);
}

namespace detail {

/// Weighted mass outside the shell a <= r <= b, relative to the total.
inline double outside_fraction(const RadialState& state, double a, double b) {
    const double total = weighted_mass(state, 0.0, state.grid.r_max());
    if (total == 0.0) return 0.0;
    const double outside = weighted_mass(state, 0.0, std::max(a, 0.0)) + weighted_mass(state, b, state.grid.r_max());
    return outside / total;
}

} // namespace detail

/// Concentration of free waves near the light cone.
inline ExperimentReport run_huygens(const RunConfig& cfg) {
    const Params params = cfg.params();
    const RadialGrid grid = cfg.radial_grid();
    const auto times = detail::or_default(cfg.experiment.times, {10.0, 20.0, 30.0, 40.0});
    const auto radii = detail::or_default(cfg.experiment.R, {0.5, 1.0, 2.0, 3.0, 4.0, 5.0});
    const auto lambdas = detail::or_default(cfg.experiment.lambdas, {2.0, 4.0, 8.0, 16.0});
    const auto factors = detail::or_default(cfg.experiment.R_scaled, {1.5, 2.0, 4.0, 8.0, 16.0, 32.0});
    const double tau = 1.0;

    DataSpec spec = cfg.data;
    const RadialState data = make_data(spec, params, grid);
    double t_max = std::max(*std::max_element(times.begin(), times.end()), 20.0);
    t_max = std::max(t_max, tau * *std::max_element(lambdas.begin(), lambdas.end()));
    const double support = numerical_support(data);
    require(support + t_max <= grid.r_max() * (1.0 + 1e-12), ErrorCode::CausalClosureViolated,
            "support + largest time exceeds r_max");
    const FreeWaveProfile profile = build_free_profile(data, grid.r_max() + t_max);

    ExperimentReport report = detail::new_report("huygens", "huygens_" + detail::p_tag(params.p), cfg);

    // Compact check at t = 20 with window half-width support + 2.
    const double window = spec.support + 2.0;
    const RadialState at20 = eval_linear(profile, params, 20.0, grid);
    report.set("compact_residual", detail::outside_fraction(at20, 20.0 - window, 20.0 + window));
    report.set("compact_window", window);

    // Fixed scale, t_n -> infinity: mass outside ||x| - t_n| <= R.
    std::vector<RadialState> states;
    for (double t : times) states.push_back(eval_linear(profile, params, t, grid));
    Series s1{report.name + "_huyg1", {"R", "residual"}, {}};
    std::vector<double> res1;
    for (double R : radii) {
        double sup = 0.0;
        for (std::size_t k = times.size() / 2; k < times.size(); ++k)
            sup = std::max(sup, detail::outside_fraction(states[k], times[k] - R, times[k] + R));
        res1.push_back(sup);
        s1.add({R, sup});
    }
    report.set("huyg1_monotone_violations", static_cast<double>(increase_count(res1)));
    report.set("huyg1_residual_at_max_R", res1.back());

    // t_n = tau lambda_n: mass outside lambda_n / R <= |x| <= R lambda_n.
    std::vector<RadialState> scaled;
    for (double lam : lambdas) scaled.push_back(eval_linear(profile, params, tau * lam, grid));
    Series s2{report.name + "_huyg2", {"R", "residual"}, {}};
    std::vector<double> res2;
    for (double R : factors) {
        double sup = 0.0;
        for (std::size_t k = lambdas.size() / 2; k < lambdas.size(); ++k)
            sup = std::max(sup, detail::outside_fraction(scaled[k], lambdas[k] / R, R * lambdas[k]));
        res2.push_back(sup);
        s2.add({R, sup});
    }
    report.set("huyg2_monotone_violations", static_cast<double>(increase_count(res2)));
    report.set("huyg2_residual_at_max_R", res2.back());

    // Noncompact reference: a unit Gaussian at t = 20, window support + 2.
    {
        DataSpec gauss;
        gauss.family = Family::gaussian;
        const RadialState g = make_data(gauss, params, grid);
        const FreeWaveProfile gp = build_free_profile(g, grid.r_max() + 20.0);
        const double tail = profile_mass(gp, params.m, -gp.L(), -window) + profile_mass(gp, params.m, window, gp.L());
        const RadialState g20 = eval_linear(gp, params, 20.0, grid);
        const double total = weighted_mass(g20, 0.0, grid.r_max());
        report.set("gaussian_residual", detail::outside_fraction(g20, 20.0 - window, 20.0 + window));
        report.set("gaussian_tail_bound",
                   total > 0.0 ? 4.0 * std::numbers::pi * std::pow(2.0, params.m) * tail / total : 0.0);
    }
    report.series.push_back(std::move(s1));
    report.series.push_back(std::move(s2));
    report.notes.push_back("limsup over n proxied by the sup over the second half of the sequence");
    report.notes.push_back("residuals are fractions of the total weighted L^m mass at the same time");
    return finalize(report);
}

/// Decay of the weighted exterior energy for a global nonlinear solution.
inline ExperimentReport run_exterior_decay(const RunConfig& cfg) {
    const Params params = cfg.params();
    const RadialGrid grid = cfg.radial_grid();
    const RadialState data = make_data(cfg.data, params, grid);
    const auto radii = detail::or_default(cfg.experiment.R, {0.5, 1.0, 2.0, 4.0, 8.0});
    const SolverConfig sc = detail::solver_config(cfg);
    const Trajectory traj = evolve(data, sc);
    require(traj.status == TrajectoryStatus::completed, ErrorCode::BlowupEncountered,
            "trajectory did not complete on [0, t_end]");

    ExperimentReport report = detail::new_report("exterior_decay", "exterior_decay_" + detail::p_tag(params.p), cfg);
    std::vector<std::string> columns{"t"};
    for (double R : radii) columns.push_back(detail::column("ext_R", R));
    Series series{report.name, columns, {}};
    std::vector<double> sup(radii.size(), 0.0);
    const double half = 0.5 * sc.t_end;
    for (const auto& state : traj.states) {
        std::vector<double> row{state.time};
        for (std::size_t k = 0; k < radii.size(); ++k) {
            const double e = exterior_weighted_energy(state, radii[k]);
            row.push_back(e);
            if (state.time >= half - 1e-12) sup[k] = std::max(sup[k], e);
        }
        series.add(std::move(row));
    }
    const double e0 = generalized_energy(data);
    for (std::size_t k = 0; k < radii.size(); ++k) report.set(detail::column("limsup_R", radii[k]), sup[k]);
    report.set("E_m0", e0);
    report.set("monotone_violations", static_cast<double>(increase_count(sup)));
    report.set("decay_ratio_at_max_R", e0 > 0.0 ? sup.back() / e0 : 0.0);

    const double R_fs = radii[radii.size() / 2];
    report.set("finite_speed_R", R_fs);
    report.set("finite_speed_error", check_finite_speed(data, exterior_data(data, R_fs), R_fs, sc));
    report.series.push_back(std::move(series));
    report.notes.push_back("limsup as t -> infinity proxied by the sup over t >= t_end / 2");
    return finalize(report);
}

/// Power law of the nonlinear correction in the data size.
inline ExperimentReport run_smalldata_rate(const RunConfig& cfg) {
    const Params params = cfg.params();
    const RadialGrid grid = cfg.radial_grid();
    const double m = params.m;
    const auto epsilons = detail::or_default(cfg.experiment.epsilons, {0.02, 0.04, 0.08});
    SolverConfig sc = detail::solver_config(cfg);
    SolverConfig linear_sc = sc;
    linear_sc.nonlinear = false;

    ExperimentReport report = detail::new_report("smalldata", "smalldata_" + detail::p_tag(params.p), cfg);
    Series series{report.name, {"epsilon", "delta", "D"}, {}};
    std::vector<double> eps_used, deltas, ds;
    std::size_t blowups = 0;
    double zero_eps_d = 0.0;
    for (double eps : epsilons) {
        DataSpec spec = cfg.data;
        spec.amplitude *= eps;
        spec.velocity *= eps;
        const RadialState data = make_data(spec, params, grid);
        const double delta = hardy_weighted_norm(data.w, HardyMode::derivative, m, Measure::space) +
                             hardy_weighted_norm(data.wt, HardyMode::position, m, Measure::space);
        const Trajectory nl = evolve(data, sc);
        const Trajectory lin = evolve(data, linear_sc);
        if (nl.status != TrajectoryStatus::completed) {
            ++blowups;
            continue;
        }
        double d = 0.0;
        for (std::size_t k = 0; k < std::min(nl.states.size(), lin.states.size()); ++k) {
            SampledFunction u(grid), ut(grid);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                u[i] = nl.states[k].w[i] - lin.states[k].w[i];
                ut[i] = nl.states[k].wt[i] - lin.states[k].wt[i];
            }
            d = std::max(d, std::pow(4.0 * std::numbers::pi * detail::weighted_gradient_power(u, ut, m), 1.0 / m));
        }
        series.add({eps, delta, d});
        if (eps == 0.0) {
            zero_eps_d = std::max(zero_eps_d, d);
            continue;
        }
        eps_used.push_back(eps);
        deltas.push_back(delta);
        ds.push_back(d);
    }
    require(blowups == 0, ErrorCode::BlowupEncountered, "a small-data run blew up; reduce epsilon");

    double slope = -std::numeric_limits<double>::infinity();
    double min_pair = std::numeric_limits<double>::infinity();
    double largest_regime = 0.0;
    if (ds.size() >= 2 && std::all_of(ds.begin(), ds.end(), [](double x) { return x > 0.0; })) {
        std::vector<double> lx, ly;
        for (std::size_t k = 0; k < ds.size(); ++k) {
            lx.push_back(std::log(deltas[k]));
            ly.push_back(std::log(ds[k]));
        }
        slope = fit_line(lx, ly).slope;
        largest_regime = eps_used.front();
        bool regime = true;
        for (std::size_t k = 1; k < ds.size(); ++k) {
            const double e = std::log(ds[k] / ds[k - 1]) / std::log(eps_used[k] / eps_used[k - 1]);
            min_pair = std::min(min_pair, e);
            regime = regime && e >= 2.0;
            if (regime) largest_regime = eps_used[k];
        }
    }
    report.set("fitted_slope", slope);
    report.set("slope_floor", 0.75 * m - 0.25);
    report.set("min_pair_exponent", min_pair);
    report.set("largest_regime_epsilon", largest_regime);
    report.set("zero_epsilon_D", zero_eps_d);
    report.set("blowups", static_cast<double>(blowups));

    DataSpec spec = cfg.data;
    const double eps_max = *std::max_element(epsilons.begin(), epsilons.end());
    spec.amplitude *= eps_max;
    spec.velocity *= eps_max;
    const RadialState data = make_data(spec, params, grid);
    const double R_fs = 1.0;
    report.set("finite_speed_error", check_finite_speed(data, exterior_data(data, R_fs), R_fs, sc));
    report.series.push_back(std::move(series));
    report.notes.push_back("w_lin is the same leapfrog with the nonlinearity switched off");
    return finalize(report);
}

namespace detail {

inline Series stationary_series(const StationarySolution& sol, const std::string& name) {
    Series s{name, {"r", "Z", "dZ", "r2_defect"}, {}};
    for (const auto& pt : sol.points) s.add({pt.r, pt.z, pt.dz, pt.r * pt.r * std::fabs(pt.r * pt.z - sol.ell)});
    return s;
}

inline std::string ell_tag(double ell) { return "ell" + format_double(ell); }

} // namespace detail

/// Singular stationary solutions: both signs, a list of ell values.
inline ExperimentReport run_stationary_suite(const RunConfig& cfg) {
    const double p = cfg.p;
    const Params defoc = make_params(p, Sign::defocusing);
    const Params foc = make_params(p, Sign::focusing);
    const auto ells = detail::or_default(cfg.experiment.ells, {1.0, 2.0, 4.0});
    const StationaryOptions options{};

    ExperimentReport report = detail::new_report("stationary", "stationary_" + detail::p_tag(p), cfg);

    const HSolution h1 = solve_h(1.0, defoc, options);
    const StationarySolution z1 = z_from_h(h1);
    require(h1.s_star.has_value(), ErrorCode::PreconditionViolated, "defocusing branch did not blow up");
    report.set("R1", z1.R_ell);
    report.set("R1_bracket_width", h1.s_star_width / (*h1.s_star * *h1.s_star));
    StationaryOptions loose = options;
    loose.ode.rtol = 1e-8;
    const HSolution h1_loose = solve_h(1.0, defoc, loose);
    const double R1_loose = h1_loose.s_star ? 1.0 / *h1_loose.s_star : 0.0;
    report.set("R1_tolerance_drift", std::fabs(R1_loose - z1.R_ell) / z1.R_ell);
    report.set("last_abs_Z", std::fabs(z1.points.front().z));
    report.set("asymptotic_defect", z1.asymptotic_defect);

    double outer_err = std::fabs(z1.points.back().r * z1.points.back().r * z1.points.back().dz + 1.0);
    std::size_t convexity = 0;
    double ratio_defect = 0.0;
    for (double ell : ells) {
        const HSolution h = solve_h(ell, defoc, options);
        if (ell > 0.0) {
            for (const auto& pt : h.points) {
                const double hpp = detail::h_rhs(pt.s, pt.h, defoc);
                if (!(hpp > 0.0) || pt.hp < 0.5 * ell || pt.h < 0.5 * ell * pt.s) ++convexity;
            }
        }
        const StationarySolution z = z_from_h(h);
        report.series.push_back(detail::stationary_series(z, report.name + "_defocusing_" + detail::ell_tag(ell)));
        if (ell == 1.0) continue;
        report.set("R_" + detail::ell_tag(ell), z.R_ell);
        const double lambda = std::pow(std::fabs(ell), -(p - 1.0) / (p - 3.0));
        const double r_lo = 2.0 * z.R_ell;
        const ScalingDefects sd = scaling_check(ell, defoc, r_lo, 100.0, options);
        ratio_defect = std::max(ratio_defect, sd.radius_ratio_defect);
        report.set("scaling_ratio_defect_" + detail::ell_tag(ell), sd.radius_ratio_defect);
        report.set("scaling_pointwise_defect_" + detail::ell_tag(ell), sd.max_pointwise_defect);
        report.set("R_ratio_" + detail::ell_tag(ell), z.R_ell / z1.R_ell);
        report.set("R_ratio_expected_" + detail::ell_tag(ell), 1.0 / lambda);
    }
    report.set("convexity_violations", static_cast<double>(convexity));
    report.set("scaling_ratio_defect_max", ratio_defect);
    if (report.find("scaling_pointwise_defect_ell2") == nullptr) {
        const ScalingDefects sd = scaling_check(2.0, defoc, 2.0 * z1.R_ell * std::pow(2.0, 1.5), 100.0, options);
        report.set("scaling_pointwise_defect_ell2", sd.max_pointwise_defect);
    }

    const HSolution hm = solve_h(-1.0, defoc, options);
    double sym = 0.0;
    if (hm.points.size() == h1.points.size()) {
        for (std::size_t k = 0; k < hm.points.size(); ++k)
            sym = std::max(sym, std::fabs(hm.points[k].h + h1.points[k].h) / std::max(std::fabs(h1.points[k].h), 1e-300));
    } else {
        sym = std::numeric_limits<double>::infinity();
    }
    report.set("sign_symmetry_defect", sym);

    const HSolution f1 = solve_h(1.0, foc, options);
    const StationarySolution zf = z_from_h(f1);
    std::size_t foc_blowups = 0;
    for (double ell : ells) {
        const HSolution hf = solve_h(ell, foc, options);
        if (hf.s_star) ++foc_blowups;
        report.series.push_back(detail::stationary_series(z_from_h(hf), report.name + "_focusing_" + detail::ell_tag(ell)));
    }
    report.set("focusing_blowups", static_cast<double>(foc_blowups));
    report.set("focusing_r_inner", zf.r_inner());
    double r2def = 0.0;
    for (const auto& pt : zf.points)
        if (pt.r >= 10.0 && pt.r <= 1e3 * (1.0 + 1e-12)) r2def = std::max(r2def, pt.r * pt.r * std::fabs(pt.r * pt.z - 1.0));
    report.set("focusing_r2_defect_max", r2def);
    outer_err = std::max(outer_err, std::fabs(zf.points.back().r * zf.points.back().r * zf.points.back().dz + 1.0));
    report.set("outer_r2dZ_error", outer_err);

    const std::vector<double> eps{1e-1, 1e-2, 1e-3};
    std::vector<double> masses;
    for (double e : eps) masses.push_back(derivative_mass(f1, e));
    std::size_t growth_violations = 0;
    for (std::size_t k = 1; k < masses.size(); ++k)
        if (!(masses[k] > masses[k - 1])) ++growth_violations;
    for (std::size_t k = 0; k < eps.size(); ++k) report.set("derivative_mass_eps" + format_double(eps[k]), masses[k]);
    report.set("derivative_mass_growth_violations", static_cast<double>(growth_violations));
    report.notes.push_back("R_ell measured, no closed form; R1 is a regression constant");
    return finalize(report);
}

/// Focusing plateau data against the ODE y'' = |y|^{p-1} y.
inline ExperimentReport run_blowup_ode(const RunConfig& cfg) {
    const Params params = cfg.params();
    require(params.iota == Sign::focusing, ErrorCode::ConfigError, "blowup-ode needs iota = focusing");
    const double p = params.p;
    const RadialGrid grid = cfg.radial_grid();
    const auto amplitudes = detail::or_default(cfg.experiment.amplitudes, {1.0});
    const double r_trace = 0.1;
    const auto i_trace = static_cast<std::size_t>(std::llround(r_trace / grid.h()));
    const double c_p = selfsimilar_constant(p);
    const double beta = 2.0 / (p - 1.0);

    ExperimentReport report = detail::new_report("blowup_ode", "blowup_ode_" + detail::p_tag(p), cfg);
    report.set("c_p", c_p);

    // Oracle self-check: y = c_p (1 - t)^{-beta} from its t = 0 values.
    {
        ode::Options opt;
        opt.rtol = 1e-13;
        opt.atol = 1e-300;
        auto rhs = [&](double, const std::array<double, 2>& y) {
            return std::array<double, 2>{y[1], signed_power(y[0], p)};
        };
        std::array<double, 2> y{c_p, beta * c_p};
        double t = 0.0, worst = 0.0;
        for (double target : {0.5, 0.9, 0.99, 0.999}) {
            const auto res = ode::integrate<2>(rhs, t, y, target, opt);
            y = res.samples.back().y;
            t = res.samples.back().t;
            worst = std::max(worst, std::fabs(y[0] / (c_p * std::pow(1.0 - t, -beta)) - 1.0));
        }
        report.set("oracle_selfsimilar_error", worst);
    }

    double trace_err = 0.0, tstar_steps = 0.0, exp_err = 0.0, cp_err = 0.0, oracle_T_err = 0.0, fs_err = 0.0;
    Series series{report.name, {"A", "t", "w_trace", "y_ode", "relative_error"}, {}};
    for (double A : amplitudes) {
        if (A == 0.0) continue;
        const double T = ode_blowup_time(p, A);
        ode::Options opt;
        opt.rtol = 1e-12;
        opt.atol = 1e-300;
        auto rhs = [&](double, const std::array<double, 2>& y) {
            return std::array<double, 2>{y[1], signed_power(y[0], p)};
        };
        // Oracle blow-up time: integrate until the step size underflows.
        {
            ode::Options to_end = opt;
            to_end.h_min = 1e-15;
            const auto res = ode::integrate<2>(rhs, 0.0, {A, 0.0}, 2.0 * T, to_end);
            oracle_T_err = std::max(oracle_T_err, std::fabs(res.samples.back().t - T) / T);
        }

        DataSpec spec = cfg.data;
        spec.family = Family::plateau;
        spec.amplitude = A;
        const RadialState data = make_data(spec, params, grid);
        SolverConfig sc = detail::solver_config(cfg);
        sc.record_stride = 1;
        const Trajectory traj = evolve(data, sc);
        const double dt = traj.dt;
        const double window = std::min(spec.rho - 1.0 - r_trace, 0.5 * T);

        std::array<double, 2> y{A, 0.0};
        double t = 0.0;
        std::vector<double> lx, ly;
        for (const auto& state : traj.states) {
            if (state.time > t) {
                const auto res = ode::integrate<2>(rhs, t, y, state.time, opt);
                if (res.stop != ode::Stop::reached_end) break;
                y = res.samples.back().y;
                t = state.time;
            }
            const double w = state.w[i_trace];
            const double rel = std::fabs(w - y[0]) / std::fabs(y[0]);
            if (state.time <= window) {
                trace_err = std::max(trace_err, rel);
                series.add({A, state.time, w, y[0], rel});
            }
            if (std::fabs(w) >= 2.0 && T - state.time >= 10.0 * dt && state.time <= spec.rho - 1.0 - r_trace) {
                lx.push_back(std::log(T - state.time));
                ly.push_back(std::log(std::fabs(w)));
            }
        }
        const auto t_star = detect_blowup(traj);
        tstar_steps = std::max(tstar_steps, t_star ? std::fabs(*t_star - T) / dt : std::numeric_limits<double>::infinity());
        if (t_star) report.set("t_star_lag_steps_A" + format_double(A), (*t_star - T) / dt);
        if (lx.size() >= 2) {
            const LineFit fit = fit_line(lx, ly);
            exp_err = std::max(exp_err, std::fabs(-fit.slope - beta) / beta);
            cp_err = std::max(cp_err, std::fabs(std::exp(fit.intercept) / (std::fabs(A) / A) - c_p) / c_p);
            report.set("exponent_fit_A" + format_double(A), fit.slope);
            report.set("c_p_fit_A" + format_double(A), std::exp(fit.intercept));
        } else {
            exp_err = cp_err = std::numeric_limits<double>::infinity();
        }
        report.set("T_oracle_A" + format_double(A), T);
        report.set("t_star_A" + format_double(A), t_star ? *t_star : std::numeric_limits<double>::infinity());

        RadialState modified = data;
        for (std::size_t i = 0; i < grid.size(); ++i) modified.w[i] += 0.1 * A * bump(grid.node(i) / 0.25);
        fs_err = std::max(fs_err, check_finite_speed(data, modified, 0.5, sc));
    }
    report.set("trace_error", trace_err);
    report.set("t_star_error_steps", tstar_steps);
    report.set("exponent_relative_error", exp_err);
    report.set("c_p_fit_relative_error", cp_err);
    report.set("oracle_blowup_time_error", oracle_T_err);
    report.set("finite_speed_error", fs_err);
    report.series.push_back(std::move(series));
    report.notes.push_back("trace compared at r = 0.1 for t <= min(rho - 1 - r, T/2)");
    report.notes.push_back("exponent fitted on |w(t, 0.1)| >= 2 with T - t >= 10 dt");
    return finalize(report);
}

/// Hardy-type inequalities and the UtoV equivalence over a random smooth family.
inline ExperimentReport run_hardy(const RunConfig& cfg) {
    const Params params = cfg.params();
    const RadialGrid grid = cfg.radial_grid();
    const double m = params.m;
    const std::uint64_t seed = detail::require_seed(cfg);
    const auto radii = detail::or_default(cfg.experiment.R, {0.0, 0.5, 1.0, 2.0});
    const auto seeds = detail::trial_seeds(seed, cfg.experiment.trials);

    ExperimentReport report = detail::new_report("hardy", "hardy_" + detail::p_tag(params.p), cfg);
    Series series{report.name,
                  {"trial", "pos_origin", "der_origin", "pos_infinity", "young_ratio", "utov_m2_mismatch", "utov_ratio"},
                  {}};
    double c_pos = 0, c_der = 0, c_inf = 0, young = 0, mismatch = 0, K = 1.0, c_sob = 0;
    const double mm = std::pow(m, m);
    for (std::size_t j = 0; j < seeds.size(); ++j) {
        const SampledFunction phi = random_smooth_function(seeds[j], grid, cfg.data.support);
        const double hs1 = sobolev_norm_radial(phi, params.s_c - 1.0);
        const double hs = sobolev_norm_radial(phi, params.s_c);
        const double pos = hardy_weighted_norm(phi, HardyMode::position, m, Measure::space);
        const double der = hardy_weighted_norm(phi, HardyMode::derivative, m, Measure::space);
        const double chain = weighted_norm(phi, -2.0 / m, m, Measure::space) + lebesgue_norm(phi, 3.0 * m, Measure::space);
        const double a = pos / hs1, b = der / hs, c = chain / der;
        c_pos = std::max(c_pos, a);
        c_der = std::max(c_der, b);
        c_inf = std::max(c_inf, c);
        double trial_young = 0.0, trial_mismatch = 0.0, trial_K = 1.0;
        for (double R : radii) {
            const Sides hy = hardy_exterior_sides(phi, R, m);
            if (hy.rhs > 0.0) trial_young = std::max(trial_young, hy.lhs / (mm * hy.rhs));
            const Sides u2 = utov_sides(phi, R, 2.0);
            if (u2.lhs > 0.0) trial_mismatch = std::max(trial_mismatch, std::fabs(u2.lhs - u2.rhs) / u2.lhs);
            const Sides um = utov_sides(phi, R, m);
            if (um.lhs > 0.0 && um.rhs > 0.0) trial_K = std::max({trial_K, um.lhs / um.rhs, um.rhs / um.lhs});
        }
        young = std::max(young, trial_young);
        mismatch = std::max(mismatch, trial_mismatch);
        K = std::max(K, trial_K);
        if (j < 30) {
            const double h1 = sobolev_norm_radial(phi, 1.0);
            double peak = 0.0;
            for (std::size_t i = 1; i < grid.size(); ++i) peak = std::max(peak, std::fabs(phi[i]) * std::sqrt(grid.node(i)));
            c_sob = std::max(c_sob, peak / h1);
        }
        series.add({static_cast<double>(j), a, b, c, trial_young, trial_mismatch, trial_K});
    }
    report.set("C_position_origin", c_pos);
    report.set("C_derivative_origin", c_der);
    report.set("C_position_infinity", c_inf);
    report.set("young_bound_ratio", young);
    report.set("young_constant", mm);
    report.set("utov_m2_mismatch", mismatch);
    report.set("utov_K", K);
    report.set("C_radial_sobolev", c_sob);
    report.series.push_back(std::move(series));
    report.notes.push_back("norms over R^3 with measure 4 pi r^2 dr");
    report.notes.push_back("young_bound_ratio = (int_R |phi|^m + R |phi(R)|^m) / (m^m int_R r^m |phi'|^m)");
    return finalize(report);
}

namespace detail {

inline double spread(const std::vector<double>& xs) {
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    return *hi / *lo - 1.0;
}

inline std::vector<double> cont_sequence(const SampledFunction& phi, double sigma, const std::vector<double>& deltas,
                                         double s) {
    const double norm = sobolev_norm_radial(phi, s);
    const SampledFunction base = truncate_T(phi, sigma);
    std::vector<double> out;
    for (double d : deltas) {
        const SampledFunction shifted = truncate_T(phi, sigma + d);
        SampledFunction diff(phi.grid());
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = shifted[i] - base[i];
        out.push_back(sobolev_norm_radial(diff, s) / norm);
    }
    return out;
}

} // namespace detail

/// Boundedness of T_R and of the ball indicators on Hdot^s, continuity of R -> T_R.
inline ExperimentReport run_operator_bounds(const RunConfig& cfg) {
    const Params params = cfg.params();
    const RadialGrid grid = cfg.radial_grid();
    const std::uint64_t seed = detail::require_seed(cfg);
    const auto radii = detail::or_default(cfg.experiment.R, {0.5, 1.0, 2.0, 4.0});
    const auto seeds = detail::trial_seeds(seed, cfg.experiment.trials);
    const double s = params.s_c;
    const double s1 = params.s_c - 1.0;
    const double support = cfg.data.support;

    ExperimentReport report = detail::new_report("operators", "operators_" + detail::p_tag(params.p), cfg);
    Series series{report.name, {"R", "C_T", "C_interior", "C_exterior"}, {}};
    std::vector<double> c_t, c_in, c_out;
    for (double R : radii) {
        double a = 0, b = 0, c = 0;
        for (std::uint64_t sd : seeds) {
            const SampledFunction phi = random_smooth_function(sd, grid, support, R);
            a = std::max(a, sobolev_norm_radial(truncate_T(phi, R), s) / sobolev_norm_radial(phi, s));
            const double base = sobolev_norm_radial(phi, s1);
            b = std::max(b, sobolev_norm_radial(indicator_interior(phi, R), s1) / base);
            c = std::max(c, sobolev_norm_radial(indicator_exterior(phi, R), s1) / base);
        }
        c_t.push_back(a);
        c_in.push_back(b);
        c_out.push_back(c);
        series.add({R, a, b, c});
        report.set(detail::column("C_T_R", R), a);
        report.set(detail::column("C_interior_R", R), b);
        report.set(detail::column("C_exterior_R", R), c);
    }
    report.set("boundop_spread", detail::spread(c_t));
    report.set("boundcharac_interior_spread", detail::spread(c_in));
    report.set("boundcharac_exterior_spread", detail::spread(c_out));

    // Continuity of R -> T_R phi at sigma, phi = exp(-(r - 1)^2).
    const SampledFunction phi = sample(grid, [](double r) { return std::exp(-(r - 1.0) * (r - 1.0)); });
    std::vector<double> deltas;
    for (int k = 0; k < 7; ++k) deltas.push_back(0.5 * std::pow(0.5, k));
    const auto generic = detail::cont_sequence(phi, 1.5, deltas, s);
    const auto extremum = detail::cont_sequence(phi, 1.0, deltas, s);
    Series cont{report.name + "_continuity", {"delta", "generic", "extremum"}, {}};
    std::size_t gv = 0, ev = 0;
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        cont.add({deltas[k], generic[k], extremum[k]});
        if (k > 0 && !(generic[k] < generic[k - 1])) ++gv;
        if (k > 0 && !(extremum[k] < extremum[k - 1])) ++ev;
    }
    report.set("cont_generic_violations", static_cast<double>(gv));
    report.set("cont_generic_final", generic.back());
    report.set("cont_extremum_violations", static_cast<double>(ev));
    report.set("cont_extremum_final", extremum.back());
    report.series.push_back(std::move(series));
    report.series.push_back(std::move(cont));
    report.notes.push_back("family members dilated with R: phi(r / R)");
    report.notes.push_back("continuity measured at sigma = 1.5 (generic) and sigma = 1 (phi'(sigma) = 0)");
    return finalize(report);
}

/// One-shot norm table of the configured data.
inline ExperimentReport run_norms(const RunConfig& cfg) {
    const Params params = cfg.params();
    const RadialGrid grid = cfg.radial_grid();
    const RadialState data = make_data(cfg.data, params, grid);
    const double m = params.m;
    const EnergyBreakdown e = nonlinear_energy(data);

    ExperimentReport report = detail::new_report("norms", "norms_" + detail::p_tag(params.p), cfg);
    std::vector<std::pair<std::string, double>> table = {
        {"E_m", e.e_m},
        {"E_2_gradient", e.gradient},
        {"E_2_kinetic", e.kinetic},
        {"potential", e.potential},
        {"nonlinear_total", e.total_nonlinear},
        {"Hs_c_w0", sobolev_norm_radial(data.w, params.s_c)},
        {"Hs_c_minus_1_w1", sobolev_norm_radial(data.wt, params.s_c - 1.0)},
        {"H1_w0", sobolev_norm_radial(data.w, 1.0)},
        {"hardy_derivative_w0", hardy_weighted_norm(data.w, HardyMode::derivative, m, Measure::space)},
        {"hardy_position_w1", hardy_weighted_norm(data.wt, HardyMode::position, m, Measure::space)},
        {"r_minus_2_over_m_w0", weighted_norm(data.w, -2.0 / m, m, Measure::space)},
        {"L3m_w0", lebesgue_norm(data.w, 3.0 * m, Measure::space)},
        {"weighted_mass", weighted_mass(data, 0.0, grid.r_max())},
        {"numerical_support", numerical_support(data)},
    };
    Series series{report.name, {}, {}};
    std::vector<double> row;
    std::size_t nonfinite = 0;
    for (const auto& [k, v] : table) {
        report.set(k, v);
        series.columns.push_back(k);
        row.push_back(v);
        if (!std::isfinite(v)) ++nonfinite;
    }
    series.add(row);
    report.set("nonfinite_count", static_cast<double>(nonfinite));
    report.series.push_back(std::move(series));
    return finalize(report);
}

/// Nonlinear evolution with per-snapshot energies.
inline ExperimentReport run_simulate(const RunConfig& cfg) {
    const Params params = cfg.params();
    const RadialGrid grid = cfg.radial_grid();
    const RadialState data = make_data(cfg.data, params, grid);
    const SolverConfig sc = detail::solver_config(cfg);
    const double R = cfg.experiment.R.empty() ? 1.0 : cfg.experiment.R.front();
    const Trajectory traj = evolve(data, sc);

    ExperimentReport report = detail::new_report("simulate", "simulate_" + detail::p_tag(params.p), cfg);
    Series series{report.name, {"t", "E_m", "E_2_total", "nonlinear_total", "ext_E_m_R", "max_abs_w"}, {}};
    double e_first = 0.0, drift = 0.0;
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const auto& state = traj.states[k];
        const EnergyBreakdown e = nonlinear_energy(state);
        const double ext = R + state.time <= grid.r_max() ? exterior_generalized_energy(state, R) : 0.0;
        double max_w = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) max_w = std::max(max_w, std::fabs(state.w[i]));
        if (k == 0) e_first = e.total_nonlinear;
        else if (e_first != 0.0) drift = std::max(drift, std::fabs(e.total_nonlinear - e_first) / std::fabs(e_first));
        series.add({state.time, e.e_m, e.e_2, e.total_nonlinear, ext, max_w});
    }
    report.set("completed", traj.status == TrajectoryStatus::completed ? 1.0 : 0.0);
    report.set("blew_up", traj.status == TrajectoryStatus::blew_up ? 1.0 : 0.0);
    report.set("unstable", traj.status == TrajectoryStatus::unstable ? 1.0 : 0.0);
    report.set("t_star", traj.t_star ? *traj.t_star : -1.0);
    report.set("snapshots", static_cast<double>(traj.states.size()));
    report.set("nonlinear_energy_drift", drift);
    report.set("R", R);
    report.series.push_back(std::move(series));
    if (traj.t_star) report.notes.push_back("blow-up detected; t_star is the time of the triggering update");
    return finalize(report);
}

/// Free evolution through the d'Alembert profile.
inline ExperimentReport run_linear(const RunConfig& cfg) {
    const Params params = cfg.params();
    const RadialGrid grid = cfg.radial_grid();
    const RadialState data = make_data(cfg.data, params, grid);
    const auto times = detail::or_default(cfg.experiment.times, detail::integer_times(cfg.grid.t_end));
    const double R = cfg.experiment.R.empty() ? 1.0 : cfg.experiment.R.front();
    double t_max = 0.0;
    for (double t : times) t_max = std::max(t_max, std::fabs(t));
    const FreeWaveProfile profile = build_free_profile(data, grid.r_max() + t_max);
    const double m = params.m;
    const double mass = full_line_mass(profile, m);

    ExperimentReport report = detail::new_report("linear", "linear_" + detail::p_tag(params.p), cfg);
    Series series{report.name, {"t", "E_m", "E_m_profile", "fdot_mass", "ext_E_m_R", "ext_surrogate_R"}, {}};
    double drift = 0.0;
    for (double t : times) {
        const RadialState state = eval_linear(profile, params, t, grid);
        const double shifted = shifted_mass(profile, m, t, grid);
        const double ext = R + std::fabs(t) <= grid.r_max() ? exterior_generalized_energy(state, R) : 0.0;
        if (mass > 0.0) drift = std::max(drift, std::fabs(shifted - mass) / mass);
        series.add({t, generalized_energy(state), profile_energy(profile, m, t, grid), shifted, ext,
                    exterior_surrogate(profile, m, R, t)});
    }
    report.set("fdot_mass", mass);
    report.set("surrogate_drift", drift);
    report.series.push_back(std::move(series));
    return finalize(report);
}

} // namespace rwl
