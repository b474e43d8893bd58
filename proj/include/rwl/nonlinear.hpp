#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "rwl/grid.hpp"

namespace rwl {

struct SolverConfig {
    double dt_ratio = 1.0;  ///< dt = dt_ratio * h
    double t_end = 1.0;
    double blowup_threshold = 1e6;
    std::size_t record_stride = 1;
    bool nonlinear = true;  ///< false drops the iota |w|^{p-1} w term
    double support_tolerance = 1e-12;  ///< relative level defining the numerical support
};

enum class TrajectoryStatus { completed, blew_up, unstable };

struct Trajectory {
    Params params;
    std::vector<RadialState> states;
    TrajectoryStatus status = TrajectoryStatus::completed;
    std::optional<double> t_star;
    std::size_t blowup_step = 0;
    double dt = 0.0;
};

/// Reduced nonlinearity iota |v|^{p-1} v / r^{p-1}, zero at the origin.
inline double nonlinearity(double v, double r, const Params& params) {
    if (r <= 0.0) return 0.0;
    return as_real(params.iota) * r * signed_power(v / r, params.p);
}

/// Largest node radius where r w0 or r w1 exceeds the relative tolerance.
inline double numerical_support(const RadialState& data, double tolerance = 1e-12) {
    const auto v = data.v();
    const auto vt = data.vt();
    double scale = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) scale = std::max({scale, std::fabs(v[i]), std::fabs(vt[i])});
    if (scale == 0.0) return 0.0;
    for (std::size_t i = v.size(); i-- > 0;) {
        if (std::fabs(v[i]) > tolerance * scale || std::fabs(vt[i]) > tolerance * scale) return data.grid.node(i);
    }
    return 0.0;
}

namespace detail {

struct FieldCheck {
    double max_abs_w = 0.0;
    bool has_nan = false;
    bool has_inf = false;
};

inline FieldCheck inspect(const std::vector<double>& v, const RadialGrid& grid) {
    FieldCheck out;
    for (std::size_t i = 1; i < v.size(); ++i) {
        const double w = v[i] / grid.node(i);
        if (std::isnan(w)) out.has_nan = true;
        else if (std::isinf(w)) out.has_inf = true;
        else out.max_abs_w = std::max(out.max_abs_w, std::fabs(w));
    }
    if (v.size() > 3 && !out.has_nan && !out.has_inf) {
        const double w0 = extrapolate_to_origin(v[1] / grid.node(1), v[2] / grid.node(2), v[3] / grid.node(3));
        if (std::isfinite(w0)) out.max_abs_w = std::max(out.max_abs_w, std::fabs(w0));
    }
    return out;
}

} // namespace detail

/// Leapfrog evolution of v = r w:
///   v^{k+1} = 2 v^k - v^{k-1} + dt^2 [ (v_{i+1} - 2 v_i + v_{i-1}) / h^2 + N(v_i, r_i) ],
/// with v = 0 at both ends of the grid. The first level uses a second-order
/// Taylor step whose velocity term is smoothed by the same stencil, so that
/// at dt = h the scheme is the exact d'Alembert recursion for profiles that
/// are piecewise linear on the grid.
inline Trajectory evolve(const RadialState& initial, const SolverConfig& config) {
    require(config.dt_ratio > 0.0 && config.dt_ratio <= 1.0, ErrorCode::CFLViolation, "need 0 < dt_ratio <= 1");
    require(config.blowup_threshold > 0.0, ErrorCode::PreconditionViolated, "blow-up threshold must be positive");
    require(config.t_end >= 0.0, ErrorCode::PreconditionViolated, "t_end must be nonnegative");
    const auto& grid = initial.grid;
    const double support = numerical_support(initial, config.support_tolerance);
    require(support + config.t_end <= grid.r_max() * (1.0 + 1e-12), ErrorCode::CausalClosureViolated,
            "data support plus t_end reaches r_max");

    const Params& params = initial.params;
    const std::size_t n = grid.n();
    const double h = grid.h();
    const double dt = config.dt_ratio * h;
    const double lambda2 = config.dt_ratio * config.dt_ratio;
    const double dt2 = dt * dt;
    const auto steps = static_cast<std::size_t>(std::llround(config.t_end / dt));
    const std::size_t stride = std::max<std::size_t>(1, config.record_stride);

    Trajectory traj;
    traj.params = params;
    traj.dt = dt;

    auto source = [&](const std::vector<double>& v, std::size_t i) {
        return config.nonlinear ? nonlinearity(v[i], grid.node(i), params) : 0.0;
    };
    auto record = [&](std::size_t k, const std::vector<double>& v, const std::vector<double>& vt) {
        traj.states.push_back(state_from_reduced(params, SampledFunction(grid, v), SampledFunction(grid, vt),
                                                 static_cast<double>(k) * dt));
    };
    // Returns true when the run must stop at level k.
    auto check = [&](std::size_t k, const std::vector<double>& v, const std::vector<double>& v_before) {
        const auto c = detail::inspect(v, grid);
        if (c.has_nan && !c.has_inf) {
            traj.status = TrajectoryStatus::unstable;
            return true;
        }
        if (c.has_inf || c.has_nan || c.max_abs_w > config.blowup_threshold) {
            traj.status = TrajectoryStatus::blew_up;
            traj.blowup_step = k;
            traj.t_star = static_cast<double>(k) * dt;
            if (!c.has_inf && !c.has_nan) {
                std::vector<double> vt(v.size());
                for (std::size_t i = 0; i < v.size(); ++i) vt[i] = (v[i] - v_before[i]) / dt;
                record(k, v, vt);
            }
            return true;
        }
        return false;
    };

    const SampledFunction v0 = initial.v();
    const SampledFunction v1 = initial.vt();
    std::vector<double> prev(v0.values().begin(), v0.values().end());
    std::vector<double> vt0(v1.values().begin(), v1.values().end());
    prev[0] = 0.0;
    vt0[0] = 0.0;
    record(0, prev, vt0);
    if (steps == 0) return traj;

    std::vector<double> cur(n + 1, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        const double smoothed = vt0[i] + 0.25 * lambda2 * (vt0[i + 1] - 2.0 * vt0[i] + vt0[i - 1]);
        cur[i] = (1.0 - lambda2) * prev[i] + 0.5 * lambda2 * (prev[i + 1] + prev[i - 1]) + dt * smoothed +
                 0.5 * dt2 * source(prev, i);
    }
    if (check(1, cur, prev)) return traj;

    std::vector<double> next(n + 1, 0.0);
    for (std::size_t k = 1; k <= steps; ++k) {
        for (std::size_t i = 1; i < n; ++i) {
            // Grouped so that dt = h adds neighbours without cancellation.
            next[i] = (2.0 - 2.0 * lambda2) * cur[i] + lambda2 * (cur[i + 1] + cur[i - 1]) - prev[i] +
                      dt2 * source(cur, i);
        }
        if (k % stride == 0 || k == steps) {
            std::vector<double> vt(n + 1, 0.0);
            for (std::size_t i = 0; i <= n; ++i) vt[i] = (next[i] - prev[i]) / (2.0 * dt);
            record(k, cur, vt);
        }
        if (k == steps) break;
        if (check(k + 1, next, cur)) return traj;
        std::swap(prev, cur);
        std::swap(cur, next);
    }
    return traj;
}

/// Time of the update that first pushed max |w| over the threshold.
inline std::optional<double> detect_blowup(const Trajectory& traj) {
    if (traj.status != TrajectoryStatus::blew_up) return std::nullopt;
    return traj.t_star;
}

/// Evolves two data sets that agree on r >= R and returns the largest
/// |w_a - w_b| over snapshots and nodes with r >= R + t.
inline double check_finite_speed(const RadialState& data_a, const RadialState& data_b, double R,
                                 const SolverConfig& config) {
    require(data_a.grid == data_b.grid, ErrorCode::PreconditionViolated, "data must share a grid");
    const auto& grid = data_a.grid;
    const double h = grid.h();
    const auto first = static_cast<std::size_t>(std::max(0.0, std::ceil(R / h - 1e-9)));
    for (std::size_t i = first; i < grid.size(); ++i) {
        require(std::fabs(data_a.w[i] - data_b.w[i]) <= 1e-12 && std::fabs(data_a.wt[i] - data_b.wt[i]) <= 1e-12,
                ErrorCode::PreconditionViolated, "data differ on r >= R");
    }
    const Trajectory a = evolve(data_a, config);
    const Trajectory b = evolve(data_b, config);
    double worst = 0.0;
    const std::size_t count = std::min(a.states.size(), b.states.size());
    for (std::size_t k = 0; k < count; ++k) {
        const double t = a.states[k].time;
        const auto from = static_cast<std::size_t>(std::max(0.0, std::ceil((R + t) / h - 1e-9)));
        for (std::size_t i = std::max<std::size_t>(from, 1); i < grid.size(); ++i) {
            worst = std::max(worst, std::fabs(a.states[k].w[i] - b.states[k].w[i]));
        }
    }
    return worst;
}

} // namespace rwl
