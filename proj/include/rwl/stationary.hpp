#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "rwl/model.hpp"
#include "rwl/ode.hpp"

namespace rwl {

/// Samples of h(s) = Z_ell(1/s), which solves h'' = -iota s^{-4} |h|^{p-1} h.
struct HSolution {
    struct Point {
        double s;
        double h;
        double hp;
    };
    Params params;
    double ell;
    std::vector<Point> points;        ///< increasing s
    std::optional<double> s_star;     ///< blow-up abscissa (midpoint of the final bracket)
    double s_star_width = 0.0;        ///< bracket width around s_star
};

/// Z_ell sampled in r = 1/s.
struct StationarySolution {
    struct Point {
        double r;
        double z;
        double dz;
    };
    Params params;
    double ell;
    std::vector<Point> points;  ///< increasing r, covering (r_inner, r_outer]
    double R_ell = 0.0;         ///< 0 when the integration reached the inner floor
    double asymptotic_defect = 0.0;

    double r_inner() const { return points.front().r; }
    double r_outer() const { return points.back().r; }
};

struct StationaryOptions {
    double s0 = 1e-3;
    double s_cap = 1e3;
    double blowup_level = 1e8;
    double switch_level = 1e3;  ///< |h| above which h itself becomes the independent variable
    ode::Options ode{};
};

namespace detail {

inline double h_rhs(double s, double h, const Params& params) {
    return -as_real(params.iota) * signed_power(h, params.p) / (s * s * s * s);
}

inline void require_ell(double ell) { require(ell != 0.0 && std::isfinite(ell), ErrorCode::ZeroEll, "ell must be nonzero"); }

} // namespace detail

struct SeriesValue {
    double h;
    double hp;
};

/// Two-term expansion at s -> 0: h = ell s + c s^{p-2}, c = -iota ell^p / ((p-2)(p-3)).
inline SeriesValue series_init(double ell, double s0, const Params& params) {
    detail::require_ell(ell);
    const double p = params.p;
    const double c = -as_real(params.iota) * signed_power(ell, p) / ((p - 2.0) * (p - 3.0));
    return SeriesValue{ell * s0 + c * std::pow(s0, p - 2.0), ell + c * (p - 2.0) * std::pow(s0, p - 3.0)};
}

/// Residual h_series'' - rhs(h_series) of the two-term expansion at s.
inline double series_residual(double ell, double s, const Params& params) {
    detail::require_ell(ell);
    const double p = params.p;
    const double c = -as_real(params.iota) * signed_power(ell, p) / ((p - 2.0) * (p - 3.0));
    const double second = c * (p - 2.0) * (p - 3.0) * std::pow(s, p - 4.0);
    return second - detail::h_rhs(s, series_init(ell, s, params).h, params);
}

/// Residual relative to the leading size |ell|^p s^{p-4} of h''.
inline double series_defect(double ell, double s, const Params& params) {
    return std::fabs(series_residual(ell, s, params)) / (abs_power(ell, params.p) * std::pow(s, params.p - 4.0));
}

/// Adaptive integration of the h-equation from the series start s0 up to
/// s_cap. Near a blow-up, once |h| passes switch_level while growing, the
/// roles swap and (s, h') is integrated against h until |h| = blowup_level.
inline HSolution integrate_h(double ell, const Params& params, double s0, double s_cap,
                             const StationaryOptions& options = {}) {
    detail::require_ell(ell);
    require(s0 > 0.0 && s_cap > s0, ErrorCode::PreconditionViolated, "need 0 < s0 < s_cap");
    require(series_defect(ell, s0, params) <= 1e-6, ErrorCode::SeriesRegionExceeded,
            "s0 outside the two-term series region");

    HSolution out{params, ell, {}, std::nullopt, 0.0};
    const SeriesValue start = series_init(ell, s0, params);

    auto rhs = [&](double s, const std::array<double, 2>& y) {
        return std::array<double, 2>{y[1], detail::h_rhs(s, y[0], params)};
    };
    auto switch_now = [&](double, const std::array<double, 2>& y) {
        return std::fabs(y[0]) >= options.switch_level && y[0] * y[1] > 0.0;
    };
    ode::Options opt = options.ode;
    if (opt.h_init == 0.0) opt.h_init = 1e-3 * s0;
    const auto phase1 = ode::integrate<2>(rhs, s0, {start.h, start.hp}, s_cap, opt, switch_now);
    for (const auto& smp : phase1.samples) out.points.push_back({smp.t, smp.y[0], smp.y[1]});

    if (phase1.stop == ode::Stop::step_underflow) {
        const double last = phase1.samples.back().t;
        out.s_star = 0.5 * (last + phase1.t_fail);
        out.s_star_width = phase1.t_fail - last;
        return out;
    }
    if (phase1.stop != ode::Stop::event) return out;

    // Phase 2: X = sigma h increases monotonically to blowup_level; state (s, h').
    const auto& last = phase1.samples.back();
    const double sigma = last.y[0] > 0.0 ? 1.0 : -1.0;
    auto swapped = [&](double x, const std::array<double, 2>& y) {
        const double hval = sigma * x;
        const double q = y[1];
        return std::array<double, 2>{sigma / q, sigma * detail::h_rhs(y[0], hval, params) / q};
    };
    ode::Options opt2 = options.ode;
    opt2.h_init = 1e-3 * std::fabs(last.y[0]);
    opt2.h_min = options.ode.h_min * std::fabs(last.y[0]);
    const auto phase2 =
        ode::integrate<2>(swapped, sigma * last.y[0], {last.t, last.y[1]}, options.blowup_level, opt2);
    for (std::size_t k = 1; k < phase2.samples.size(); ++k) {
        const auto& smp = phase2.samples[k];
        out.points.push_back({smp.y[0], sigma * smp.t, smp.y[1]});
    }
    const auto& tail = out.points.back();
    // Locally h ~ c (s* - s)^{-2/(p-1)}, so s* - s ~ (2/(p-1)) h / h'.
    const double gap = std::fabs(2.0 / (params.p - 1.0) * tail.h / tail.hp);
    out.s_star = tail.s + 0.5 * gap;
    out.s_star_width = gap;
    return out;
}

/// Cubic Hermite interpolation of h at s inside the sampled range.
inline double h_at(const HSolution& sol, double s) {
    const auto& pts = sol.points;
    auto it = std::lower_bound(pts.begin(), pts.end(), s, [](const auto& a, double x) { return a.s < x; });
    if (it == pts.begin()) return pts.front().h;
    if (it == pts.end()) return pts.back().h;
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double dt = b.s - a.s;
    const double u = (s - a.s) / dt;
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
    const double h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u);
    const double h11 = u * u * (u - 1);
    return h00 * a.h + h10 * dt * a.hp + h01 * b.h + h11 * dt * b.hp;
}

inline StationarySolution z_from_h(const HSolution& hsol) {
    require(!hsol.points.empty(), ErrorCode::PreconditionViolated, "empty h solution");
    StationarySolution out{hsol.params, hsol.ell, {}, 0.0, 0.0};
    out.points.reserve(hsol.points.size());
    for (auto it = hsol.points.rbegin(); it != hsol.points.rend(); ++it) {
        out.points.push_back({1.0 / it->s, it->h, -it->s * it->s * it->hp});
    }
    if (hsol.s_star) out.R_ell = 1.0 / *hsol.s_star;
    const double half = 0.5 * out.r_outer();
    for (const auto& pt : out.points) {
        if (pt.r >= half) out.asymptotic_defect = std::max(out.asymptotic_defect, pt.r * pt.r * std::fabs(pt.r * pt.z - hsol.ell));
    }
    return out;
}

/// Full pipeline with the s0 halving loop.
inline HSolution solve_h(double ell, const Params& params, StationaryOptions options = {}) {
    detail::require_ell(ell);
    while (series_defect(ell, options.s0, params) > 1e-6) options.s0 *= 0.5;
    return integrate_h(ell, params, options.s0, options.s_cap, options);
}

inline StationarySolution compute_stationary(double ell, const Params& params, const StationaryOptions& options = {}) {
    return z_from_h(solve_h(ell, params, options));
}

/// Z_ell(r) through the interpolated h; r must lie in the sampled range.
inline double z_at(const HSolution& sol, double r) { return h_at(sol, 1.0 / r); }

struct ScalingDefects {
    double max_pointwise_defect;
    double radius_ratio_defect;
};

/// Compares Z_ell with the rescaled branch lambda^{2/(p-1)} Z_1(lambda r),
/// lambda = |ell|^{-(p-1)/(p-3)} (sign flipped for ell < 0), on [r_lo, r_hi].
inline ScalingDefects scaling_check(double ell, const Params& params, double r_lo, double r_hi,
                                    const StationaryOptions& options = {}) {
    detail::require_ell(ell);
    const double p = params.p;
    const double lambda = std::pow(std::fabs(ell), -(p - 1.0) / (p - 3.0));
    const double amp = (ell > 0.0 ? 1.0 : -1.0) * std::pow(lambda, 2.0 / (p - 1.0));
    const HSolution direct = solve_h(ell, params, options);
    const HSolution unit = solve_h(1.0, params, options);

    double worst = 0.0;
    for (const auto& pt : direct.points) {
        const double r = 1.0 / pt.s;
        if (r < r_lo || r > r_hi) continue;
        const double scaled = amp * z_at(unit, lambda * r);
        worst = std::max(worst, std::fabs(pt.h - scaled) / std::fabs(pt.h));
    }
    double ratio = 0.0;
    if (direct.s_star && unit.s_star) {
        const double R_ell = 1.0 / *direct.s_star;
        const double R_1 = 1.0 / *unit.s_star;
        ratio = std::fabs(R_ell * lambda / R_1 - 1.0);
    } else if (direct.s_star.has_value() != unit.s_star.has_value()) {
        ratio = std::numeric_limits<double>::infinity();
    }
    return ScalingDefects{worst, ratio};
}

/// int_eps^1 r^m |Z'|^m dr, written in s as int_1^{1/eps} s^{m-2} |h'|^m ds.
inline double derivative_mass(const HSolution& sol, double eps) {
    const double m = sol.params.m;
    double sum = 0.0;
    const auto& pts = sol.points;
    auto g = [&](const HSolution::Point& pt) { return std::pow(pt.s, m - 2.0) * abs_power(pt.hp, m); };
    for (std::size_t k = 1; k < pts.size(); ++k) {
        const double a = std::max(pts[k - 1].s, 1.0);
        const double b = std::min(pts[k].s, 1.0 / eps);
        if (b <= a) continue;
        const double frac = (b - a) / (pts[k].s - pts[k - 1].s);
        sum += 0.5 * (g(pts[k - 1]) + g(pts[k])) * (pts[k].s - pts[k - 1].s) * frac;
    }
    return sum;
}

} // namespace rwl
