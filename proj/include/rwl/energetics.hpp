#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

#include "rwl/grid.hpp"

namespace rwl {

/// Integration measure for the weighted Lebesgue norms: dr on the half-line,
/// or the radial form 4 pi r^2 dr of Lebesgue measure on R^3.
enum class Measure { line, space };

enum class HardyMode { position, derivative };

struct EnergyBreakdown {
    double e_m = 0.0;        ///< L^m generalized energy
    double gradient = 0.0;   ///< (1/2) int |grad w|^2 dx
    double kinetic = 0.0;    ///< (1/2) int |w_t|^2 dx
    double e_2 = 0.0;        ///< gradient + kinetic
    double potential = 0.0;  ///< -iota/(p+1) int |w|^{p+1} dx
    double total_nonlinear = 0.0;
};

namespace detail {

inline SampledFunction generalized_density(const RadialState& state) {
    const double m = state.params.m;
    const SampledFunction dv = differentiate(state.v());
    const SampledFunction vt = state.vt();
    SampledFunction g(state.grid);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = abs_power(dv[i], m) + abs_power(vt[i], m);
    return g;
}

inline double integrate(const SampledFunction& g, double a, double b) {
    return integrate_nodal(g.values(), 0.0, g.grid().h(), a, b);
}

/// r^e with r^0 = 1 and a singular origin reported as infinity.
inline double radial_weight(double r, double e) {
    if (e == 0.0) return 1.0;
    if (r == 0.0) return e > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::pow(r, e);
}

} // namespace detail

/// E_m = int_0^{r_max} |d_r(rw)|^m + |d_t(rw)|^m dr.
inline double generalized_energy(const RadialState& state) {
    return detail::integrate(detail::generalized_density(state), 0.0, state.grid.r_max());
}

/// E_{m,R}(t): the generalized energy on r >= R + |t|.
inline double exterior_generalized_energy(const RadialState& state, double R) {
    require(R >= 0.0, ErrorCode::NegativeRadius, "R must be nonnegative");
    const double from = R + std::fabs(state.time);
    require(from <= state.grid.r_max() * (1.0 + 1e-14), ErrorCode::ConeLeftDomain, "R + |t| exceeds r_max");
    return detail::integrate(detail::generalized_density(state), std::min(from, state.grid.r_max()),
                             state.grid.r_max());
}

/// ||r^a f||_{L^q} over [0, r_max] for the chosen measure.
inline double weighted_norm(const SampledFunction& f, double a, double q, Measure measure = Measure::line) {
    const auto& grid = f.grid();
    const double e = a * q + (measure == Measure::space ? 2.0 : 0.0);
    SampledFunction g(grid);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double fq = abs_power(f[i], q);
        g[i] = fq == 0.0 ? 0.0 : detail::radial_weight(grid.node(i), e) * fq;
    }
    const double factor = measure == Measure::space ? 4.0 * std::numbers::pi : 1.0;
    return std::pow(factor * detail::integrate(g, 0.0, grid.r_max()), 1.0 / q);
}

inline double lebesgue_norm(const SampledFunction& f, double q, Measure measure = Measure::line) {
    return weighted_norm(f, 0.0, q, measure);
}

/// ||r^{1-2/m} phi||_{L^m} (position) or ||r^{1-2/m} d_r phi||_{L^m} (derivative).
inline double hardy_weighted_norm(const SampledFunction& phi, HardyMode mode, double m,
                                  Measure measure = Measure::line) {
    require(m > 2.0, ErrorCode::SubcriticalExponent, "Hardy weights need m > 2");
    const double a = 1.0 - 2.0 / m;
    if (mode == HardyMode::position) return weighted_norm(phi, a, m, measure);
    return weighted_norm(differentiate(phi), a, m, measure);
}

struct Sides {
    double lhs;
    double rhs;
};

/// Both sides of the equivalence
///   int_R r^m |phi'|^m dr  ~  int_R |(r phi)'|^m dr + R |phi(R)|^m.
inline Sides utov_sides(const SampledFunction& phi, double R, double m) {
    const auto& grid = phi.grid();
    require(R >= 0.0 && R < grid.r_max(), ErrorCode::BadRadius, "need 0 <= R < r_max");
    const SampledFunction dphi = differentiate(phi);
    SampledFunction rphi(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) rphi[i] = grid.node(i) * phi[i];
    const SampledFunction drphi = differentiate(rphi);

    SampledFunction left(grid);
    SampledFunction right(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid.node(i);
        left[i] = abs_power(r * dphi[i], m);
        right[i] = abs_power(drphi[i], m);
    }
    const double boundary = R > 0.0 ? R * abs_power(interpolate(phi, R), m) : 0.0;
    return Sides{detail::integrate(left, R, grid.r_max()), detail::integrate(right, R, grid.r_max()) + boundary};
}

/// Sides of int_R |phi|^m dr + R |phi(R)|^m  <=  C int_R r^m |phi'|^m dr.
/// Hoelder plus Young give C = m^m.
inline Sides hardy_exterior_sides(const SampledFunction& phi, double R, double m) {
    const auto& grid = phi.grid();
    require(R >= 0.0 && R < grid.r_max(), ErrorCode::BadRadius, "need 0 <= R < r_max");
    const SampledFunction dphi = differentiate(phi);
    SampledFunction left(grid);
    SampledFunction right(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        left[i] = abs_power(phi[i], m);
        right[i] = abs_power(grid.node(i) * dphi[i], m);
    }
    const double boundary = R > 0.0 ? R * abs_power(interpolate(phi, R), m) : 0.0;
    return Sides{detail::integrate(left, R, grid.r_max()) + boundary, detail::integrate(right, R, grid.r_max())};
}

namespace detail {
inline std::mutex& fftw_planner_mutex() {
    static std::mutex mutex;
    return mutex;
}

inline std::size_t next_power_of_two(std::size_t x) {
    std::size_t p = 1;
    while (p < x) p <<= 1;
    return p;
}
} // namespace detail

/// Homogeneous Sobolev norm of a radial function on R^3, computed on the
/// line through the odd extension r phi(r):
///   ||phi||_{H^s(R^3)}^2 = int_R |xi|^{2s} |F[r phi](xi)|^2 dxi.
/// The transform is a sine transform (DST-I) of the tapered, zero-padded samples.
inline double sobolev_norm_radial(const SampledFunction& phi, double s) {
    require(s >= 0.0 && s < 1.5, ErrorCode::PreconditionViolated, "need 0 <= s < 3/2");
    const auto& grid = phi.grid();
    const std::size_t n = grid.n();
    const double h = grid.h();
    const double r_max = grid.r_max();

    double peak = 0.0;
    for (std::size_t i = 0; i <= n; ++i) peak = std::max(peak, std::fabs(grid.node(i) * phi[i]));
    if (peak == 0.0) return 0.0;
    require(std::fabs(phi[n]) * r_max <= 1e-6 * peak, ErrorCode::DecayViolated,
            "r phi(r) does not decay at r_max");

    const std::size_t total = detail::next_power_of_two(4 * n);  // M + 1, the logical half-period
    const std::size_t M = total - 1;
    std::vector<double> in(M, 0.0);
    std::vector<double> out(M, 0.0);
    const double taper_start = 0.9 * r_max;
    for (std::size_t i = 1; i <= n; ++i) {
        const double r = grid.node(i);
        double taper = 1.0;
        if (r > taper_start) taper = 0.5 * (1.0 + std::cos(std::numbers::pi * (r - taper_start) / (0.1 * r_max)));
        in[i - 1] = r * phi[i] * taper;
    }

    fftw_plan plan;
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        plan = fftw_plan_r2r_1d(static_cast<int>(M), in.data(), out.data(), FFTW_RODFT00, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }

    const double dxi = std::numbers::pi / (static_cast<double>(total) * h);
    double sum = 0.0;
    for (std::size_t k = 0; k < M; ++k) {
        const double xi = static_cast<double>(k + 1) * dxi;
        sum += std::pow(xi, 2.0 * s) * out[k] * out[k];
    }
    return std::sqrt(2.0 * h * h * sum * dxi);
}

/// 1/2 int |grad w|^2 + 1/2 int |w_t|^2 - iota/(p+1) int |w|^{p+1}, all over R^3.
inline EnergyBreakdown nonlinear_energy(const RadialState& state) {
    const auto& grid = state.grid;
    const double p = state.params.p;
    const SampledFunction dw = differentiate(state.w);
    SampledFunction grad(grid);
    SampledFunction kin(grid);
    SampledFunction pot(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r2 = grid.node(i) * grid.node(i);
        grad[i] = r2 * dw[i] * dw[i];
        kin[i] = r2 * state.wt[i] * state.wt[i];
        pot[i] = r2 * abs_power(state.w[i], p + 1.0);
    }
    const double four_pi = 4.0 * std::numbers::pi;
    EnergyBreakdown e;
    e.e_m = generalized_energy(state);
    e.gradient = 0.5 * four_pi * detail::integrate(grad, 0.0, grid.r_max());
    e.kinetic = 0.5 * four_pi * detail::integrate(kin, 0.0, grid.r_max());
    e.e_2 = e.gradient + e.kinetic;
    e.potential = -as_real(state.params.iota) / (p + 1.0) * four_pi * detail::integrate(pot, 0.0, grid.r_max());
    e.total_nonlinear = e.e_2 + e.potential;
    return e;
}

/// Pointwise density r^m |d_r w|^m + r^m |d_t w|^m + |w|^m of the weighted
/// L^m mass ||r^{1-2/m} d_{r,t} w||^m + ||r^{-2/m} w||^m over R^3 (without 4 pi).
inline SampledFunction weighted_mass_density(const RadialState& state) {
    const double m = state.params.m;
    const auto& grid = state.grid;
    const SampledFunction dw = differentiate(state.w);
    SampledFunction g(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid.node(i);
        g[i] = abs_power(r * dw[i], m) + abs_power(r * state.wt[i], m) + abs_power(state.w[i], m);
    }
    return g;
}

/// 4 pi times the integral of weighted_mass_density over [a, b].
inline double weighted_mass(const RadialState& state, double a, double b) {
    a = std::clamp(a, 0.0, state.grid.r_max());
    b = std::clamp(b, 0.0, state.grid.r_max());
    return 4.0 * std::numbers::pi * detail::integrate(weighted_mass_density(state), a, b);
}

/// int_{t+R}^{r_max} |r d_r w|^m + |r d_t w|^m dr.
inline double exterior_weighted_energy(const RadialState& state, double R) {
    const double m = state.params.m;
    const auto& grid = state.grid;
    const double from = R + state.time;
    if (from >= grid.r_max()) return 0.0;
    const SampledFunction dw = differentiate(state.w);
    SampledFunction g(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid.node(i);
        g[i] = abs_power(r * dw[i], m) + abs_power(r * state.wt[i], m);
    }
    return detail::integrate(g, std::max(from, 0.0), grid.r_max());
}

} // namespace rwl
