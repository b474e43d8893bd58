#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "rwl/grid.hpp"

namespace rwl {

/// One-dimensional profile of a free radial wave: r w(t, r) = f(t + r) - f(t - r).
///
/// f and its derivative fdot are stored on the uniform line grid
/// s_j = (j - N) h, j = 0..2N, so L = N h. Outside [-L, L] fdot is zero and f
/// is continued by its end values.
class FreeWaveProfile {
public:
    FreeWaveProfile(double h, std::vector<double> fdot, std::vector<double> f)
        : h_(h), fdot_(std::move(fdot)), f_(std::move(f)) {
        require(fdot_.size() == f_.size() && fdot_.size() % 2 == 1 && fdot_.size() >= 3, ErrorCode::GridTooSmall,
                "profile needs an odd number (>= 3) of nodes");
        require(h_ > 0.0, ErrorCode::GridTooSmall, "profile spacing must be positive");
    }

    double h() const { return h_; }
    std::size_t half_nodes() const { return fdot_.size() / 2; }
    double L() const { return static_cast<double>(half_nodes()) * h_; }
    double node(std::size_t j) const {
        return (static_cast<double>(j) - static_cast<double>(half_nodes())) * h_;
    }
    std::span<const double> fdot() const { return fdot_; }
    std::span<const double> f() const { return f_; }

    double fdot_at(double s) const {
        if (s < -L() || s > L()) return 0.0;
        return detail::interpolate_uniform(fdot_, -L(), h_, s);
    }
    double f_at(double s) const { return detail::interpolate_uniform(f_, -L(), h_, s); }

private:
    double h_;
    std::vector<double> fdot_;
    std::vector<double> f_;
};

/// Profile from samples of fdot on s_j = (j - N) h; f is the cumulative
/// trapezoid antiderivative normalised by f(0) = 0.
inline FreeWaveProfile profile_from_fdot(std::vector<double> fdot, double h) {
    require(fdot.size() % 2 == 1, ErrorCode::GridTooSmall, "fdot needs an odd number of nodes");
    const std::size_t mid = fdot.size() / 2;
    std::vector<double> f(fdot.size(), 0.0);
    for (std::size_t j = mid + 1; j < fdot.size(); ++j) f[j] = f[j - 1] + 0.5 * h * (fdot[j - 1] + fdot[j]);
    for (std::size_t j = mid; j-- > 0;) f[j] = f[j + 1] - 0.5 * h * (fdot[j] + fdot[j + 1]);
    return FreeWaveProfile(h, std::move(fdot), std::move(f));
}

/// Profile of the free wave with data (w0, w1) = (state.w, state.wt), on [-L, L].
inline FreeWaveProfile build_free_profile(const RadialState& data, double L) {
    const auto& grid = data.grid;
    require(L >= grid.r_max() * (1.0 - 1e-12), ErrorCode::DomainTooSmall, "profile half-width must cover r_max");
    const double h = grid.h();
    const std::size_t N = std::max<std::size_t>(grid.n(), static_cast<std::size_t>(std::ceil(L / h - 1e-9)));
    const SampledFunction v = data.v();
    const SampledFunction rw1 = data.vt();
    const SampledFunction dv = differentiate(v);
    const SampledFunction integral = antiderivative(rw1);

    std::vector<double> fdot(2 * N + 1, 0.0);
    std::vector<double> f(2 * N + 1, 0.0);
    for (std::size_t i = 0; i <= grid.n(); ++i) {
        fdot[N + i] = 0.5 * (dv[i] + rw1[i]);
        fdot[N - i] = 0.5 * (dv[i] - rw1[i]);
        f[N + i] = 0.5 * v[i] + 0.5 * integral[i];
        f[N - i] = -0.5 * v[i] + 0.5 * integral[i];
    }
    for (std::size_t i = grid.n() + 1; i <= N; ++i) {
        f[N + i] = f[N + grid.n()];
        f[N - i] = f[N - grid.n()];
    }
    return FreeWaveProfile(h, std::move(fdot), std::move(f));
}

namespace detail {
inline void require_causal_window(const FreeWaveProfile& profile, double t, const RadialGrid& grid) {
    require(std::fabs(t) + grid.r_max() <= profile.L() * (1.0 + 1e-12), ErrorCode::CausalWindowExceeded,
            "|t| + r_max exceeds the profile half-width");
}
} // namespace detail

/// d(rw)/dr and d(rw)/dt of the free wave, sampled on the radial grid.
struct ReducedDerivatives {
    SampledFunction dr;
    SampledFunction dt;
};

inline ReducedDerivatives reduced_derivatives(const FreeWaveProfile& profile, double t, const RadialGrid& grid) {
    detail::require_causal_window(profile, t, grid);
    ReducedDerivatives out{SampledFunction(grid), SampledFunction(grid)};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid.node(i);
        const double plus = profile.fdot_at(t + r);
        const double minus = profile.fdot_at(t - r);
        out.dr[i] = plus + minus;
        out.dt[i] = plus - minus;
    }
    return out;
}

/// Free evolution at time t through the profile.
inline RadialState eval_linear(const FreeWaveProfile& profile, const Params& params, double t,
                               const RadialGrid& grid) {
    detail::require_causal_window(profile, t, grid);
    SampledFunction v(grid);
    SampledFunction vt(grid);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double r = grid.node(i);
        v[i] = profile.f_at(t + r) - profile.f_at(t - r);
        vt[i] = profile.fdot_at(t + r) - profile.fdot_at(t - r);
    }
    return state_from_reduced(params, v, vt, t);
}

/// Integral of |fdot|^m over [a, b], -L <= a <= b <= L.
inline double profile_mass(const FreeWaveProfile& profile, double m, double a, double b) {
    const double L = profile.L();
    const double slack = 1e-12 * L;
    require(a <= b && a >= -L - slack && b <= L + slack, ErrorCode::BadInterval, "need -L <= a <= b <= L");
    std::vector<double> g(profile.fdot().size());
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = abs_power(profile.fdot()[j], m);
    return detail::integrate_nodal(g, -L, profile.h(), std::max(a, -L), std::min(b, L));
}

inline double full_line_mass(const FreeWaveProfile& profile, double m) {
    return profile_mass(profile, m, -profile.L(), profile.L());
}

/// Surrogate of the exterior energy outside the cone r >= R + |t|, in terms
/// of fdot alone.
inline double exterior_surrogate(const FreeWaveProfile& profile, double m, double R, double t) {
    require(R >= 0.0, ErrorCode::NegativeRadius, "R must be nonnegative");
    const double L = profile.L();
    auto clipped = [&](double a, double b) {
        a = std::max(a, -L);
        b = std::min(b, L);
        return a < b ? profile_mass(profile, m, a, b) : 0.0;
    };
    if (t >= 0.0) return clipped(-L, -R) + clipped(R + 2.0 * t, L);
    return clipped(R, L) + clipped(-L, 2.0 * t - R);
}

/// Integral over r in [0, r_max] of |fdot(t + r)|^m + |fdot(t - r)|^m. Equal
/// to the full-line mass whenever the shifted support stays inside the grid.
inline double shifted_mass(const FreeWaveProfile& profile, double m, double t, const RadialGrid& grid) {
    const auto d = reduced_derivatives(profile, t, grid);
    SampledFunction g(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        g[i] = abs_power(0.5 * (d.dr[i] + d.dt[i]), m) + abs_power(0.5 * (d.dr[i] - d.dt[i]), m);
    }
    return detail::integrate_nodal(g.values(), 0.0, grid.h(), 0.0, grid.r_max());
}

/// Generalized energy written through the profile: the integral over [0, r_max]
/// of |fdot(t + r) + fdot(t - r)|^m + |fdot(t + r) - fdot(t - r)|^m.
inline double profile_energy(const FreeWaveProfile& profile, double m, double t, const RadialGrid& grid,
                             double from = 0.0) {
    const auto d = reduced_derivatives(profile, t, grid);
    SampledFunction g(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) g[i] = abs_power(d.dr[i], m) + abs_power(d.dt[i], m);
    return detail::integrate_nodal(g.values(), 0.0, grid.h(), from, grid.r_max());
}

} // namespace rwl
