#pragma once

#include "rwl/grid.hpp"

namespace rwl {

enum class CutoffKind { freeze_inside, smooth_exterior, indicator_exterior };

struct CutoffSpec {
    CutoffKind kind;
    double R;
};

/// Smooth exterior cutoff: 0 on [0, 1/4], 1 on [1/2, inf), joined by the
/// quintic with matching value, slope and curvature at both ends.
inline double chi(double x) {
    if (x <= 0.25) return 0.0;
    if (x >= 0.5) return 1.0;
    const double u = 4.0 * x - 1.0;
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

namespace detail {
inline void require_radius(const RadialGrid& grid, double R) {
    require(R > 0.0 && R <= grid.r_max() * (1.0 + 1e-14), ErrorCode::BadRadius, "need 0 < R <= r_max");
}
} // namespace detail

/// T_R: freezes phi at its value phi(R) inside the ball of radius R.
inline SampledFunction truncate_T(const SampledFunction& phi, double R) {
    const auto& grid = phi.grid();
    detail::require_radius(grid, R);
    const double inside = interpolate(phi, R);
    SampledFunction out = phi;
    for (std::size_t i = 0; i < grid.size() && grid.node(i) <= R; ++i) out[i] = inside;
    return out;
}

inline SampledFunction cutoff_chi(const SampledFunction& phi, double R) {
    require(R > 0.0, ErrorCode::BadRadius, "need R > 0");
    SampledFunction out = phi;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= chi(phi.grid().node(i) / R);
    return out;
}

/// Multiplication by the indicator of the open ball B_R.
inline SampledFunction indicator_interior(const SampledFunction& g, double R) {
    require(R > 0.0, ErrorCode::BadRadius, "need R > 0");
    SampledFunction out = g;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (g.grid().node(i) >= R) out[i] = 0.0;
    return out;
}

/// Multiplication by the indicator of R^3 minus B_R.
inline SampledFunction indicator_exterior(const SampledFunction& g, double R) {
    require(R > 0.0, ErrorCode::BadRadius, "need R > 0");
    SampledFunction out = g;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (g.grid().node(i) < R) out[i] = 0.0;
    return out;
}

inline SampledFunction apply_cutoff(const SampledFunction& phi, const CutoffSpec& spec) {
    switch (spec.kind) {
    case CutoffKind::freeze_inside: return truncate_T(phi, spec.R);
    case CutoffKind::smooth_exterior: return cutoff_chi(phi, spec.R);
    case CutoffKind::indicator_exterior: return indicator_exterior(phi, spec.R);
    }
    return phi;
}

/// (T_R w0, 1_{|x| >= R} w1): data that agrees with the input outside B_R.
inline RadialState exterior_data(const RadialState& pair, double R) {
    detail::require_radius(pair.grid, R);
    return RadialState(pair.params, pair.grid, truncate_T(pair.w, R), indicator_exterior(pair.wt, R), pair.time);
}

} // namespace rwl
