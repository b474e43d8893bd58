#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "rwl/error.hpp"
#include "rwl/model.hpp"

namespace rwl {

/// Uniform radial grid r_i = i h, i = 0..n, with h = r_max / n.
class RadialGrid {
public:
    RadialGrid(double r_max, std::size_t n) : r_max_(r_max), n_(n), h_(r_max / static_cast<double>(n)) {
        require(n >= 16, ErrorCode::GridTooSmall, "radial grid needs n >= 16");
        require(r_max > 0.0 && std::isfinite(r_max), ErrorCode::BadInterval, "r_max must be positive");
    }

    double r_max() const { return r_max_; }
    std::size_t n() const { return n_; }
    std::size_t size() const { return n_ + 1; }
    double h() const { return h_; }
    double node(std::size_t i) const { return i == n_ ? r_max_ : static_cast<double>(i) * h_; }

    friend bool operator==(const RadialGrid&, const RadialGrid&) = default;

private:
    double r_max_;
    std::size_t n_;
    double h_;
};

/// Nodal values of a radial function on a RadialGrid.
class SampledFunction {
public:
    SampledFunction(RadialGrid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
        require(values_.size() == grid_.size(), ErrorCode::GridTooSmall, "sample count must be n + 1");
    }

    explicit SampledFunction(RadialGrid grid) : grid_(grid), values_(grid.size(), 0.0) {}

    const RadialGrid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    std::size_t size() const { return values_.size(); }

    bool all_finite() const {
        return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
    }

private:
    RadialGrid grid_;
    std::vector<double> values_;
};

inline SampledFunction sample(const RadialGrid& grid, const std::function<double(double)>& fn) {
    SampledFunction out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = fn(grid.node(i));
    return out;
}

namespace detail {

/// Linear interpolation on nodes x_j = x0 + j h; arguments outside the node
/// range are clamped to the end cells.
inline double interpolate_uniform(std::span<const double> g, double x0, double h, double x) {
    const std::size_t last = g.size() - 1;
    double u = (x - x0) / h;
    u = std::clamp(u, 0.0, static_cast<double>(last));
    std::size_t i = static_cast<std::size_t>(std::floor(u));
    if (i >= last) i = last - 1;
    const double theta = u - static_cast<double>(i);
    return (1.0 - theta) * g[i] + theta * g[i + 1];
}

/// Trapezoid rule for the piecewise-linear interpolant of g over [a, b]
/// (x0 <= a <= b <= last node); off-grid endpoints use interpolated values.
inline double integrate_nodal(std::span<const double> g, double x0, double h, double a, double b) {
    if (!(b > a)) return 0.0;
    const std::size_t last = g.size() - 1;
    auto cell_of = [&](double x) {
        double u = std::clamp((x - x0) / h, 0.0, static_cast<double>(last));
        std::size_t i = static_cast<std::size_t>(std::floor(u));
        return std::min(i, last - 1);
    };
    auto node = [&](std::size_t j) { return x0 + static_cast<double>(j) * h; };
    const std::size_t ia = cell_of(a);
    const std::size_t ib = cell_of(b);
    const double ga = interpolate_uniform(g, x0, h, a);
    const double gb = interpolate_uniform(g, x0, h, b);
    if (ia == ib) return 0.5 * (ga + gb) * (b - a);
    double sum = 0.5 * (ga + g[ia + 1]) * (node(ia + 1) - a);
    for (std::size_t j = ia + 1; j < ib; ++j) sum += 0.5 * (g[j] + g[j + 1]) * h;
    sum += 0.5 * (g[ib] + gb) * (b - node(ib));
    return sum;
}

/// Value at the origin of the quadratic through nodes 1, 2, 3.
inline double extrapolate_to_origin(double y1, double y2, double y3) { return 3.0 * y1 - 3.0 * y2 + y3; }

} // namespace detail

inline double interpolate(const SampledFunction& f, double r) {
    return detail::interpolate_uniform(f.values(), 0.0, f.grid().h(), r);
}

/// Second-order centered differences inside, second-order one-sided at both ends.
inline SampledFunction differentiate(const SampledFunction& f) {
    const auto& grid = f.grid();
    const std::size_t n = grid.n();
    require(n >= 4, ErrorCode::GridTooSmall, "differentiate needs n >= 4");
    const double h = grid.h();
    SampledFunction d(grid);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for (std::size_t i = 1; i < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d[n] = (3.0 * f[n] - 4.0 * f[n - 1] + f[n - 2]) / (2.0 * h);
    return d;
}

/// Trapezoid approximation of the integral of |f|^m over [a, b].
inline double integrate_power(const SampledFunction& f, double m, double a, double b) {
    const auto& grid = f.grid();
    require(a >= 0.0 && a <= b && b <= grid.r_max() * (1.0 + 1e-14), ErrorCode::BadInterval,
            "need 0 <= a <= b <= r_max");
    std::vector<double> g(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) g[i] = abs_power(f[i], m);
    return detail::integrate_nodal(g, 0.0, grid.h(), a, std::min(b, grid.r_max()));
}

/// Cumulative trapezoid antiderivative vanishing at r = 0.
inline SampledFunction antiderivative(const SampledFunction& f) {
    SampledFunction out(f.grid());
    const double h = f.grid().h();
    for (std::size_t i = 1; i < f.size(); ++i) out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
    return out;
}

/// Snapshot (w, w_t) of a radial solution at a given time.
struct RadialState {
    Params params;
    RadialGrid grid;
    SampledFunction w;
    SampledFunction wt;
    double time = 0.0;

    RadialState(Params p, RadialGrid g, SampledFunction w0, SampledFunction w1, double t = 0.0)
        : params(p), grid(g), w(std::move(w0)), wt(std::move(w1)), time(t) {
        require(w.grid() == grid && wt.grid() == grid, ErrorCode::GridTooSmall, "state fields must share the grid");
    }

    /// Reduced field v = r w; v(0) = 0 exactly.
    SampledFunction v() const { return times_r(w); }
    SampledFunction vt() const { return times_r(wt); }

private:
    SampledFunction times_r(const SampledFunction& f) const {
        SampledFunction out(grid);
        for (std::size_t i = 1; i < grid.size(); ++i) out[i] = grid.node(i) * f[i];
        return out;
    }
};

/// Recovers w = v / r with the origin value extrapolated from nodes 1..3.
inline SampledFunction divide_by_r(const SampledFunction& v) {
    const auto& grid = v.grid();
    SampledFunction w(grid);
    for (std::size_t i = 1; i < grid.size(); ++i) w[i] = v[i] / grid.node(i);
    w[0] = detail::extrapolate_to_origin(w[1], w[2], w[3]);
    return w;
}

inline RadialState state_from_reduced(const Params& params, const SampledFunction& v, const SampledFunction& vt,
                                      double time) {
    return RadialState(params, v.grid(), divide_by_r(v), divide_by_r(vt), time);
}

inline RadialState zero_state(const Params& params, const RadialGrid& grid) {
    return RadialState(params, grid, SampledFunction(grid), SampledFunction(grid), 0.0);
}

} // namespace rwl
