#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace rwl::ode {

/// Controls for the embedded Dormand-Prince 5(4) pair.
struct Options {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_min = 1e-14;
    double h_init = 0.0;  ///< 0 selects 1e-6 of the interval
    double h_max = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 5'000'000;
};

enum class Stop { reached_end, event, step_underflow, max_steps };

template <std::size_t N>
struct Sample {
    double t;
    std::array<double, N> y;
};

template <std::size_t N>
struct Result {
    std::vector<Sample<N>> samples;  ///< every accepted step, starting with the initial point
    Stop stop = Stop::reached_end;
    double t_fail = 0.0;  ///< abscissa of the first failed attempt (underflow) or of the event step
};

namespace detail {

template <std::size_t N>
std::array<double, N> axpy(const std::array<double, N>& y, double h,
                           std::initializer_list<std::pair<double, const std::array<double, N>*>> terms) {
    std::array<double, N> out = y;
    for (const auto& [c, k] : terms) {
        if (c == 0.0) continue;
        for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
    }
    return out;
}

template <std::size_t N>
bool finite(const std::array<double, N>& y) {
    return std::all_of(y.begin(), y.end(), [](double x) { return std::isfinite(x); });
}

} // namespace detail

/// Integrates y' = rhs(t, y) forward from t0 to t_end with local error
/// control. `stop(t, y)` is checked after every accepted step.
template <std::size_t N, class Rhs, class StopPredicate>
Result<N> integrate(Rhs&& rhs, double t0, std::array<double, N> y0, double t_end, const Options& opt,
                    StopPredicate&& stop) {
    using State = std::array<double, N>;
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    Result<N> result;
    double t = t0;
    State y = y0;
    result.samples.push_back({t, y});
    double h = opt.h_init > 0.0 ? opt.h_init : 1e-6 * (t_end - t0);
    State k1 = rhs(t, y);

    for (std::size_t step = 0; step < opt.max_steps; ++step) {
        if (t >= t_end) {
            result.stop = Stop::reached_end;
            return result;
        }
        h = std::min({h, opt.h_max, t_end - t});
        if (h < opt.h_min && t + h < t_end) {
            result.stop = Stop::step_underflow;
            result.t_fail = t + opt.h_min;
            return result;
        }
        const State k2 = rhs(t + c2 * h, detail::axpy<N>(y, h, {{a21, &k1}}));
        const State k3 = rhs(t + c3 * h, detail::axpy<N>(y, h, {{a31, &k1}, {a32, &k2}}));
        const State k4 = rhs(t + c4 * h, detail::axpy<N>(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const State k5 = rhs(t + c5 * h, detail::axpy<N>(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const State k6 =
            rhs(t + h, detail::axpy<N>(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const State y_new = detail::axpy<N>(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const State k7 = rhs(t + h, y_new);

        double err = std::numeric_limits<double>::infinity();
        if (detail::finite(y_new) && detail::finite(k7)) {
            double acc = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                const double scale = opt.atol + opt.rtol * std::max(std::fabs(y[i]), std::fabs(y_new[i]));
                acc += (e / scale) * (e / scale);
            }
            err = std::sqrt(acc / static_cast<double>(N));
        }

        if (err <= 1.0) {
            t += h;
            y = y_new;
            k1 = k7;
            result.samples.push_back({t, y});
            const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            h *= grow;
            if (stop(t, y)) {
                result.stop = Stop::event;
                result.t_fail = t;
                return result;
            }
        } else {
            const double shrink = std::isfinite(err) ? std::clamp(0.9 * std::pow(err, -0.25), 0.1, 0.9) : 0.1;
            const double next = h * shrink;
            if (next < opt.h_min) {
                result.stop = Stop::step_underflow;
                result.t_fail = t + h;
                return result;
            }
            h = next;
        }
    }
    result.stop = Stop::max_steps;
    result.t_fail = t;
    return result;
}

template <std::size_t N, class Rhs>
Result<N> integrate(Rhs&& rhs, double t0, std::array<double, N> y0, double t_end, const Options& opt) {
    return integrate<N>(std::forward<Rhs>(rhs), t0, y0, t_end, opt,
                        [](double, const std::array<double, N>&) { return false; });
}

} // namespace rwl::ode
