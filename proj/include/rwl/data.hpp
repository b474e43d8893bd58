#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "rwl/grid.hpp"
#include "rwl/random.hpp"

namespace rwl {

enum class Family { zero, gaussian, bump_sum, plateau, samples };

constexpr std::string_view to_string(Family f) {
    switch (f) {
    case Family::zero: return "zero";
    case Family::gaussian: return "gaussian";
    case Family::bump_sum: return "bump_sum";
    case Family::plateau: return "plateau";
    case Family::samples: return "samples";
    }
    return "zero";
}

inline Family family_from_string(std::string_view name) {
    for (Family f : {Family::zero, Family::gaussian, Family::bump_sum, Family::plateau, Family::samples}) {
        if (to_string(f) == name) return f;
    }
    throw Error(ErrorCode::ConfigError, "unknown data family '" + std::string(name) + "'");
}

/// Initial data description.
///   gaussian:  w0 = amplitude exp(-((r - center)/width)^2), w1 = velocity exp(-((r - center)/width)^2)
///   bump_sum:  seeded sums of bumps supported in [0, support] (see random_bump_sum)
///   plateau:   w0 = amplitude on [0, rho - 1], quintic taper to 0 on [rho - 1, rho], w1 = 0
///   samples:   CSV file with header r,w0,w1, linearly interpolated, 0 beyond the last row
struct DataSpec {
    Family family = Family::gaussian;
    double amplitude = 1.0;
    double width = 1.0;
    double center = 0.0;
    double velocity = 0.0;
    double rho = 3.0;
    double support = 3.0;
    int bumps_min = 3;
    int bumps_max = 6;
    std::uint64_t seed = 0;
    std::string path;

    friend bool operator==(const DataSpec&, const DataSpec&) = default;
};

/// exp(1 - 1/(1 - x^2)) on |x| < 1, zero outside; peak value 1 at x = 0.
inline double bump(double x) {
    const double q = 1.0 - x * x;
    if (q <= 0.0) return 0.0;
    return std::exp(1.0 - 1.0 / q);
}

/// 0 below 0, 1 above 1, C^2 quintic in between.
inline double smoothstep5(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

struct Bump {
    double center;
    double width;
    double amplitude;
};

struct BumpSum {
    std::vector<Bump> position;
    std::vector<Bump> velocity;

    static double eval(const std::vector<Bump>& bumps, double r) {
        double sum = 0.0;
        for (const auto& b : bumps) sum += b.amplitude * bump((r - b.center) / b.width);
        return sum;
    }
    double w0(double r) const { return eval(position, r); }
    double w1(double r) const { return eval(velocity, r); }
};

/// Draws k in [k_min, k_max] bumps for each component. Each bump has
/// half-width in [0.2, 0.6] * support / 3, center in [0, support - half-width]
/// and amplitude in [-1, 1], so the data vanish for r >= support.
inline std::vector<Bump> random_bumps(SplitMix64& rng, double support, int k_min, int k_max) {
    const int k = rng.integer(k_min, k_max);
    std::vector<Bump> out;
    out.reserve(static_cast<std::size_t>(k));
    const double unit = support / 3.0;
    for (int j = 0; j < k; ++j) {
        const double width = rng.uniform(0.2, 0.6) * unit;
        const double center = rng.uniform(0.0, support - width);
        const double amplitude = rng.uniform(-1.0, 1.0);
        out.push_back({center, width, amplitude});
    }
    return out;
}

inline BumpSum random_bump_sum(SplitMix64& rng, double support, int k_min = 3, int k_max = 6) {
    BumpSum out;
    out.position = random_bumps(rng, support, k_min, k_max);
    out.velocity = random_bumps(rng, support, k_min, k_max);
    return out;
}

namespace detail {

inline std::vector<std::array<double, 3>> read_samples(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::IoError, "cannot open samples file '" + path + "'");
    std::vector<std::array<double, 3>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (lineno == 1 && !line.empty() && (std::isalpha(static_cast<unsigned char>(line[0])) != 0)) continue;
        std::array<double, 3> row{};
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (std::size_t c = 0; c < 3; ++c) {
            while (p < end && (*p == ' ' || *p == '\t')) ++p;
            auto [next, ec] = std::from_chars(p, end, row[c]);
            require(ec == std::errc(), ErrorCode::ConfigError,
                    path + ":" + std::to_string(lineno) + ": expected three numbers r,w0,w1");
            p = next;
            while (p < end && (*p == ' ' || *p == '\t')) ++p;
            if (c < 2) {
                require(p < end && *p == ',', ErrorCode::ConfigError,
                        path + ":" + std::to_string(lineno) + ": expected ','");
                ++p;
            }
        }
        require(rows.empty() || row[0] > rows.back()[0], ErrorCode::ConfigError,
                path + ":" + std::to_string(lineno) + ": radii must increase");
        rows.push_back(row);
    }
    require(rows.size() >= 2, ErrorCode::ConfigError, path + ": need at least two rows");
    return rows;
}

inline double interpolate_rows(const std::vector<std::array<double, 3>>& rows, double r, std::size_t col) {
    if (r < rows.front()[0]) return rows.front()[col];
    if (r > rows.back()[0]) return 0.0;
    std::size_t lo = 0;
    std::size_t hi = rows.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        (rows[mid][0] <= r ? lo : hi) = mid;
    }
    const double theta = (r - rows[lo][0]) / (rows[hi][0] - rows[lo][0]);
    return (1.0 - theta) * rows[lo][col] + theta * rows[hi][col];
}

} // namespace detail

/// Samples the data family on the grid at time 0.
inline RadialState make_data(const DataSpec& spec, const Params& params, const RadialGrid& grid) {
    SampledFunction w0(grid);
    SampledFunction w1(grid);
    switch (spec.family) {
    case Family::zero: break;
    case Family::gaussian:
        require(spec.width > 0.0, ErrorCode::ConfigError, "gaussian width must be positive");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double x = (grid.node(i) - spec.center) / spec.width;
            const double g = std::exp(-x * x);
            w0[i] = spec.amplitude * g;
            w1[i] = spec.velocity * g;
        }
        break;
    case Family::bump_sum: {
        require(spec.bumps_min >= 1 && spec.bumps_max >= spec.bumps_min, ErrorCode::ConfigError,
                "need 1 <= bumps_min <= bumps_max");
        SplitMix64 rng(spec.seed);
        const BumpSum sum = random_bump_sum(rng, spec.support, spec.bumps_min, spec.bumps_max);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            w0[i] = spec.amplitude * sum.w0(grid.node(i));
            w1[i] = spec.amplitude * sum.w1(grid.node(i));
        }
        break;
    }
    case Family::plateau:
        require(spec.rho >= 1.0, ErrorCode::ConfigError, "plateau needs rho >= 1");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            w0[i] = spec.amplitude * (1.0 - smoothstep5(grid.node(i) - (spec.rho - 1.0)));
        }
        break;
    case Family::samples: {
        const auto rows = detail::read_samples(spec.path);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            w0[i] = detail::interpolate_rows(rows, grid.node(i), 1);
            w1[i] = detail::interpolate_rows(rows, grid.node(i), 2);
        }
        break;
    }
    }
    return RadialState(params, grid, std::move(w0), std::move(w1), 0.0);
}

/// Radial profile phi(r / scale) of the position component of a seeded bump sum.
inline SampledFunction random_smooth_function(std::uint64_t seed, const RadialGrid& grid, double support,
                                              double scale = 1.0) {
    SplitMix64 rng(seed);
    const BumpSum sum = random_bump_sum(rng, support);
    return sample(grid, [&](double r) { return sum.w0(r / scale); });
}

} // namespace rwl
