#pragma once

#include <cmath>

#include "rwl/error.hpp"

namespace rwl {

/// Sign of the nonlinearity iota |w|^{p-1} w.
enum class Sign : int { focusing = +1, defocusing = -1 };

constexpr double as_real(Sign s) { return static_cast<double>(static_cast<int>(s)); }

/// Exponent bundle shared by every formula: p, iota, m = (p-1)/2 and the
/// critical regularity s_c = 3/2 - 2/(p-1).
struct Params {
    double p;
    Sign iota;
    double m;
    double s_c;

    friend bool operator==(const Params&, const Params&) = default;
};

inline Params make_params(double p, Sign iota) {
    require(std::isfinite(p), ErrorCode::SubcriticalExponent, "p must be finite");
    require(p > 5.0, ErrorCode::SubcriticalExponent, "energy-supercritical regime needs p > 5");
    return Params{p, iota, 0.5 * (p - 1.0), 1.5 - 2.0 / (p - 1.0)};
}

struct ScaleFactors {
    double amplitude;
    double norm;
};

/// Factors of the symmetry w -> lambda^{2/(p-1)} w(lambda t, lambda x): the
/// amplitude multiplier and the (identically 1) factor picked up by the
/// critical Sobolev norm.
inline ScaleFactors rescale_exponents(const Params& params, double lambda) {
    require(lambda > 0.0 && std::isfinite(lambda), ErrorCode::NonpositiveScale,
            "scale lambda must be positive");
    return ScaleFactors{std::pow(lambda, 2.0 / (params.p - 1.0)), 1.0};
}

/// |x|^q for q >= 0, with a multiplication path for small integer q.
inline double abs_power(double x, double q) {
    const double a = std::fabs(x);
    if (q == std::floor(q) && q >= 0.0 && q <= 16.0) {
        double out = 1.0;
        for (int k = 0; k < static_cast<int>(q); ++k) out *= a;
        return out;
    }
    return std::pow(a, q);
}

/// |x|^{q-1} x, the sign-preserving power.
inline double signed_power(double x, double q) {
    return abs_power(x, q - 1.0) * x;
}

} // namespace rwl
