#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "rwl/data.hpp"
#include "rwl/energetics.hpp"
#include "rwl/nonlinear.hpp"
#include "rwl/operators.hpp"

using namespace rwl;

namespace {

RadialState gaussian(const Params& p, const RadialGrid& g, double a) {
    return RadialState(p, g, sample(g, [a](double r) { return a * std::exp(-r * r); }), SampledFunction(g));
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::IoError;
}

} // namespace

TEST(Nonlinearity, ReducedForm) {
    const Params p = make_params(7.0, Sign::focusing);
    EXPECT_DOUBLE_EQ(nonlinearity(2.0, 2.0, p), 2.0);
    EXPECT_DOUBLE_EQ(nonlinearity(-1.0, 0.5, p), -0.5 * std::pow(2.0, 7.0));
    EXPECT_EQ(nonlinearity(1.0, 0.0, p), 0.0);
    EXPECT_DOUBLE_EQ(nonlinearity(2.0, 2.0, make_params(7.0, Sign::defocusing)), -2.0);
}

TEST(Evolve, Preconditions) {
    const Params p = make_params(7.0, Sign::focusing);
    const RadialGrid g(8.0, 400);
    const RadialState d = gaussian(p, g, 0.1);
    SolverConfig sc;
    sc.dt_ratio = 1.5;
    EXPECT_EQ(code_of([&] { evolve(d, sc); }), ErrorCode::CFLViolation);
    sc.dt_ratio = 1.0;
    sc.t_end = 4.0;
    EXPECT_EQ(code_of([&] { evolve(d, sc); }), ErrorCode::CausalClosureViolated);
}

TEST(Evolve, ZeroDataStaysZero) {
    const Params p = make_params(7.0, Sign::focusing);
    const RadialGrid g(4.0, 100);
    SolverConfig sc;
    sc.t_end = 2.0;
    sc.record_stride = 10;
    const Trajectory t = evolve(zero_state(p, g), sc);
    EXPECT_EQ(t.status, TrajectoryStatus::completed);
    EXPECT_EQ(t.states.size(), 6u);
    for (const auto& s : t.states)
        for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(s.w[i], 0.0);
    EXPECT_DOUBLE_EQ(t.states.back().time, 2.0);
}

TEST(Evolve, SnapshotTimesIncrease) {
    const Params p = make_params(7.0, Sign::defocusing);
    const RadialGrid g(16.0, 800);
    SolverConfig sc;
    sc.t_end = 3.0;
    sc.dt_ratio = 0.5;
    sc.record_stride = 7;
    const Trajectory t = evolve(gaussian(p, g, 0.5), sc);
    for (std::size_t k = 1; k < t.states.size(); ++k) EXPECT_GT(t.states[k].time, t.states[k - 1].time);
    EXPECT_NEAR(t.states.back().time, 3.0, 1e-12);
}

TEST(Evolve, DefocusingEnergyNearlyConserved) {
    const Params p = make_params(7.0, Sign::defocusing);
    const RadialGrid g(16.0, 3200);
    SolverConfig sc;
    sc.t_end = 8.0;
    sc.record_stride = 100;
    const Trajectory t = evolve(gaussian(p, g, 1.0), sc);
    ASSERT_EQ(t.status, TrajectoryStatus::completed);
    const double e0 = nonlinear_energy(t.states.front()).total_nonlinear;
    for (const auto& s : t.states) EXPECT_NEAR(nonlinear_energy(s).total_nonlinear / e0, 1.0, 2e-3);
}

TEST(Evolve, SecondOrderConvergence) {
    const Params p = make_params(7.0, Sign::defocusing);
    auto at = [&](std::size_t n) {
        const RadialGrid g(12.0, n);
        SolverConfig sc;
        sc.t_end = 2.0;
        sc.dt_ratio = 0.5;
        const Trajectory t = evolve(gaussian(p, g, 1.0), sc);
        return interpolate(t.states.back().w, 1.0);
    };
    const double a = at(600), b = at(1200), c = at(2400);
    EXPECT_NEAR((a - b) / (b - c), 4.0, 0.4);
}

TEST(FiniteSpeed, ExactOutsideCone) {
    for (Sign iota : {Sign::focusing, Sign::defocusing}) {
        const Params p = make_params(7.0, iota);
        const RadialGrid g(12.0, 1200);
        const RadialState d = gaussian(p, g, 0.8);
        SolverConfig sc;
        sc.t_end = 4.0;
        sc.record_stride = 5;
        EXPECT_EQ(check_finite_speed(d, exterior_data(d, 1.0), 1.0, sc), 0.0);
    }
}

TEST(FiniteSpeed, NumericalConeForSmallerCfl) {
    const Params p = make_params(7.0, Sign::focusing);
    const RadialGrid g(12.0, 1200);
    const RadialState d = gaussian(p, g, 0.8);
    const RadialState e = exterior_data(d, 1.0);
    SolverConfig sc;
    sc.t_end = 2.0;
    sc.dt_ratio = 0.5;
    const Trajectory a = evolve(d, sc), b = evolve(e, sc);
    for (std::size_t k = 0; k < a.states.size(); ++k) {
        const double cone = 1.0 + a.states[k].time / sc.dt_ratio;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (g.node(i) >= cone + g.h()) EXPECT_EQ(a.states[k].w[i], b.states[k].w[i]);
    }
}

TEST(FiniteSpeed, RejectsDataDifferingOutside) {
    const Params p = make_params(7.0, Sign::focusing);
    const RadialGrid g(12.0, 600);
    const RadialState d = gaussian(p, g, 0.8);
    SolverConfig sc;
    sc.t_end = 1.0;
    EXPECT_THROW(check_finite_speed(d, gaussian(p, g, 0.7), 1.0, sc), Error);
}

TEST(Blowup, PlateauCoreFollowsOde) {
    // Inside the causal core the solution is spatially constant and equals
    // the Stormer recursion for y'' = y^7 (independent scalar recursion).
    const Params p = make_params(7.0, Sign::focusing);
    const RadialGrid g(4.0, 2000);
    DataSpec spec;
    spec.family = Family::plateau;
    const RadialState d = make_data(spec, p, g);
    SolverConfig sc;
    sc.t_end = 1.0;
    const Trajectory t = evolve(d, sc);
    ASSERT_EQ(t.status, TrajectoryStatus::blew_up);
    const double dt = t.dt;
    double y0 = 1.0, y1 = 1.0 + 0.5 * dt * dt;
    std::size_t k = 1;
    while (std::fabs(y1) <= 1e6) {
        const double y2 = 2.0 * y1 - y0 + dt * dt * std::pow(y1, 7.0);
        y0 = y1;
        y1 = y2;
        ++k;
    }
    ASSERT_TRUE(detect_blowup(t).has_value());
    EXPECT_NEAR(*detect_blowup(t), static_cast<double>(k) * dt, 1e-12);
    EXPECT_LE(*t.t_star, sc.t_end);
}

TEST(Blowup, DefocusingCompletes) {
    const Params p = make_params(7.0, Sign::defocusing);
    const RadialGrid g(8.0, 800);
    SolverConfig sc;
    sc.t_end = 2.0;
    const Trajectory t = evolve(gaussian(p, g, 2.0), sc);
    EXPECT_EQ(t.status, TrajectoryStatus::completed);
    EXPECT_FALSE(detect_blowup(t).has_value());
}

TEST(NumericalSupport, LastSignificantNode) {
    const Params p = make_params(7.0, Sign::focusing);
    const RadialGrid g(8.0, 800);
    DataSpec spec;
    spec.family = Family::plateau;
    EXPECT_NEAR(numerical_support(make_data(spec, p, g)), 3.0, 0.011);
    EXPECT_EQ(numerical_support(zero_state(p, g)), 0.0);
}
