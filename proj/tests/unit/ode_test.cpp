#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "rwl/experiments.hpp"
#include "rwl/ode.hpp"

using namespace rwl;
namespace odeint = boost::numeric::odeint;

namespace {

using State = std::array<double, 2>;

// Independent reference: odeint's controlled Dormand-Prince stepper.
template <class F>
State reference(F f, State y, double t0, double t1) {
    auto stepper = odeint::make_controlled(1e-13, 1e-13, odeint::runge_kutta_dopri5<State>());
    odeint::integrate_adaptive(stepper, [&](const State& x, State& dx, double t) { dx = f(t, x); }, y, t0, t1, 1e-4);
    return y;
}

} // namespace

TEST(Dopri, HarmonicOscillatorExact) {
    auto f = [](double, const State& y) { return State{y[1], -y[0]}; };
    const auto res = ode::integrate<2>(f, 0.0, {1.0, 0.0}, 10.0, ode::Options{});
    ASSERT_EQ(res.stop, ode::Stop::reached_end);
    EXPECT_DOUBLE_EQ(res.samples.back().t, 10.0);
    EXPECT_NEAR(res.samples.back().y[0], std::cos(10.0), 1e-8);
    EXPECT_NEAR(res.samples.back().y[1], -std::sin(10.0), 1e-8);
}

TEST(Dopri, MatchesOdeintOnFocusingOde) {
    auto f = [](double, const State& y) { return State{y[1], signed_power(y[0], 7.0)}; };
    ode::Options opt;
    opt.rtol = 1e-12;
    opt.atol = 1e-14;
    const auto res = ode::integrate<2>(f, 0.0, {1.0, 0.0}, 0.9, opt);
    const State ref = reference(f, {1.0, 0.0}, 0.0, 0.9);
    EXPECT_NEAR(res.samples.back().y[0] / ref[0], 1.0, 1e-9);
    EXPECT_NEAR(res.samples.back().y[1] / ref[1], 1.0, 1e-9);
}

TEST(Dopri, UnderflowAtBlowupTime) {
    // y'' = y^7, y(0) = 1: blow-up time from the Beta-function quadrature.
    auto f = [](double, const State& y) { return State{y[1], signed_power(y[0], 7.0)}; };
    ode::Options opt;
    opt.rtol = 1e-12;
    opt.atol = 1e-300;
    const auto res = ode::integrate<2>(f, 0.0, {1.0, 0.0}, 2.0, opt);
    EXPECT_EQ(res.stop, ode::Stop::step_underflow);
    const double T = std::sqrt(4.0) * std::beta(0.5 - 1.0 / 8.0, 0.5) / 8.0;
    EXPECT_NEAR(res.samples.back().t, T, 1e-9);
    EXPECT_NEAR(ode_blowup_time(7.0, 1.0), T, 1e-15);
    EXPECT_NEAR(T, 0.9639516481503773, 1e-12);
}

TEST(Dopri, EventStopsEarly) {
    auto f = [](double, const State& y) { return State{y[1], 0.0}; };
    auto stop = [](double, const State& y) { return y[0] >= 0.5; };
    const auto res = ode::integrate<2>(f, 0.0, {0.0, 1.0}, 10.0, ode::Options{}, stop);
    EXPECT_EQ(res.stop, ode::Stop::event);
    EXPECT_GE(res.samples.back().y[0], 0.5);
    EXPECT_LT(res.samples.back().t, 10.0);
}

TEST(SelfSimilar, ConstantForSeven) {
    EXPECT_NEAR(selfsimilar_constant(7.0), std::pow(4.0 / 9.0, 1.0 / 6.0), 1e-15);
    // y = c (T - t)^{-1/3} solves y'' = y^7.
    const double c = selfsimilar_constant(7.0);
    const double t = 0.3, e = 1e-4;
    auto y = [&](double s) { return c * std::pow(1.0 - s, -1.0 / 3.0); };
    EXPECT_NEAR((y(t + e) - 2.0 * y(t) + y(t - e)) / (e * e) / std::pow(y(t), 7.0), 1.0, 1e-6);
}
