#include <gtest/gtest.h>

#include <cmath>

#include "rwl/model.hpp"
#include "rwl/random.hpp"

using namespace rwl;

TEST(Params, DerivedExponents) {
    const Params p7 = make_params(7.0, Sign::focusing);
    EXPECT_DOUBLE_EQ(p7.m, 3.0);
    EXPECT_DOUBLE_EQ(p7.s_c, 1.5 - 2.0 / 6.0);
    const Params p9 = make_params(9.0, Sign::defocusing);
    EXPECT_DOUBLE_EQ(p9.m, 4.0);
    EXPECT_DOUBLE_EQ(p9.s_c, 1.25);
    EXPECT_EQ(as_real(p9.iota), -1.0);
}

TEST(Params, SubcriticalRejected) {
    for (double p : {5.0, 3.0, -1.0, double(NAN), double(INFINITY)}) {
        try {
            make_params(p, Sign::focusing);
            FAIL() << "p = " << p;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::SubcriticalExponent);
        }
    }
}

TEST(Params, CriticalRegularityAboveOne) {
    for (double p = 5.01; p < 40.0; p += 0.37) EXPECT_GT(make_params(p, Sign::focusing).s_c, 1.0);
}

TEST(Scaling, AmplitudeFactor) {
    const Params p7 = make_params(7.0, Sign::focusing);
    EXPECT_NEAR(rescale_exponents(p7, 8.0).amplitude, 2.0, 1e-15);
    EXPECT_EQ(rescale_exponents(p7, 8.0).norm, 1.0);
    EXPECT_THROW(rescale_exponents(p7, 0.0), Error);
    EXPECT_THROW(rescale_exponents(p7, -1.0), Error);
}

TEST(Powers, MatchStdPow) {
    for (double x : {-2.5, -1.0, -0.3, 0.0, 0.7, 3.0}) {
        for (double q : {1.0, 2.0, 3.0, 3.5, 4.0, 7.0}) {
            EXPECT_NEAR(abs_power(x, q), std::pow(std::fabs(x), q), 1e-12 * (1.0 + std::pow(std::fabs(x), q)));
            const double sp = x == 0.0 ? 0.0 : std::copysign(std::pow(std::fabs(x), q), x);
            EXPECT_NEAR(signed_power(x, q), sp, 1e-12 * (1.0 + std::fabs(sp)));
        }
    }
}

TEST(SplitMix64, ReferenceSequence) {
    SplitMix64 zero(0);
    EXPECT_EQ(zero.next(), 0xE220A8397B1DCDAFULL);
    EXPECT_EQ(zero.next(), 0x6E789E6AA1B965F4ULL);
    EXPECT_EQ(zero.next(), 0x06C45D188009454FULL);
    SplitMix64 answer(42);
    EXPECT_EQ(answer.next(), 0xBDD732262FEB6E95ULL);
    SplitMix64 u(42);
    EXPECT_DOUBLE_EQ(u.uniform(), 0.7415648787718233);
}

TEST(SplitMix64, RangesRespected) {
    SplitMix64 rng(7);
    for (int k = 0; k < 10000; ++k) {
        const double x = rng.uniform(-1.0, 2.0);
        EXPECT_GE(x, -1.0);
        EXPECT_LT(x, 2.0);
        const int j = rng.integer(3, 6);
        EXPECT_GE(j, 3);
        EXPECT_LE(j, 6);
    }
}
