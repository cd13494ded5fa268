#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "adapted_ot/errors.hpp"
#include "adapted_ot/noise.hpp"
#include "adapted_ot/sde.hpp"

using namespace aot;

namespace {
const auto kSigmaOne = CoefficientSpec::constant(1.0, CoefficientRole::diffusion);
}

TEST(Schemes, ConstantCoefficientsSumIncrements) {
    const TimeGrid g(4);
    const std::vector<double> inc{0.1, -0.2, 0.3, 0.05};
    const auto sigma = CoefficientSpec::constant(2.0, CoefficientRole::diffusion);
    const auto path = euler_maruyama(CoefficientSpec::constant(1.0), sigma, g, 0.5, inc);
    ASSERT_EQ(path.values.size(), 5u);
    EXPECT_DOUBLE_EQ(path.values[0], 0.5);
    EXPECT_NEAR(path.terminal(), 0.5 + 1.0 + 2.0 * 0.25, 1e-14);
}

TEST(Schemes, OuStepMatchesHandComputation) {
    const TimeGrid g(2);
    const std::vector<double> inc{0.3, -0.1};
    const auto path = euler_maruyama(CoefficientSpec::ou(1.0), kSigmaOne, g, 1.0, inc);
    // x1 = 1 - 0.5 * 1 + 0.3 = 0.8; x2 = 0.8 - 0.4 - 0.1 = 0.3
    EXPECT_NEAR(path.values[1], 0.8, 1e-15);
    EXPECT_NEAR(path.values[2], 0.3, 1e-15);
}

TEST(Schemes, WrongIncrementCountRejected) {
    const TimeGrid g(3);
    const std::vector<double> inc{0.1};
    EXPECT_THROW(euler_maruyama(CoefficientSpec::constant(0.0), kSigmaOne, g, 0.0, inc), ConfigError);
}

TEST(Schemes, MonotoneRejectsIncrementsBeyondBarrier) {
    const TimeGrid g(4);
    const double A = truncation_level(g.h(), 4.0);
    std::vector<double> inc(4, 0.0);
    EXPECT_NO_THROW(monotone_em(CoefficientSpec::constant(0.0), kSigmaOne, g, 4.0, 0.0, inc));
    inc[2] = A * 1.01;
    EXPECT_THROW(monotone_em(CoefficientSpec::constant(0.0), kSigmaOne, g, 4.0, 0.0, inc), ConfigError);
}

TEST(Schemes, DivergenceReported) {
    const TimeGrid g(4);
    std::vector<double> inc(4, 0.0);
    EXPECT_THROW(euler_maruyama(CoefficientSpec::affine(0.0, 1e6), kSigmaOne, g, 1.0, inc), DivergenceError);
}

TEST(Schemes, MonotoneEmPreservesOrder) {
    // Under 1 - h C0 - A_h C1 > 0 the one-step map is increasing in x.
    const TimeGrid g(16);
    const double K = 4.0;
    const auto b = CoefficientSpec::ou(1.0);
    const auto sigma = CoefficientSpec::affine(1.0, 0.2, CoefficientRole::diffusion);
    RandomStream rng(1, 0);
    const double A = truncation_level(g.h(), K);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> inc(16);
        for (double& v : inc) v = sample_truncated_increment(g.h(), A, 1, rng).value;
        const auto lo = monotone_em(b, sigma, g, K, 0.0, inc);
        const auto hi = monotone_em(b, sigma, g, K, 0.3, inc);
        for (std::size_t k = 0; k < lo.values.size(); ++k) EXPECT_LE(lo.values[k], hi.values[k]);
    }
}

TEST(Zvonkin, ConstantDriftClosedForm) {
    // b = c, sigma = 1, x0 = 0: T(x) = (1 - exp(-2 c x)) / (2 c), T'(x) = exp(-2 c x).
    const double c = 1.0;
    const ZvonkinTransform z(CoefficientSpec::constant(c), kSigmaOne, 0.0, 3.0, 6000);
    for (double x : {-2.5, -1.0, 0.0, 0.4, 2.0}) {
        EXPECT_NEAR(z.T(x), (1.0 - std::exp(-2 * c * x)) / (2 * c), 1e-5 * std::max(1.0, std::exp(-2 * c * x)));
        EXPECT_NEAR(z.T_prime(x), std::exp(-2 * c * x), 1e-4 * std::exp(-2 * c * x));
        EXPECT_NEAR(z.T_inverse(z.T(x)), x, 1e-12);
    }
    EXPECT_DOUBLE_EQ(z.lipschitz_certificate(), 2.0);
    EXPECT_THROW(z.T(3.5), RangeError);
}

TEST(Zvonkin, ZeroDriftIsIdentity) {
    const ZvonkinTransform z(CoefficientSpec::constant(0.0), kSigmaOne, 1.0, 2.0, 100);
    EXPECT_NEAR(z.T(1.7), 0.7, 1e-14);
    EXPECT_NEAR(z.T_inverse(-0.5), 0.5, 1e-14);
}

TEST(Zvonkin, RejectsDegenerateDiffusion) {
    EXPECT_THROW(ZvonkinTransform(CoefficientSpec::constant(1.0),
                                  CoefficientSpec::constant(0.0, CoefficientRole::diffusion), 0.0),
                 ConfigError);
    EXPECT_THROW(ZvonkinTransform(CoefficientSpec::sign_switch(1.0, 0.5), kSigmaOne, 0.0), ConfigError);
}

TEST(Zvonkin, TransformedSchemeIsMonotoneInStart) {
    const TimeGrid g(512);
    const double K = 4.0;
    const ZvonkinTransform z(CoefficientSpec::constant(1.0), kSigmaOne, 0.0);
    RandomStream rng(2, 0);
    const double A = truncation_level(g.h(), K);
    std::vector<double> inc(512);
    for (double& v : inc) v = sample_truncated_increment(g.h(), A, 1, rng).value;
    const auto lo = transformed_monotone_em(z, g, K, 0.0, inc);
    const auto hi = transformed_monotone_em(z, g, K, 0.2, inc);
    for (std::size_t k = 0; k < lo.values.size(); ++k) EXPECT_LE(lo.values[k], hi.values[k]);
}
