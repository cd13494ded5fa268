#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "adapted_ot/errors.hpp"
#include "adapted_ot/model.hpp"
#include "adapted_ot/noise.hpp"

using namespace aot;

TEST(Truncation, LevelMatchesReference) {
    EXPECT_NEAR(truncation_level(0.01, 4.0), 0.8583864105157388, 1e-12);
    EXPECT_NEAR(truncation_level(0.25, 4.0), 2.3548200450309493, 1e-12);
    EXPECT_NEAR(truncation_level(0.1, 1.0), 0.47985259121880813, 1e-12);
}

TEST(Truncation, LevelRejectsBadArguments) {
    EXPECT_THROW(truncation_level(0.0, 4.0), DomainError);
    EXPECT_THROW(truncation_level(1.0, 4.0), DomainError);
    EXPECT_THROW(truncation_level(0.1, 0.5), DomainError);
}

TEST(Truncation, ExitBoundsReference) {
    EXPECT_NEAR(normal_upper_tail(1.96), 0.024997895148220435, 1e-14);
    const auto b = exit_probability_bounds(0.1, truncation_level(0.1, 1.0));
    EXPECT_NEAR(b.lower, 0.1291588786984067, 1e-12);
    EXPECT_NEAR(b.upper, 0.2583177573968134, 1e-12);
}

TEST(Truncation, IncrementStaysInsideBarrier) {
    const double h = 0.1;
    const double A = truncation_level(h, 1.0);
    RandomStream rng(1, 0);
    int exits = 0;
    for (int i = 0; i < 5000; ++i) {
        const auto inc = sample_truncated_increment(h, A, 8, rng);
        EXPECT_LE(std::abs(inc.value), A);
        if (inc.exited) {
            ++exits;
            EXPECT_DOUBLE_EQ(std::abs(inc.value), A);
        } else {
            EXPECT_DOUBLE_EQ(inc.value, inc.unstopped);
        }
    }
    EXPECT_GT(exits, 0);
}

TEST(Truncation, NoBarrierMeansNoExit) {
    RandomStream rng(3, 7);
    for (int i = 0; i < 100; ++i) {
        const auto inc = sample_truncated_increment(0.1, std::numeric_limits<double>::infinity(), 4, rng);
        EXPECT_FALSE(inc.exited);
        EXPECT_EQ(inc.value, inc.unstopped);
    }
}

TEST(RandomStreams, DeterministicAndDistinct) {
    RandomStream a(1, 5);
    RandomStream b(1, 5);
    RandomStream c(1, 6);
    const double va = a.normal();
    EXPECT_EQ(va, b.normal());
    EXPECT_NE(va, c.normal());
    EXPECT_NE(mix_seed(1, 0), mix_seed(2, 0));
    EXPECT_NE(mix_seed(1, 0), mix_seed(1, 1));
}

TEST(Rho, TableLookupAndAverage) {
    const auto r = RhoControl::table({0.0, 0.5}, {1.0, -1.0});
    EXPECT_DOUBLE_EQ(r.at(0.2), 1.0);
    EXPECT_DOUBLE_EQ(r.at(0.5), -1.0);
    EXPECT_DOUBLE_EQ(r.at(1.0), -1.0);
    EXPECT_DOUBLE_EQ(r.average(), 0.0);
    EXPECT_THROW(RhoControl::constant(1.5), ConfigError);
    EXPECT_THROW(RhoControl::table({0.1}, {0.0}), ConfigError);
}

TEST(Correlated, RhoOneIsIdenticalNoise) {
    const TimeGrid g(16);
    const auto blk = sample_correlated_pair(g, RhoControl::constant(1.0), 42, 2);
    ASSERT_EQ(blk.dW.size(), 16u);
    for (std::size_t k = 0; k < blk.dW.size(); ++k) EXPECT_EQ(blk.dW[k], blk.dW_bar[k]);
    const auto neg = sample_correlated_pair(g, RhoControl::constant(-1.0), 42, 2);
    for (std::size_t k = 0; k < neg.dW.size(); ++k) EXPECT_DOUBLE_EQ(neg.dW[k], -neg.dW_bar[k]);
}

TEST(Correlated, SampleCorrelationNearRho) {
    const double rho = 0.3;
    RandomStream rng(1, 0);
    double sxy = 0, sxx = 0, syy = 0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
        const auto s = sample_coupled_step(0.01, rho, std::numeric_limits<double>::infinity(), 1, rng);
        sxy += s.w.value * s.w_bar.value;
        sxx += s.w.value * s.w.value;
        syy += s.w_bar.value * s.w_bar.value;
    }
    // sd of the sample correlation is (1 - rho^2)/sqrt(n) ~ 0.0045
    EXPECT_NEAR(sxy / std::sqrt(sxx * syy), rho, 0.02);
    EXPECT_NEAR(sxx / n, 0.01, 0.01 * 0.03);
}

TEST(FourthMoment, NoExitsAtLargeK) {
    const auto est = fourth_moment_truncation_error(0.1, 4.0, 20000, 4, 1);
    EXPECT_EQ(est.exits, 0);
    EXPECT_TRUE(est.no_exits);
    EXPECT_EQ(est.estimate, 0.0);
}

TEST(FourthMoment, BoundHoldsAtKOne) {
    const auto est = fourth_moment_truncation_error(0.1, 1.0, 20000, 8, 1);
    EXPECT_GT(est.exits, 0);
    EXPECT_NEAR(est.bound, 6 * 0.01 * std::pow(0.1, 0.5), 1e-15);
    EXPECT_LE(est.estimate, est.bound + 4 * est.stderr_);
}
