#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "adapted_ot/errors.hpp"
#include "adapted_ot/lattice.hpp"
#include "adapted_ot/noise.hpp"

using namespace aot;

namespace {
const auto kSigmaOne = CoefficientSpec::constant(1.0, CoefficientRole::diffusion);
}

TEST(Quantization, ConditionalMeansMatchQuadrature) {
    const double h = 0.1;
    const auto q = quantize_increment(h, truncation_level(h, 1.0), 5);
    const double expected[] = {-0.3981305795091238, -0.16820251812326276, 0.0, 0.16820251812326276,
                               0.39813057950912367};
    ASSERT_EQ(q.size(), 5u);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_NEAR(q.atoms[i], expected[i], 1e-9);
        EXPECT_DOUBLE_EQ(q.weights[i], 0.2);
    }
}

TEST(Quantization, SymmetricInsideBarrier) {
    const double h = 1.0 / 16;
    const double A = truncation_level(h, 4.0);
    const auto q = quantize_increment(h, A, 6);
    double mean = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        EXPECT_LE(std::abs(q.atoms[i]), A);
        EXPECT_DOUBLE_EQ(q.atoms[i], -q.atoms[q.size() - 1 - i]);
        mean += q.atoms[i] * q.weights[i];
    }
    EXPECT_NEAR(mean, 0.0, 1e-15);
    EXPECT_THROW(quantize_increment(h, A, 1), ConfigError);
}

TEST(Lattice, BrownianLatticeShape) {
    LatticeConfig c;
    c.n_steps = 4;
    c.atoms = 5;
    c.max_support = 40;
    const auto l = build_lattice(CoefficientSpec::constant(0.0), kSigmaOne, c);
    EXPECT_NO_THROW(l.validate());
    ASSERT_EQ(l.n_stages(), 4);
    EXPECT_EQ(l.stages[0].support.size(), 5u);
    for (int k = 1; k <= 4; ++k) {
        EXPECT_LE(l.support(k).size(), 40u);
        EXPECT_NEAR(lattice_moments(l, k).mean, 0.0, 1e-12);
    }
}

TEST(Lattice, MergingConservesMean) {
    LatticeConfig c;
    c.n_steps = 6;
    c.atoms = 5;
    c.max_support = 12;
    const auto l = build_lattice(CoefficientSpec::constant(0.5), kSigmaOne, c);
    for (int k = 1; k <= 6; ++k) {
        EXPECT_LE(l.support(k).size(), 12u);
        EXPECT_NEAR(lattice_moments(l, k).mean, 0.5 * k / 6.0, 1e-12);
    }
}

TEST(Lattice, RejectsSmallSupportAndPathDependence) {
    LatticeConfig c;
    c.atoms = 5;
    c.max_support = 4;
    EXPECT_THROW(build_lattice(CoefficientSpec::constant(0.0), kSigmaOne, c), ConfigError);
    c.max_support = 40;
    EXPECT_THROW(build_lattice(CoefficientSpec::sign_switch(1.0, 0.5), kSigmaOne, c), ConfigError);
}

TEST(Fosd, MarginReference) {
    EXPECT_NEAR(fosd_margin(1.0, 1.0, 0.1, 1.0), 0.4201474087811919, 1e-12);
    EXPECT_NEAR(fosd_margin(1.0, 0.5, 0.0625, 4.0), 0.10494538884230231, 1e-12);
    EXPECT_TRUE(fosd_sufficient_condition(1.0, 0.5, 0.0625, 4.0));
    EXPECT_FALSE(fosd_sufficient_condition(0.5, 0.5, 0.125, 4.0));
}

TEST(Fosd, CertifiedUnderSufficientCondition) {
    LatticeConfig c;
    c.n_steps = 8;
    const auto sigma = CoefficientSpec::affine(1.0, 0.1, CoefficientRole::diffusion);
    ASSERT_TRUE(fosd_sufficient_condition(1.0, 0.1, 1.0 / 8, 4.0));
    const auto l = build_lattice(CoefficientSpec::ou(1.0), sigma, c);
    EXPECT_TRUE(check_fosd(l).certified);
}

TEST(Fosd, CrossingKernelProducesWitness) {
    MarkovLattice l;
    l.x0 = 0.0;
    l.stages.push_back({{-1.0, 1.0}, {{0.5, 0.5}}});
    // From x = 1 the chain moves down more often than from x = -1.
    l.stages.push_back({{-1.0, 0.0, 1.0}, {{0.1, 0.1, 0.8}, {0.8, 0.1, 0.1}}});
    const auto r = check_fosd(l);
    ASSERT_FALSE(r.certified);
    ASSERT_TRUE(r.witness.has_value());
    EXPECT_EQ(r.witness->stage, 2);
    EXPECT_EQ(r.witness->lower, 0u);
    EXPECT_EQ(r.witness->upper, 1u);
    EXPECT_GT(r.witness->cdf_upper, r.witness->cdf_lower);
}
