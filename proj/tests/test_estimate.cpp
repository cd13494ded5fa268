#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "adapted_ot/errors.hpp"
#include "adapted_ot/estimate.hpp"

using namespace aot;

namespace {

McConfig small_config(std::int64_t n = 4000) {
    McConfig c;
    c.n_steps = 32;
    c.n_samples = n;
    c.substeps = 1;
    c.threads = 1;
    return c;
}

}  // namespace

TEST(Summarize, MeanAndBatchError) {
    std::vector<double> v(40);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = (i / 2) % 2 == 0 ? 1.0 : 3.0;
    const auto s = summarize(v);
    EXPECT_DOUBLE_EQ(s.estimate, 2.0);
    EXPECT_EQ(s.n_samples, 40);
    // Batches of 2 alternate between means 1 and 3: sd 1.0260, SE = sd / sqrt(20).
    EXPECT_NEAR(s.stderr_, std::sqrt(20.0 / 19.0) / std::sqrt(20.0), 1e-12);
}

TEST(Summarize, SkipsNaN) {
    std::vector<double> v(50, 1.0);
    v[3] = std::numeric_limits<double>::quiet_NaN();
    const auto s = summarize(v);
    EXPECT_EQ(s.diverged, 1);
    EXPECT_EQ(s.n_samples, 49);
    EXPECT_DOUBLE_EQ(s.estimate, 1.0);
}

TEST(StepCost, BridgeRuleAndTrapezoid) {
    EXPECT_DOUBLE_EQ(step_cost(2.0, 2.0, 0.0, 0.5, 2.0), 2.0);
    EXPECT_DOUBLE_EQ(step_cost(0.0, 0.0, 1.0, 0.5, 2.0), 0.25 / 6.0);
    EXPECT_DOUBLE_EQ(step_cost(0.0, 3.0, 0.0, 1.0, 2.0), 3.0);
    EXPECT_DOUBLE_EQ(step_cost(1.0, -3.0, 0.0, 0.5, 1.0), 1.0);
}

TEST(ClosedForm, RegisteredFamilies) {
    EXPECT_NEAR(*closed_form_cost(find_preset("drift-gap").x, find_preset("drift-gap").y, 2.0), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(*closed_form_cost(find_preset("vol-gap").x, find_preset("vol-gap").y, 2.0), 0.125, 1e-15);
    const double ou = 0.5 - (1.0 - std::exp(-2.0)) / 4.0;
    EXPECT_NEAR(*closed_form_cost(find_preset("ou-vol").x, find_preset("ou-vol").y, 2.0), ou, 1e-15);
    EXPECT_FALSE(closed_form_cost(find_preset("affine-ou").x, find_preset("affine-ou").y, 2.0).has_value());
    EXPECT_FALSE(closed_form_cost(find_preset("drift-gap").x, find_preset("drift-gap").y, 1.0).has_value());
    // sigma = 1, sigma_bar = 0.5, rho = 0: (1 + 0.25) / 2
    EXPECT_NEAR(*closed_form_cost(find_preset("vol-gap").x, find_preset("vol-gap").y, 0.0, 2.0), 0.625, 1e-15);
}

TEST(Presets, UnknownNameListsChoices) {
    try {
        find_preset("nope");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("drift-gap"), std::string::npos);
    }
    EXPECT_EQ(parse_scheme("zvonkin-em"), Scheme::zvonkin_em);
    EXPECT_THROW(parse_scheme("milstein"), ConfigError);
}

TEST(SyncMc, DriftGapIsExact) {
    const auto& p = find_preset("drift-gap");
    const auto est = sync_distance_mc(p.x, p.y, small_config(400));
    EXPECT_NEAR(est.estimate, 1.0 / 3.0, 1e-12);
    EXPECT_LT(est.stderr_, 1e-12);
}

TEST(SyncMc, VolGapWithinFourSe) {
    const auto& p = find_preset("vol-gap");
    const auto est = sync_distance_mc(p.x, p.y, small_config());
    EXPECT_NEAR(est.estimate, 0.125, 4 * est.stderr_);
}

TEST(SyncMc, IndependentOfThreadCount) {
    const auto& p = find_preset("affine-ou");
    auto c = small_config(1000);
    const auto a = sync_distance_mc(p.x, p.y, c);
    c.threads = 3;
    const auto b = sync_distance_mc(p.x, p.y, c);
    EXPECT_EQ(a.estimate, b.estimate);
    EXPECT_EQ(a.stderr_, b.stderr_);
}

TEST(SyncMc, ReplicateStreamsDependOnSeed) {
    const auto& p = find_preset("vol-gap");
    auto c = small_config(500);
    const auto a = sync_distance_mc(p.x, p.y, c);
    c.seed = 2;
    EXPECT_NE(a.estimate, sync_distance_mc(p.x, p.y, c).estimate);
}

TEST(SyncMc, DivergenceRaised) {
    SdeSpec x;
    x.drift = CoefficientSpec::affine(0.0, 1e4);
    x.x0 = 1.0;
    SdeSpec y;
    y.x0 = 1.0;
    auto c = small_config(100);
    c.scheme = Scheme::em;
    EXPECT_THROW(sync_distance_mc(x, y, c), DivergenceError);
}

TEST(SyncMc, RejectsBadConfig) {
    const auto& p = find_preset("vol-gap");
    auto c = small_config(100);
    c.p = 0.5;
    EXPECT_THROW(sync_distance_mc(p.x, p.y, c), ConfigError);
    c = small_config(0);
    EXPECT_THROW(sync_distance_mc(p.x, p.y, c), ConfigError);
}

TEST(RhoScan, SynchronousIsSmallest) {
    const auto& p = find_preset("vol-gap");
    const auto rows = rho_scan(p.x, p.y, {-1.0, 0.0, 0.5, 1.0}, small_config(2000));
    ASSERT_EQ(rows.size(), 4u);
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) EXPECT_GT(rows[i].cost.estimate, rows.back().cost.estimate);
    for (const auto& r : rows) {
        const double cf = *closed_form_cost(p.x, p.y, r.rho, 2.0);
        EXPECT_NEAR(r.cost.estimate, cf, 4 * r.cost.stderr_ + 1e-12);
    }
}

TEST(Counterexample, SyncIsDeterministic) {
    McConfig c = small_config(2000);
    c.n_steps = 100;
    c.scheme = Scheme::em;
    const auto r = counterexample_nonmarkov(5.0, 0.1, 2.0, c);
    EXPECT_NEAR(r.sync_closed_form, 4 * 25 * std::pow(0.9, 3) / 3, 1e-12);
    EXPECT_NEAR(r.sync.estimate, r.sync_closed_form, 1e-9 * r.sync_closed_form);
    EXPECT_DOUBLE_EQ(r.async_closed_form, 2.0);
    EXPECT_NEAR(r.async.estimate, 2.0, 4 * r.async.stderr_);
    EXPECT_THROW(counterexample_nonmarkov(5.0, 0.105, 2.0, c), ConfigError);
}

TEST(Tables, AbsAndSqrtInterpolants) {
    const auto a = abs_table(1, 4.0, CoefficientRole::drift);
    EXPECT_DOUBLE_EQ(a(0.25), 0.25);
    EXPECT_DOUBLE_EQ(a(0.0), 0.25);
    EXPECT_DOUBLE_EQ(a(-1.75), 1.75);
    const auto s = sqrt_abs_table(2, 0.1, 2.0);
    EXPECT_NEAR(s(0.5), std::sqrt(0.6), 1e-15);
    EXPECT_EQ(s.role(), CoefficientRole::diffusion);
    EXPECT_THROW(abs_table(-1, 4.0, CoefficientRole::drift), ConfigError);
}

TEST(Diagnostics, KsDistance) {
    EXPECT_DOUBLE_EQ(ks_distance({0.0, 1.0}, {0.0, 1.0}), 0.0);
    EXPECT_DOUBLE_EQ(ks_distance({0.0, 1.0}, {2.0, 3.0}), 1.0);
    EXPECT_DOUBLE_EQ(ks_distance({0.0, 1.0, 2.0, 3.0}, {1.5, 2.5}), 0.5);
}

TEST(Diagnostics, TruncationRarelyBindsAtKFour) {
    const auto& p = find_preset("ou-vol");
    EXPECT_GT(truncation_agreement(p.x, small_config(2000)), 0.999);
}

TEST(Convergence, RowsAndFosdFlags) {
    ConvergenceConfig cc;
    cc.n_list = {2, 4};
    cc.mc = small_config(400);
    const auto& p = find_preset("drift-gap");
    const auto res = convergence_study(p.x, p.y, cc);
    ASSERT_EQ(res.rows.size(), 2u);
    for (const auto& r : res.rows) {
        EXPECT_TRUE(r.fosd_certified);
        EXPECT_NEAR(r.dp_scaled, r.kr_cost, 1e-12);
        EXPECT_DOUBLE_EQ(r.h, 1.0 / r.n);
    }
    // Drift gap 1: sum_k h (k h)^2 = (N + 1)(2N + 1) / (6 N^2)
    EXPECT_NEAR(res.rows[0].dp_scaled, 3.0 * 5.0 / 24.0, 1e-12);
}
