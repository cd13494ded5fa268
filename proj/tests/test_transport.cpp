#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "adapted_ot/acceptance.hpp"
#include "adapted_ot/errors.hpp"
#include "adapted_ot/lattice.hpp"
#include "adapted_ot/lp.hpp"
#include "adapted_ot/transport.hpp"

using namespace aot;

namespace {

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<double> w(n);
    double s = 0.0;
    for (double& v : w) s += (v = u(rng));
    for (double& v : w) v /= s;
    return w;
}

double dense_lp_transport(const std::vector<std::vector<double>>& cost, const std::vector<double>& r,
                          const std::vector<double>& c) {
    const std::size_t m = r.size(), n = c.size();
    lp::Problem p;
    p.n_vars = m * n;
    for (const auto& row : cost) p.objective.insert(p.objective.end(), row.begin(), row.end());
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<std::pair<std::size_t, double>> row;
        for (std::size_t j = 0; j < n; ++j) row.emplace_back(i * n + j, 1.0);
        p.add_row(row, r[i]);
    }
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::pair<std::size_t, double>> row;
        for (std::size_t i = 0; i < m; ++i) row.emplace_back(i * n + j, 1.0);
        p.add_row(row, c[j]);
    }
    const auto s = lp::solve(p);
    EXPECT_EQ(s.status, lp::Status::optimal);
    return s.value;
}

MarkovLattice small_lattice(double drift, double vol, int n) {
    LatticeConfig c;
    c.n_steps = n;
    c.atoms = 3;
    c.max_support = 10;
    return build_lattice(CoefficientSpec::constant(drift), CoefficientSpec::constant(vol, CoefficientRole::diffusion),
                         c);
}

}  // namespace

TEST(Quantile, LeftContinuousInverse) {
    const DiscreteMeasure m{{0.0, 1.0, 3.0}, {0.25, 0.5, 0.25}};
    EXPECT_DOUBLE_EQ(quantile(m, 0.25), 0.0);
    EXPECT_DOUBLE_EQ(quantile(m, 0.26), 1.0);
    EXPECT_DOUBLE_EQ(quantile(m, 0.75), 1.0);
    EXPECT_DOUBLE_EQ(quantile(m, 1.0), 3.0);
    EXPECT_THROW(quantile(m, 0.0), DomainError);
}

TEST(Transportation, ReferenceInstance) {
    const std::vector<std::vector<double>> C{{1, 3, 5, 2}, {4, 1, 2, 6}, {3, 2, 7, 1}};
    const auto plan = transportation_lp(C, {0.3, 0.5, 0.2}, {0.25, 0.25, 0.25, 0.25});
    EXPECT_NEAR(plan.cost, 1.3, 1e-12);
    EXPECT_LT(plan.marginal_error(), 1e-14);
}

TEST(Transportation, MatchesDenseSimplexOnRandomInstances) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    std::uniform_int_distribution<int> size(1, 6);
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t m = size(rng), n = size(rng);
        std::vector<std::vector<double>> C(m, std::vector<double>(n));
        for (auto& row : C)
            for (double& v : row) v = u(rng);
        const auto r = random_simplex(rng, m);
        const auto c = random_simplex(rng, n);
        const auto plan = transportation_lp(C, r, c);
        EXPECT_NEAR(plan.cost, dense_lp_transport(C, r, c), 1e-10);
        EXPECT_LT(plan.marginal_error(), 1e-12);
    }
}

TEST(Transportation, RejectsMismatchedMasses) {
    EXPECT_THROW(transportation_lp({{1.0}}, {1.0}, {0.5}), ConfigError);
    EXPECT_THROW(transportation_lp({{1.0, 2.0}}, {1.0}, {0.5}), ConfigError);
}

TEST(Monotone, OptimalForConvexCost) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z;
    for (int rep = 0; rep < 30; ++rep) {
        DiscreteMeasure mu, nu;
        for (int i = 0; i < 5; ++i) mu.atoms.push_back(z(rng));
        for (int i = 0; i < 4; ++i) nu.atoms.push_back(z(rng));
        mu.weights = random_simplex(rng, 5);
        nu.weights = random_simplex(rng, 4);
        for (double p : {1.0, 2.0}) {
            const auto kr = monotone_rearrangement(mu, nu, p);
            std::vector<std::vector<double>> C(5, std::vector<double>(4));
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 4; ++j) C[i][j] = power_cost(mu.atoms[i], nu.atoms[j], p);
            EXPECT_NEAR(kr.cost, transportation_lp(C, mu.weights, nu.weights).cost, 1e-10);
            EXPECT_LT(kr.marginal_error(), 1e-14);
        }
    }
}

TEST(Monotone, HandExample) {
    const DiscreteMeasure mu{{0.0, 1.0}, {0.5, 0.5}};
    const DiscreteMeasure nu{{0.5, 2.0}, {0.75, 0.25}};
    // 0 -> 0.5 (0.5), 1 -> 0.5 (0.25), 1 -> 2 (0.25)
    EXPECT_DOUBLE_EQ(monotone_rearrangement(mu, nu, 1.0).cost, 0.25 + 0.125 + 0.25);
}

TEST(Chains, KrMarginalsAndIdentity) {
    const auto lx = small_lattice(1.0, 1.0, 4);
    const auto ly = small_lattice(0.0, 1.0, 4);
    const auto chain = kr_coupling(lx, ly);
    EXPECT_LT(marginal_consistency_error(chain), 1e-14);
    EXPECT_NEAR(bicausal_dp(lx, lx, 2.0, true).value, 0.0, 1e-15);
    EXPECT_NEAR(coupled_cost(kr_coupling(lx, lx), 2.0, true), 0.0, 1e-15);
}

TEST(Chains, ConstantDriftGapIsDeterministic) {
    // Same noise quantization, drift gap 1: the synchronous difference is t_k exactly.
    const auto lx = small_lattice(1.0, 1.0, 4);
    const auto ly = small_lattice(0.0, 1.0, 4);
    const double expected = (0.0625 + 0.25 + 0.5625 + 1.0) / 4.0;
    EXPECT_NEAR(bicausal_dp(lx, ly, 2.0, true).value, expected, 1e-12);
    EXPECT_NEAR(coupled_cost(kr_coupling(lx, ly), 2.0, true), expected, 1e-12);
}

TEST(Chains, PolicyEvaluationReproducesValue) {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 10; ++rep) {
        const auto mu = random_tree(rng, 3, 3);
        const auto nu = random_tree(rng, 3, 3);
        const auto x = StateChain::from_tree(mu);
        const auto y = StateChain::from_tree(nu);
        const auto sol = bicausal_dp(x, y, 2.0, false);
        EXPECT_NEAR(evaluate_policy(x, y, sol), sol.value, 1e-10);
        EXPECT_LE(sol.value, coupled_cost(kr_coupling(x, y), 2.0, false) + 1e-10);
    }
}

TEST(Chains, DpMatchesBicausalLp) {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 15; ++rep) {
        const auto mu = random_tree(rng, 2 + rep % 2, 3);
        const auto nu = random_tree(rng, 2 + rep % 2, 3);
        for (double p : {1.0, 2.0}) {
            const double dp = bicausal_dp(StateChain::from_tree(mu), StateChain::from_tree(nu), p, false).value;
            EXPECT_NEAR(dp, causal_lp(mu, nu, p, CausalMode::bicausal), 1e-8);
        }
    }
}

TEST(Chains, KrOptimalForFosdLattices) {
    for (double drift : {0.5, -1.0}) {
        const auto lx = small_lattice(drift, 1.0, 5);
        const auto ly = small_lattice(0.0, 0.5, 5);
        ASSERT_TRUE(check_fosd(lx).certified);
        ASSERT_TRUE(check_fosd(ly).certified);
        for (double p : {1.0, 2.0}) {
            EXPECT_NEAR(bicausal_dp(lx, ly, p, true).value, coupled_cost(kr_coupling(lx, ly), p, true), 1e-9);
        }
    }
}

TEST(Chains, RejectsBadOrder) {
    const auto lx = small_lattice(0.0, 1.0, 2);
    EXPECT_THROW(bicausal_dp(lx, lx, 0.5, false), ConfigError);
}

TEST(TwoPath, AdaptedGapDoesNotVanish) {
    for (int n : {1, 2, 5, 10}) {
        const auto mu = two_path_mu(n);
        const auto nu = two_path_nu();
        const double aw = bicausal_dp(StateChain::from_tree(mu), StateChain::from_tree(nu), 2.0, false).value;
        EXPECT_NEAR(aw, 2.0 + 1.0 / (n * n), 1e-12);
        const auto m = metric_suite(mu, nu, 2.0);
        EXPECT_NEAR(m.aw, aw, 1e-9);
        EXPECT_NEAR(m.w, 1.0 / (n * n), 1e-9);
        EXPECT_NEAR(m.cw_forward, 1.0 / (n * n), 1e-9);
        EXPECT_NEAR(m.cw_backward, aw, 1e-9);
    }
}

TEST(Metrics, OrderingOnRandomTrees) {
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 20; ++rep) {
        const auto mu = random_tree(rng, 2, 3);
        const auto nu = random_tree(rng, 2, 3);
        const auto m = metric_suite(mu, nu, 2.0);
        EXPECT_LE(m.w, m.cw_forward + 1e-10);
        EXPECT_LE(m.w, m.cw_backward + 1e-10);
        EXPECT_DOUBLE_EQ(m.scw, std::max(m.cw_forward, m.cw_backward));
        EXPECT_LE(m.scw, m.aw + 1e-10);
    }
}

TEST(Metrics, TooManyPathsRejected) {
    DiscretePathMeasure big;
    for (int i = 0; i < 65; ++i) {
        big.paths.push_back({static_cast<double>(i)});
        big.weights.push_back(1.0 / 65);
    }
    EXPECT_THROW(causal_lp(big, big, 2.0, CausalMode::classical), ConfigError);
}

TEST(Chains, KrOptimalOnRandomLipschitzPairs) {
    std::mt19937_64 rng(29);
    int checked = 0;
    for (int rep = 0; rep < 40 && checked < 8; ++rep) {
        const SdeSpec x = random_lipschitz_sde(rng, 1.0, 0.5);
        const SdeSpec y = random_lipschitz_sde(rng, 1.0, 0.5);
        LatticeConfig c;
        c.n_steps = 4;
        c.atoms = 3;
        c.max_support = 15;
        const auto lx = build_lattice(x.drift, x.vol, c);
        const auto ly = build_lattice(y.drift, y.vol, c);
        if (!check_fosd(lx).certified || !check_fosd(ly).certified) continue;
        ++checked;
        EXPECT_NEAR(bicausal_dp(lx, ly, 2.0, true).value, coupled_cost(kr_coupling(lx, ly), 2.0, true), 1e-9);
    }
    EXPECT_EQ(checked, 8);
}
