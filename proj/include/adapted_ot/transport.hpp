#pragma once

// Optimal transport core: quantile couplings, Knothe-Rosenblatt couplings of
// Markov chains, the bi-causal dynamic programme, an exact transportation
// solver, and causality-constrained linear programmes on small trees.

#include <cstddef>
#include <utility>
#include <vector>

#include "adapted_ot/model.hpp"

namespace aot {

/// One-dimensional discrete probability measure.
struct DiscreteMeasure {
    std::vector<double> atoms;
    std::vector<double> weights;

    void validate() const;
};

/// Left-continuous generalised inverse of the CDF: inf{x : F(x) >= u}, u in (0, 1].
double quantile(const DiscreteMeasure& measure, double u);

/// Joint law with fixed marginals; joint[i][j] couples row atom i with column atom j.
struct TransportPlan {
    std::vector<double> row_marginal;
    std::vector<double> col_marginal;
    std::vector<std::vector<double>> joint;
    double cost = 0.0;

    /// Largest marginal violation (max abs deviation of row/column sums).
    double marginal_error() const;
};

/// Cost |x - y|^p.
double power_cost(double x, double y, double p);

/// Quantile (north-west corner on sorted atoms) coupling; cost uses |x - y|^p.
TransportPlan monotone_rearrangement(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p = 1.0);

/// Exact optimal plan of the transportation problem by the transportation
/// simplex (MODI potentials on a spanning-tree basis).  Marginal sums must agree
/// within 1e-9.
TransportPlan transportation_lp(const std::vector<std::vector<double>>& cost, const std::vector<double>& row_marginal,
                                const std::vector<double>& col_marginal);

// ---------------------------------------------------------------------------
// Chains of finitely many states
// ---------------------------------------------------------------------------

using SparseRow = std::vector<std::pair<std::size_t, double>>;

/// Finite-stage chain whose states carry real values.  Unlike MarkovLattice,
/// distinct states may share a value: a scenario tree expanded into
/// history-states is a StateChain with one state per node.
struct StateChain {
    double x0 = 0.0;
    /// values[k] are the state values at stage k; values[0] == {x0}.
    std::vector<std::vector<double>> values;
    /// kernels[k][i]: law of the stage-(k+1) state given state i at stage k.
    std::vector<std::vector<SparseRow>> kernels;

    int n_stages() const { return static_cast<int>(values.size()) - 1; }
    std::size_t n_states(int k) const { return values[static_cast<std::size_t>(k)].size(); }

    static StateChain from_lattice(const MarkovLattice& lattice);
    /// History expansion: one state per distinct path prefix.
    static StateChain from_tree(const DiscretePathMeasure& measure);
};

/// Joint chain over product states (x-state, y-state).
struct CoupledChain {
    StateChain x;
    StateChain y;
    /// pairs[k]: reachable product states at stage k.
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> pairs;
    /// kernels[k][s]: law of the stage-(k+1) pair index given pair s at stage k.
    std::vector<std::vector<SparseRow>> kernels;

    int n_stages() const { return static_cast<int>(pairs.size()) - 1; }
};

/// Stagewise monotone rearrangement of the conditional kernels.
CoupledChain kr_coupling(const StateChain& x, const StateChain& y);
CoupledChain kr_coupling(const MarkovLattice& x, const MarkovLattice& y);

/// Largest deviation between the marginal kernels of the coupled chain and the
/// input chains.
double marginal_consistency_error(const CoupledChain& chain);

/// Stage weights: h = 1/N on stages 1..N when scaled, 1 otherwise.
std::vector<double> stage_weights(int n_stages, bool scaled);

/// E sum_k w_k |x_k - y_k|^p under the coupled chain.
double coupled_cost(const CoupledChain& chain, double p, bool scaled);
double coupled_cost(const CoupledChain& chain, double p, const std::vector<double>& weights);

struct ConditionalPlan {
    std::vector<std::size_t> x_children;
    std::vector<std::size_t> y_children;
    TransportPlan plan;
};

struct BicausalSolution {
    double value = 0.0;
    double p = 2.0;
    std::vector<double> weights;  ///< w_1..w_N
    /// policy[k][i * ny + j]: optimal coupling of the kernels at state pair (i, j), stage k.
    std::vector<std::vector<ConditionalPlan>> policy;
    std::vector<std::size_t> ny;  ///< number of y-states per stage

    std::size_t policy_size() const;
};

/// Backward induction V_N = 0,
/// V_k(x, y) = min_gamma sum gamma(a, b) [w_{k+1} |a - b|^p + V_{k+1}(a, b)],
/// each inner problem solved exactly by transportation_lp.
BicausalSolution bicausal_dp(const StateChain& x, const StateChain& y, double p, const std::vector<double>& weights);
BicausalSolution bicausal_dp(const StateChain& x, const StateChain& y, double p, bool scaled);
BicausalSolution bicausal_dp(const MarkovLattice& x, const MarkovLattice& y, double p, bool scaled);

/// Forward evaluation of the policy: E sum_k w_k |x_k - y_k|^p.
double evaluate_policy(const StateChain& x, const StateChain& y, const BicausalSolution& solution);

// ---------------------------------------------------------------------------
// Causality-constrained linear programmes on small trees
// ---------------------------------------------------------------------------

enum class CausalMode { classical, causal, anticausal, bicausal };

/// Largest path count per marginal accepted by causal_lp.
inline constexpr std::size_t kMaxCausalLpPaths = 64;

/// inf over couplings of E sum_t |x_t - y_t|^p with the causality constraints
/// of `mode` written as linear equalities on the natural filtration of each tree.
double causal_lp(const DiscretePathMeasure& mu, const DiscretePathMeasure& nu, double p, CausalMode mode);

/// p-th powers of the transport costs.
struct MetricValues {
    double w = 0.0;            ///< classical
    double cw_forward = 0.0;   ///< causal from mu to nu
    double cw_backward = 0.0;  ///< causal from nu to mu
    double scw = 0.0;          ///< max of the two causal values
    double aw = 0.0;           ///< bi-causal
};

/// All five values; throws InternalError if AW >= SCW >= W fails beyond 1e-9.
MetricValues metric_suite(const DiscretePathMeasure& mu, const DiscretePathMeasure& nu, double p);

}  // namespace aot
