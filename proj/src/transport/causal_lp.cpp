#include <algorithm>
#include <cmath>
#include <map>

#include "adapted_ot/errors.hpp"
#include "adapted_ot/lp.hpp"
#include "adapted_ot/transport.hpp"

namespace aot {

namespace {

// Paths with positive mass, duplicates merged, plus the prefix tree on top.
struct Tree {
    std::vector<std::vector<double>> leaves;
    std::vector<double> mass;
    /// node_of[t][l]: index of the stage-t prefix of leaf l (t = 1..T)
    std::vector<std::vector<std::size_t>> node_of;
    /// node_mass[t][u]
    std::vector<std::vector<double>> node_mass;
};

Tree make_tree(const DiscretePathMeasure& measure) {
    measure.validate();
    Tree tree;
    std::map<std::vector<double>, std::size_t> leaf_index;
    for (std::size_t l = 0; l < measure.paths.size(); ++l) {
        if (measure.weights[l] <= 0.0) continue;
        auto [it, inserted] = leaf_index.try_emplace(measure.paths[l], tree.leaves.size());
        if (inserted) {
            tree.leaves.push_back(measure.paths[l]);
            tree.mass.push_back(0.0);
        }
        tree.mass[it->second] += measure.weights[l];
    }
    if (tree.leaves.size() > kMaxCausalLpPaths) {
        throw ConfigError("causal LP accepts at most " + std::to_string(kMaxCausalLpPaths) + " paths per marginal, got " +
                          std::to_string(tree.leaves.size()));
    }
    const std::size_t T = measure.n_stages();
    tree.node_of.assign(T + 1, std::vector<std::size_t>(tree.leaves.size(), 0));
    tree.node_mass.assign(T + 1, {});
    tree.node_mass[0] = {1.0};
    for (std::size_t t = 1; t <= T; ++t) {
        std::map<std::vector<double>, std::size_t> idx;
        for (std::size_t l = 0; l < tree.leaves.size(); ++l) {
            std::vector<double> prefix(tree.leaves[l].begin(), tree.leaves[l].begin() + static_cast<long>(t));
            auto [it, inserted] = idx.try_emplace(prefix, tree.node_mass[t].size());
            if (inserted) tree.node_mass[t].push_back(0.0);
            tree.node_mass[t][it->second] += tree.mass[l];
            tree.node_of[t][l] = it->second;
        }
    }
    return tree;
}

// Rows expressing: the past of `b` up to t is independent of the future of `a`
// given the past of `a` up to t.  var(la, lb) maps a leaf pair to its column.
template <class VarIndex>
void add_causality_rows(lp::Problem& problem, const Tree& a, const Tree& b, VarIndex var) {
    const std::size_t T = a.node_of.size() - 1;
    for (std::size_t t = 1; t < T; ++t) {
        for (std::size_t la = 0; la < a.leaves.size(); ++la) {
            const std::size_t u = a.node_of[t][la];
            for (std::size_t v = 0; v < b.node_mass[t].size(); ++v) {
                // pi(la, v) mu(u) - mu(la) sum_{l2 under u} pi(l2, v) = 0
                std::vector<std::pair<std::size_t, double>> row;
                for (std::size_t lb = 0; lb < b.leaves.size(); ++lb) {
                    if (b.node_of[t][lb] != v) continue;
                    row.emplace_back(var(la, lb), a.node_mass[t][u]);
                    for (std::size_t l2 = 0; l2 < a.leaves.size(); ++l2) {
                        if (a.node_of[t][l2] == u) row.emplace_back(var(l2, lb), -a.mass[la]);
                    }
                }
                problem.add_row(row, 0.0);
            }
        }
    }
}

}  // namespace

double causal_lp(const DiscretePathMeasure& mu, const DiscretePathMeasure& nu, double p, CausalMode mode) {
    if (mu.n_stages() != nu.n_stages()) throw ConfigError("path measures have different stage counts");
    if (!(p >= 1.0)) throw ConfigError("cost order p must be >= 1");
    const Tree x = make_tree(mu);
    const Tree y = make_tree(nu);
    const std::size_t nx = x.leaves.size();
    const std::size_t ny = y.leaves.size();
    auto var = [ny](std::size_t i, std::size_t j) { return i * ny + j; };

    lp::Problem problem;
    problem.n_vars = nx * ny;
    problem.objective.assign(problem.n_vars, 0.0);
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < ny; ++j) {
            double c = 0.0;
            for (std::size_t t = 0; t < mu.n_stages(); ++t) c += power_cost(x.leaves[i][t], y.leaves[j][t], p);
            problem.objective[var(i, j)] = c;
        }
    }
    for (std::size_t i = 0; i < nx; ++i) {
        std::vector<std::pair<std::size_t, double>> row;
        for (std::size_t j = 0; j < ny; ++j) row.emplace_back(var(i, j), 1.0);
        problem.add_row(row, x.mass[i]);
    }
    for (std::size_t j = 0; j < ny; ++j) {
        std::vector<std::pair<std::size_t, double>> row;
        for (std::size_t i = 0; i < nx; ++i) row.emplace_back(var(i, j), 1.0);
        problem.add_row(row, y.mass[j]);
    }
    if (mode == CausalMode::causal || mode == CausalMode::bicausal) add_causality_rows(problem, x, y, var);
    if (mode == CausalMode::anticausal || mode == CausalMode::bicausal) {
        add_causality_rows(problem, y, x, [&](std::size_t j, std::size_t i) { return var(i, j); });
    }
    const lp::Solution sol = lp::solve(problem);
    if (sol.status != lp::Status::optimal) {
        throw InternalError("causal transport LP did not reach an optimum");
    }
    return sol.value;
}

MetricValues metric_suite(const DiscretePathMeasure& mu, const DiscretePathMeasure& nu, double p) {
    MetricValues m;
    m.w = causal_lp(mu, nu, p, CausalMode::classical);
    m.cw_forward = causal_lp(mu, nu, p, CausalMode::causal);
    m.cw_backward = causal_lp(mu, nu, p, CausalMode::anticausal);
    m.scw = std::max(m.cw_forward, m.cw_backward);
    m.aw = causal_lp(mu, nu, p, CausalMode::bicausal);
    const double tol = 1e-9 * std::max(1.0, m.aw);
    if (m.aw < m.scw - tol || m.scw < m.w - tol) {
        throw InternalError("metric ordering AW >= SCW >= W violated");
    }
    return m;
}

}  // namespace aot
