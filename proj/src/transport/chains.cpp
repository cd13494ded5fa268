#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "adapted_ot/errors.hpp"
#include "adapted_ot/transport.hpp"
#include "transport/detail.hpp"

namespace aot {

StateChain StateChain::from_lattice(const MarkovLattice& lattice) {
    lattice.validate();
    StateChain chain;
    chain.x0 = lattice.x0;
    for (int k = 0; k <= lattice.n_stages(); ++k) chain.values.push_back(lattice.support(k));
    for (const auto& stage : lattice.stages) {
        std::vector<SparseRow> rows;
        rows.reserve(stage.transitions.size());
        for (const auto& dense : stage.transitions) {
            SparseRow row;
            for (std::size_t j = 0; j < dense.size(); ++j) {
                if (dense[j] > 0.0) row.emplace_back(j, dense[j]);
            }
            rows.push_back(std::move(row));
        }
        chain.kernels.push_back(std::move(rows));
    }
    return chain;
}

StateChain StateChain::from_tree(const DiscretePathMeasure& measure) {
    measure.validate();
    const std::size_t T = measure.n_stages();
    StateChain chain;
    chain.x0 = measure.x0;
    chain.values.assign(T + 1, {});
    chain.values[0] = {measure.x0};
    chain.kernels.assign(T, {});

    // Prefix -> state index per stage, plus the mass of every prefix.
    std::vector<std::map<std::vector<double>, std::size_t>> index(T + 1);
    std::vector<std::vector<double>> mass(T + 1);
    index[0][{}] = 0;
    mass[0] = {1.0};
    std::vector<std::vector<std::size_t>> state_of(measure.paths.size(), std::vector<std::size_t>(T + 1, 0));
    for (std::size_t k = 1; k <= T; ++k) {
        for (std::size_t l = 0; l < measure.paths.size(); ++l) {
            if (measure.weights[l] <= 0.0) continue;
            std::vector<double> prefix(measure.paths[l].begin(), measure.paths[l].begin() + static_cast<long>(k));
            auto [it, inserted] = index[k].try_emplace(prefix, chain.values[k].size());
            if (inserted) {
                chain.values[k].push_back(prefix.back());
                mass[k].push_back(0.0);
            }
            mass[k][it->second] += measure.weights[l];
            state_of[l][k] = it->second;
        }
    }
    for (std::size_t k = 0; k < T; ++k) {
        // Accumulate child masses per parent, then normalise.
        std::vector<std::map<std::size_t, double>> child_mass(chain.values[k].size());
        for (std::size_t l = 0; l < measure.paths.size(); ++l) {
            if (measure.weights[l] <= 0.0) continue;
            child_mass[state_of[l][k]][state_of[l][k + 1]] += measure.weights[l];
        }
        auto& rows = chain.kernels[k];
        rows.resize(chain.values[k].size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (const auto& [child, m] : child_mass[i]) rows[i].emplace_back(child, m / mass[k][i]);
        }
    }
    return chain;
}

namespace {

void check_compatible(const StateChain& x, const StateChain& y) {
    if (x.n_stages() != y.n_stages()) {
        throw ConfigError("chains have different stage counts: " + std::to_string(x.n_stages()) + " and " +
                          std::to_string(y.n_stages()));
    }
}

}  // namespace

CoupledChain kr_coupling(const StateChain& x, const StateChain& y) {
    check_compatible(x, y);
    const int N = x.n_stages();
    CoupledChain chain;
    chain.x = x;
    chain.y = y;
    chain.pairs.assign(static_cast<std::size_t>(N) + 1, {});
    chain.kernels.assign(static_cast<std::size_t>(N), {});
    chain.pairs[0] = {{0, 0}};
    for (int k = 0; k < N; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        std::map<std::pair<std::size_t, std::size_t>, std::size_t> next_index;
        auto& next_pairs = chain.pairs[ku + 1];
        chain.kernels[ku].resize(chain.pairs[ku].size());
        for (std::size_t s = 0; s < chain.pairs[ku].size(); ++s) {
            const auto [i, j] = chain.pairs[ku][s];
            const SparseRow& rx = x.kernels[ku][i];
            const SparseRow& ry = y.kernels[ku][j];
            std::vector<double> xa;
            std::vector<double> xw;
            std::vector<double> ya;
            std::vector<double> yw;
            for (const auto& [a, w] : rx) {
                xa.push_back(x.values[ku + 1][a]);
                xw.push_back(w);
            }
            for (const auto& [b, w] : ry) {
                ya.push_back(y.values[ku + 1][b]);
                yw.push_back(w);
            }
            const auto joint = detail::quantile_joint(xa, xw, ya, yw);
            SparseRow row;
            for (std::size_t a = 0; a < rx.size(); ++a) {
                for (std::size_t b = 0; b < ry.size(); ++b) {
                    if (joint[a][b] <= 0.0) continue;
                    const std::pair<std::size_t, std::size_t> key{rx[a].first, ry[b].first};
                    auto [it, inserted] = next_index.try_emplace(key, next_pairs.size());
                    if (inserted) next_pairs.push_back(key);
                    row.emplace_back(it->second, joint[a][b]);
                }
            }
            chain.kernels[ku][s] = std::move(row);
        }
    }
    return chain;
}

CoupledChain kr_coupling(const MarkovLattice& x, const MarkovLattice& y) {
    return kr_coupling(StateChain::from_lattice(x), StateChain::from_lattice(y));
}

double marginal_consistency_error(const CoupledChain& chain) {
    double err = 0.0;
    for (std::size_t k = 0; k < chain.kernels.size(); ++k) {
        for (std::size_t s = 0; s < chain.pairs[k].size(); ++s) {
            const auto [i, j] = chain.pairs[k][s];
            std::vector<double> px(chain.x.n_states(static_cast<int>(k) + 1), 0.0);
            std::vector<double> py(chain.y.n_states(static_cast<int>(k) + 1), 0.0);
            for (const auto& [t, w] : chain.kernels[k][s]) {
                px[chain.pairs[k + 1][t].first] += w;
                py[chain.pairs[k + 1][t].second] += w;
            }
            for (const auto& [a, w] : chain.x.kernels[k][i]) px[a] -= w;
            for (const auto& [b, w] : chain.y.kernels[k][j]) py[b] -= w;
            for (double d : px) err = std::max(err, std::abs(d));
            for (double d : py) err = std::max(err, std::abs(d));
        }
    }
    return err;
}

std::vector<double> stage_weights(int n_stages, bool scaled) {
    if (n_stages < 1) throw ConfigError("stage weights need at least one stage");
    return std::vector<double>(static_cast<std::size_t>(n_stages), scaled ? 1.0 / n_stages : 1.0);
}

double coupled_cost(const CoupledChain& chain, double p, bool scaled) {
    return coupled_cost(chain, p, stage_weights(chain.n_stages(), scaled));
}

double coupled_cost(const CoupledChain& chain, double p, const std::vector<double>& weights) {
    const int N = chain.n_stages();
    if (weights.size() != static_cast<std::size_t>(N)) throw ConfigError("need one weight per stage");
    std::vector<double> mass{1.0};
    double total = 0.0;
    for (int k = 0; k < N; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        std::vector<double> next(chain.pairs[ku + 1].size(), 0.0);
        for (std::size_t s = 0; s < mass.size(); ++s) {
            if (mass[s] == 0.0) continue;
            for (const auto& [t, w] : chain.kernels[ku][s]) next[t] += mass[s] * w;
        }
        double stage = 0.0;
        for (std::size_t t = 0; t < next.size(); ++t) {
            const auto [a, b] = chain.pairs[ku + 1][t];
            stage += next[t] * power_cost(chain.x.values[ku + 1][a], chain.y.values[ku + 1][b], p);
        }
        total += weights[ku] * stage;
        mass = std::move(next);
    }
    return total;
}

std::size_t BicausalSolution::policy_size() const {
    std::size_t n = 0;
    for (const auto& stage : policy) {
        for (const auto& plan : stage) n += plan.x_children.empty() ? 0 : 1;
    }
    return n;
}

BicausalSolution bicausal_dp(const StateChain& x, const StateChain& y, double p, const std::vector<double>& weights) {
    check_compatible(x, y);
    if (!(p >= 1.0)) throw ConfigError("cost order p must be >= 1");
    const int N = x.n_stages();
    if (weights.size() != static_cast<std::size_t>(N)) throw ConfigError("need one weight per stage");
    BicausalSolution sol;
    sol.p = p;
    sol.weights = weights;
    sol.policy.assign(static_cast<std::size_t>(N), {});
    for (int k = 0; k <= N; ++k) sol.ny.push_back(y.n_states(k));

    // V holds V_{k+1} while stage k is processed.
    std::vector<double> V(x.n_states(N) * y.n_states(N), 0.0);
    for (int k = N - 1; k >= 0; --k) {
        const auto ku = static_cast<std::size_t>(k);
        const std::size_t nx = x.n_states(k);
        const std::size_t ny = y.n_states(k);
        const std::size_t ny_next = y.n_states(k + 1);
        std::vector<double> V_k(nx * ny, 0.0);
        auto& stage_policy = sol.policy[ku];
        stage_policy.resize(nx * ny);
        for (std::size_t i = 0; i < nx; ++i) {
            for (std::size_t j = 0; j < ny; ++j) {
                const SparseRow& rx = x.kernels[ku][i];
                const SparseRow& ry = y.kernels[ku][j];
                if (rx.empty() || ry.empty()) continue;
                ConditionalPlan cp;
                std::vector<double> row_m;
                std::vector<double> col_m;
                for (const auto& [a, w] : rx) {
                    cp.x_children.push_back(a);
                    row_m.push_back(w);
                }
                for (const auto& [b, w] : ry) {
                    cp.y_children.push_back(b);
                    col_m.push_back(w);
                }
                std::vector<std::vector<double>> cost(rx.size(), std::vector<double>(ry.size()));
                for (std::size_t a = 0; a < rx.size(); ++a) {
                    const double xv = x.values[ku + 1][rx[a].first];
                    for (std::size_t b = 0; b < ry.size(); ++b) {
                        const double yv = y.values[ku + 1][ry[b].first];
                        cost[a][b] = weights[ku] * power_cost(xv, yv, p) + V[rx[a].first * ny_next + ry[b].first];
                    }
                }
                cp.plan = transportation_lp(cost, row_m, col_m);
                V_k[i * ny + j] = cp.plan.cost;
                stage_policy[i * ny + j] = std::move(cp);
            }
        }
        V = std::move(V_k);
    }
    sol.value = V[0];
    return sol;
}

BicausalSolution bicausal_dp(const StateChain& x, const StateChain& y, double p, bool scaled) {
    return bicausal_dp(x, y, p, stage_weights(x.n_stages(), scaled));
}

BicausalSolution bicausal_dp(const MarkovLattice& x, const MarkovLattice& y, double p, bool scaled) {
    return bicausal_dp(StateChain::from_lattice(x), StateChain::from_lattice(y), p, scaled);
}

double evaluate_policy(const StateChain& x, const StateChain& y, const BicausalSolution& solution) {
    check_compatible(x, y);
    const int N = x.n_stages();
    std::map<std::pair<std::size_t, std::size_t>, double> mass{{{0, 0}, 1.0}};
    double total = 0.0;
    for (int k = 0; k < N; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        std::map<std::pair<std::size_t, std::size_t>, double> next;
        for (const auto& [state, m] : mass) {
            if (m == 0.0) continue;
            const auto& cp = solution.policy[ku][state.first * solution.ny[ku] + state.second];
            for (std::size_t a = 0; a < cp.x_children.size(); ++a) {
                for (std::size_t b = 0; b < cp.y_children.size(); ++b) {
                    const double g = cp.plan.joint[a][b];
                    if (g <= 0.0) continue;
                    const std::size_t ca = cp.x_children[a];
                    const std::size_t cb = cp.y_children[b];
                    total += m * g * solution.weights[ku] *
                             power_cost(x.values[ku + 1][ca], y.values[ku + 1][cb], solution.p);
                    next[{ca, cb}] += m * g;
                }
            }
        }
        mass = std::move(next);
    }
    return total;
}

}  // namespace aot
