#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "adapted_ot/errors.hpp"
#include "adapted_ot/transport.hpp"
#include "transport/detail.hpp"

namespace aot {

void DiscreteMeasure::validate() const {
    if (atoms.empty() || atoms.size() != weights.size()) {
        throw ConfigError("discrete measure needs one weight per atom");
    }
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw ConfigError("discrete measure weights must be nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > kProbabilityTolerance) {
        throw ConfigError("discrete measure weights sum to " + std::to_string(total));
    }
}

double quantile(const DiscreteMeasure& measure, double u) {
    measure.validate();
    if (!(u > 0.0 && u <= 1.0)) throw DomainError("quantile level must lie in (0, 1]");
    std::vector<std::size_t> order(measure.atoms.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return measure.atoms[a] < measure.atoms[b]; });
    double F = 0.0;
    for (std::size_t i : order) {
        F += measure.weights[i];
        // Guards the last atom against rounding in the running sum.
        if (F >= u - 1e-15 && measure.weights[i] > 0.0) return measure.atoms[i];
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (measure.weights[*it] > 0.0) return measure.atoms[*it];
    }
    throw InternalError("quantile of an empty measure");
}

double TransportPlan::marginal_error() const {
    double err = 0.0;
    for (std::size_t i = 0; i < row_marginal.size(); ++i) {
        const double s = std::accumulate(joint[i].begin(), joint[i].end(), 0.0);
        err = std::max(err, std::abs(s - row_marginal[i]));
    }
    for (std::size_t j = 0; j < col_marginal.size(); ++j) {
        double s = 0.0;
        for (const auto& row : joint) s += row[j];
        err = std::max(err, std::abs(s - col_marginal[j]));
    }
    return err;
}

double power_cost(double x, double y, double p) {
    const double d = std::abs(x - y);
    if (p == 1.0) return d;
    if (p == 2.0) return d * d;
    return std::pow(d, p);
}

namespace detail {

std::vector<std::vector<double>> quantile_joint(const std::vector<double>& xa, const std::vector<double>& xw,
                                                const std::vector<double>& ya, const std::vector<double>& yw) {
    std::vector<std::size_t> ox(xa.size());
    std::vector<std::size_t> oy(ya.size());
    std::iota(ox.begin(), ox.end(), std::size_t{0});
    std::iota(oy.begin(), oy.end(), std::size_t{0});
    std::stable_sort(ox.begin(), ox.end(), [&](std::size_t a, std::size_t b) { return xa[a] < xa[b]; });
    std::stable_sort(oy.begin(), oy.end(), [&](std::size_t a, std::size_t b) { return ya[a] < ya[b]; });
    std::vector<std::vector<double>> joint(xa.size(), std::vector<double>(ya.size(), 0.0));
    std::size_t i = 0;
    std::size_t j = 0;
    double rx = xw.empty() ? 0.0 : xw[ox[0]];
    double ry = yw.empty() ? 0.0 : yw[oy[0]];
    while (i < ox.size() && j < oy.size()) {
        const double m = std::min(rx, ry);
        if (m > 0.0) joint[ox[i]][oy[j]] += m;
        rx -= m;
        ry -= m;
        const bool last_x = i + 1 == ox.size();
        const bool last_y = j + 1 == oy.size();
        if (last_x && last_y) break;
        // Advance whichever side is exhausted; the last atom on each side
        // absorbs rounding residue.
        if (!last_x && (rx <= ry || last_y)) {
            ++i;
            rx += xw[ox[i]];
        } else {
            ++j;
            ry += yw[oy[j]];
        }
    }
    if (i < ox.size() && j < oy.size()) {
        const double residue = std::max(rx, ry);
        if (residue > 0.0) joint[ox[i]][oy[j]] += residue;
    }
    return joint;
}

}  // namespace detail

TransportPlan monotone_rearrangement(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
    mu.validate();
    nu.validate();
    TransportPlan plan;
    plan.row_marginal = mu.weights;
    plan.col_marginal = nu.weights;
    plan.joint = detail::quantile_joint(mu.atoms, mu.weights, nu.atoms, nu.weights);
    for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
        for (std::size_t j = 0; j < nu.atoms.size(); ++j) {
            if (plan.joint[i][j] != 0.0) plan.cost += plan.joint[i][j] * power_cost(mu.atoms[i], nu.atoms[j], p);
        }
    }
    return plan;
}

namespace {

struct Cell {
    std::size_t row;
    std::size_t col;
};

class TransportationSimplex {
public:
    TransportationSimplex(const std::vector<std::vector<double>>& cost, std::vector<double> supply,
                          std::vector<double> demand)
        : cost_(cost), m_(supply.size()), n_(demand.size()), flow_(m_, std::vector<double>(n_, 0.0)),
          basic_(m_, std::vector<bool>(n_, false)) {
        north_west_corner(std::move(supply), std::move(demand));
    }

    void solve() {
        double scale = 0.0;
        for (const auto& row : cost_) {
            for (double c : row) scale = std::max(scale, std::abs(c));
        }
        const double tol = 1e-12 * std::max(1.0, scale);
        const std::size_t max_iter = 100 * (m_ + n_) * (m_ + n_) + 100;
        std::size_t degenerate = 0;
        for (std::size_t iter = 0; iter < max_iter; ++iter) {
            potentials();
            const bool bland = degenerate > 2 * (m_ + n_);
            Cell enter{m_, n_};
            double best = -tol;
            for (std::size_t i = 0; i < m_ && !(bland && enter.row < m_); ++i) {
                for (std::size_t j = 0; j < n_; ++j) {
                    if (basic_[i][j]) continue;
                    const double d = cost_[i][j] - u_[i] - v_[j];
                    if (d < best) {
                        best = d;
                        enter = {i, j};
                        if (bland) break;
                    }
                }
            }
            if (enter.row == m_) return;
            const bool moved = pivot(enter);
            degenerate = moved ? 0 : degenerate + 1;
        }
        throw InternalError("transportation simplex did not converge");
    }

    const std::vector<std::vector<double>>& flow() const { return flow_; }

private:
    void north_west_corner(std::vector<double> supply, std::vector<double> demand) {
        std::size_t i = 0;
        std::size_t j = 0;
        while (true) {
            const double x = std::max(0.0, std::min(supply[i], demand[j]));
            flow_[i][j] = x;
            basic_[i][j] = true;
            supply[i] -= x;
            demand[j] -= x;
            if (i + 1 == m_ && j + 1 == n_) break;
            if (i + 1 == m_) {
                ++j;
            } else if (j + 1 == n_) {
                ++i;
            } else if (supply[i] <= demand[j]) {
                ++i;
            } else {
                ++j;
            }
        }
        // Residue from unequal rounding lands on the final cell.
        flow_[m_ - 1][n_ - 1] += std::max(0.0, std::max(supply[m_ - 1], demand[n_ - 1]));
    }

    // u_i + v_j = c_ij on the basic spanning tree, with u_0 = 0.
    void potentials() {
        u_.assign(m_, std::numeric_limits<double>::quiet_NaN());
        v_.assign(n_, std::numeric_limits<double>::quiet_NaN());
        u_[0] = 0.0;
        std::queue<std::size_t> q;  // nodes: rows 0..m-1, cols m..m+n-1
        q.push(0);
        while (!q.empty()) {
            const std::size_t node = q.front();
            q.pop();
            if (node < m_) {
                for (std::size_t j = 0; j < n_; ++j) {
                    if (basic_[node][j] && std::isnan(v_[j])) {
                        v_[j] = cost_[node][j] - u_[node];
                        q.push(m_ + j);
                    }
                }
            } else {
                const std::size_t j = node - m_;
                for (std::size_t i = 0; i < m_; ++i) {
                    if (basic_[i][j] && std::isnan(u_[i])) {
                        u_[i] = cost_[i][j] - v_[j];
                        q.push(i);
                    }
                }
            }
        }
    }

    // Path in the basis tree from row `enter.row` to column `enter.col`,
    // returned as the list of basic cells along it.
    std::vector<Cell> tree_path(Cell enter) const {
        const std::size_t total = m_ + n_;
        std::vector<std::size_t> parent(total, total);
        std::vector<bool> seen(total, false);
        std::queue<std::size_t> q;
        q.push(enter.row);
        seen[enter.row] = true;
        const std::size_t target = m_ + enter.col;
        while (!q.empty() && !seen[target]) {
            const std::size_t node = q.front();
            q.pop();
            if (node < m_) {
                for (std::size_t j = 0; j < n_; ++j) {
                    if (basic_[node][j] && !seen[m_ + j]) {
                        seen[m_ + j] = true;
                        parent[m_ + j] = node;
                        q.push(m_ + j);
                    }
                }
            } else {
                const std::size_t j = node - m_;
                for (std::size_t i = 0; i < m_; ++i) {
                    if (basic_[i][j] && !seen[i]) {
                        seen[i] = true;
                        parent[i] = node;
                        q.push(i);
                    }
                }
            }
        }
        if (!seen[target]) throw InternalError("transportation basis is not a spanning tree");
        std::vector<Cell> path;  // from the target column back to the entering row
        std::size_t node = target;
        while (node != enter.row) {
            const std::size_t prev = parent[node];
            if (node >= m_) {
                path.push_back({prev, node - m_});
            } else {
                path.push_back({node, prev - m_});
            }
            node = prev;
        }
        return path;
    }

    // Returns true when the pivot moved a positive amount of flow.
    bool pivot(Cell enter) {
        const auto path = tree_path(enter);
        // Cells at even positions (starting next to the entering column) lose flow.
        double theta = std::numeric_limits<double>::infinity();
        std::size_t leave = path.size();
        for (std::size_t k = 0; k < path.size(); k += 2) {
            const auto& c = path[k];
            const double f = flow_[c.row][c.col];
            if (f < theta || (f == theta && leave < path.size() &&
                              (c.row < path[leave].row || (c.row == path[leave].row && c.col < path[leave].col)))) {
                theta = f;
                leave = k;
            }
        }
        for (std::size_t k = 0; k < path.size(); ++k) {
            const auto& c = path[k];
            flow_[c.row][c.col] += k % 2 == 0 ? -theta : theta;
        }
        flow_[enter.row][enter.col] = theta;
        basic_[enter.row][enter.col] = true;
        const auto& out = path[leave];
        basic_[out.row][out.col] = false;
        flow_[out.row][out.col] = 0.0;
        return theta > 0.0;
    }

    const std::vector<std::vector<double>>& cost_;
    std::size_t m_;
    std::size_t n_;
    std::vector<std::vector<double>> flow_;
    std::vector<std::vector<bool>> basic_;
    std::vector<double> u_;
    std::vector<double> v_;
};

}  // namespace

TransportPlan transportation_lp(const std::vector<std::vector<double>>& cost, const std::vector<double>& row_marginal,
                                const std::vector<double>& col_marginal) {
    const std::size_t m = row_marginal.size();
    const std::size_t n = col_marginal.size();
    if (m == 0 || n == 0) throw ConfigError("transportation problem needs nonempty marginals");
    if (cost.size() != m) throw ConfigError("cost matrix has the wrong number of rows");
    for (const auto& row : cost) {
        if (row.size() != n) throw ConfigError("cost matrix has the wrong number of columns");
    }
    for (double w : row_marginal) {
        if (!(w >= 0.0)) throw ConfigError("row marginal must be nonnegative");
    }
    for (double w : col_marginal) {
        if (!(w >= 0.0)) throw ConfigError("column marginal must be nonnegative");
    }
    const double sr = std::accumulate(row_marginal.begin(), row_marginal.end(), 0.0);
    const double sc = std::accumulate(col_marginal.begin(), col_marginal.end(), 0.0);
    if (std::abs(sr - sc) > 1e-9) {
        throw ConfigError("infeasible transportation problem: marginal sums " + std::to_string(sr) + " and " +
                          std::to_string(sc) + " differ");
    }
    TransportPlan plan;
    plan.row_marginal = row_marginal;
    plan.col_marginal = col_marginal;
    if (m == 1 || n == 1) {
        // Forced product plan.
        plan.joint.assign(m, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) plan.joint[i][j] = m == 1 ? col_marginal[j] : row_marginal[i];
        }
    } else {
        TransportationSimplex simplex(cost, row_marginal, col_marginal);
        simplex.solve();
        plan.joint = simplex.flow();
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) plan.cost += plan.joint[i][j] * cost[i][j];
    }
    return plan;
}

}  // namespace aot
