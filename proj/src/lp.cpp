#include "adapted_ot/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adapted_ot/errors.hpp"

namespace aot::lp {

void Problem::add_row(const std::vector<std::pair<std::size_t, double>>& coeffs, double value) {
    std::vector<double> row(n_vars, 0.0);
    for (const auto& [col, coef] : coeffs) {
        if (col >= n_vars) throw ConfigError("LP row references an unknown column");
        row[col] += coef;
    }
    rows.push_back(std::move(row));
    rhs.push_back(value);
}

namespace {

class Tableau {
public:
    Tableau(std::size_t m, std::size_t cols) : m_(m), cols_(cols), data_((m + 1) * (cols + 1), 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, cols_); }
    // Row m_ holds reduced costs; its rhs entry is minus the objective.
    double& cost(std::size_t c) { return at(m_, c); }

    void pivot(std::size_t r, std::size_t c) {
        const double p = at(r, c);
        double* pr = &data_[r * (cols_ + 1)];
        for (std::size_t j = 0; j <= cols_; ++j) pr[j] /= p;
        pr[c] = 1.0;
        for (std::size_t i = 0; i <= m_; ++i) {
            if (i == r) continue;
            double* row = &data_[i * (cols_ + 1)];
            const double f = row[c];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= cols_; ++j) row[j] -= f * pr[j];
            row[c] = 0.0;
        }
    }

    std::size_t m_;
    std::size_t cols_;

private:
    std::vector<double> data_;
};

// Runs primal simplex iterations on the tableau over the allowed columns.
Status iterate(Tableau& t, std::vector<std::size_t>& basis, const std::vector<bool>& allowed,
               const std::vector<bool>& row_active, double tol, std::size_t& pivots) {
    const std::size_t max_pivots = 50 * (t.m_ + t.cols_) + 1000;
    std::size_t degenerate_streak = 0;
    while (pivots < max_pivots) {
        const bool bland = degenerate_streak > 20;
        std::size_t enter = t.cols_;
        double best = -tol;
        for (std::size_t j = 0; j < t.cols_; ++j) {
            if (!allowed[j]) continue;
            const double d = t.cost(j);
            if (d < best) {
                enter = j;
                if (bland) break;
                best = d;
            }
        }
        if (enter == t.cols_) return Status::optimal;

        std::size_t leave = t.m_;
        double ratio = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < t.m_; ++i) {
            if (!row_active[i]) continue;
            const double a = t.at(i, enter);
            if (a <= tol) continue;
            const double r = std::max(0.0, t.rhs(i)) / a;
            if (leave == t.m_ || r < ratio - 1e-15) {
                ratio = r;
                leave = i;
            } else if (r <= ratio + 1e-15 && basis[i] < basis[leave]) {
                leave = i;
            }
        }
        if (leave == t.m_) return Status::unbounded;
        degenerate_streak = ratio <= 1e-15 ? degenerate_streak + 1 : 0;
        t.pivot(leave, enter);
        basis[leave] = enter;
        ++pivots;
    }
    return Status::iteration_limit;
}

}  // namespace

Solution solve(const Problem& problem, double tolerance) {
    const std::size_t n = problem.n_vars;
    const std::size_t m = problem.rows.size();
    if (problem.objective.size() != n || problem.rhs.size() != m) {
        throw ConfigError("LP dimensions are inconsistent");
    }
    const std::size_t cols = n + m;
    Tableau t(m, cols);
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double sign = problem.rhs[i] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) t.at(i, j) = sign * problem.rows[i][j];
        t.at(i, n + i) = 1.0;
        t.rhs(i) = sign * problem.rhs[i];
        basis[i] = n + i;
    }
    // Phase 1: minimise the sum of artificials.
    for (std::size_t j = 0; j <= cols; ++j) {
        double s = 0.0;
        if (j < n || j == cols) {
            for (std::size_t i = 0; i < m; ++i) s += t.at(i, j);
        }
        t.at(m, j) = -s;
    }
    std::vector<bool> allowed(cols, true);
    std::vector<bool> row_active(m, true);
    Solution sol;
    Status st = iterate(t, basis, allowed, row_active, tolerance, sol.pivots);
    if (st == Status::iteration_limit) {
        sol.status = st;
        return sol;
    }
    double scale = 1.0;
    for (double b : problem.rhs) scale = std::max(scale, std::abs(b));
    if (-t.at(m, cols) > 1e-9 * scale) {
        sol.status = Status::infeasible;
        return sol;
    }
    // Drive artificials out of the basis; rows where that is impossible are redundant.
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] < n) continue;
        std::size_t col = cols;
        double best = 1e-9;
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(t.at(i, j)) > best) {
                best = std::abs(t.at(i, j));
                col = j;
            }
        }
        if (col == cols) {
            row_active[i] = false;
        } else {
            t.pivot(i, col);
            basis[i] = col;
        }
    }
    for (std::size_t j = n; j < cols; ++j) allowed[j] = false;

    // Phase 2 reduced costs.
    for (std::size_t j = 0; j <= cols; ++j) t.at(m, j) = j < n ? problem.objective[j] : 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (!row_active[i]) continue;
        const double cb = basis[i] < n ? problem.objective[basis[i]] : 0.0;
        if (cb == 0.0) continue;
        for (std::size_t j = 0; j <= cols; ++j) t.at(m, j) -= cb * t.at(i, j);
    }
    st = iterate(t, basis, allowed, row_active, tolerance, sol.pivots);
    sol.status = st;
    if (st != Status::optimal) return sol;
    sol.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (row_active[i] && basis[i] < n) sol.x[basis[i]] = std::max(0.0, t.rhs(i));
    }
    sol.value = 0.0;
    for (std::size_t j = 0; j < n; ++j) sol.value += problem.objective[j] * sol.x[j];
    return sol;
}

}  // namespace aot::lp
