#pragma once

// Small dense linear programs: minimise c^T x subject to A x = b, x >= 0.
// Two-phase tableau simplex; meant for the tiny causality-constrained
// transport problems, not for large sparse models.

#include <cstddef>
#include <vector>

namespace aot::lp {

struct Problem {
    std::size_t n_vars = 0;
    std::vector<double> objective;            ///< size n_vars
    std::vector<std::vector<double>> rows;    ///< equality rows, each size n_vars
    std::vector<double> rhs;

    /// Appends a row given as (column, coefficient) pairs.
    void add_row(const std::vector<std::pair<std::size_t, double>>& coeffs, double value);
};

enum class Status { optimal, infeasible, unbounded, iteration_limit };

struct Solution {
    Status status = Status::optimal;
    double value = 0.0;
    std::vector<double> x;
    std::size_t pivots = 0;
};

Solution solve(const Problem& problem, double tolerance = 1e-10);

}  // namespace aot::lp
