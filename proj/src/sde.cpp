#include "adapted_ot/sde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adapted_ot/errors.hpp"
#include "adapted_ot/noise.hpp"

namespace aot {

namespace {

void check_increments(const TimeGrid& grid, std::span<const double> increments) {
    if (increments.size() != static_cast<std::size_t>(grid.n_steps())) {
        throw ConfigError("increment count " + std::to_string(increments.size()) + " does not match " +
                          std::to_string(grid.n_steps()) + " grid steps");
    }
}

void check_finite(double x, int stage) {
    if (!std::isfinite(x) || std::abs(x) > kDivergenceThreshold) {
        throw DivergenceError("scheme diverged: |x| = " + std::to_string(std::abs(x)), stage);
    }
}

}  // namespace

double scheme_step(const CoefficientSpec& b, const CoefficientSpec& sigma, const TimeGrid& grid, int k,
                   std::span<const double> prefix, double delta) {
    const double x = prefix[static_cast<std::size_t>(k)];
    const double drift = eval_coefficient(b, grid, k, prefix);
    const double vol = eval_coefficient(sigma, grid, k, prefix);
    return x + grid.h() * drift + vol * delta;
}

SamplePath euler_maruyama(const CoefficientSpec& b, const CoefficientSpec& sigma, const TimeGrid& grid, double x0,
                          std::span<const double> increments) {
    check_increments(grid, increments);
    SamplePath path{grid, {}};
    path.values.reserve(grid.n_points());
    path.values.push_back(x0);
    for (int k = 0; k < grid.n_steps(); ++k) {
        const double next = scheme_step(b, sigma, grid, k, path.values, increments[static_cast<std::size_t>(k)]);
        check_finite(next, k + 1);
        path.values.push_back(next);
    }
    return path;
}

SamplePath monotone_em(const CoefficientSpec& b, const CoefficientSpec& sigma, const TimeGrid& grid, double K,
                       double x0, std::span<const double> truncated_increments) {
    check_increments(grid, truncated_increments);
    const double A = truncation_level(grid.h(), K);
    for (double d : truncated_increments) {
        if (std::abs(d) > A * (1.0 + 1e-12)) {
            throw ConfigError("increment " + std::to_string(d) + " exceeds the truncation level " +
                              std::to_string(A));
        }
    }
    return euler_maruyama(b, sigma, grid, x0, truncated_increments);
}

ZvonkinTransform::ZvonkinTransform(const CoefficientSpec& b, const CoefficientSpec& sigma, double x0, double radius,
                                   int intervals)
    : sigma_(sigma.with_role(CoefficientRole::diffusion)) {
    if (!b.is_markovian() || !sigma.is_markovian()) {
        throw ConfigError("Zvonkin transform needs Markovian coefficients");
    }
    if (!(radius > 0.0) || intervals < 2 || intervals % 2 != 0) {
        throw ConfigError("Zvonkin table needs a positive radius and an even interval count");
    }
    const int n = intervals;
    const double dx = 2.0 * radius / n;
    const auto center = static_cast<std::size_t>(n / 2);
    nodes_.resize(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) nodes_[static_cast<std::size_t>(i)] = x0 - radius + i * dx;
    nodes_[center] = x0;

    double sup_b = 0.0;
    double inf_sigma = std::numeric_limits<double>::infinity();
    auto g = [&](double y) {
        const double s = sigma_(y);
        if (!(s > 0.0)) {
            throw ConfigError("Zvonkin transform needs a uniformly positive diffusion; sigma(" + std::to_string(y) +
                              ") = " + std::to_string(s));
        }
        return 2.0 * b(y) / (s * s);
    };
    for (double x : nodes_) {
        sup_b = std::max(sup_b, std::abs(b(x)));
        inf_sigma = std::min(inf_sigma, sigma_(x));
    }
    if (!(inf_sigma > 0.0)) throw ConfigError("Zvonkin transform needs inf sigma > 0 on the table");

    inner_.assign(nodes_.size(), 0.0);
    t_values_.assign(nodes_.size(), 0.0);
    // Integrate outward from x0 in both directions; each interval uses Simpson's
    // rule, with the inner integral at the midpoint from a half-interval Simpson.
    auto step = [&](std::size_t from, std::size_t to) {
        const double a = nodes_[from];
        const double c = nodes_[to];
        const double m = 0.5 * (a + c);
        const double ga = g(a);
        const double gm = g(m);
        const double gc = g(c);
        const double gq = g(0.5 * (a + m));
        const double inner_m = inner_[from] + (m - a) / 6.0 * (ga + 4.0 * gq + gm);
        inner_[to] = inner_[from] + (c - a) / 6.0 * (ga + 4.0 * gm + gc);
        t_values_[to] = t_values_[from] + (c - a) / 6.0 *
                                              (std::exp(-inner_[from]) + 4.0 * std::exp(-inner_m) +
                                               std::exp(-inner_[to]));
    };
    for (std::size_t i = center; i + 1 < nodes_.size(); ++i) step(i, i + 1);
    for (std::size_t i = center; i > 0; --i) step(i, i - 1);

    for (std::size_t i = 1; i < t_values_.size(); ++i) {
        if (!(t_values_[i] > t_values_[i - 1]) || !std::isfinite(t_values_[i])) {
            throw ConfigError("Zvonkin transform is not strictly increasing on the table; shrink the radius");
        }
    }

    std::vector<double> vol(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) vol[i] = sigma_(nodes_[i]) * std::exp(-inner_[i]);
    transformed_sigma_ = CoefficientSpec::table(t_values_, std::move(vol), CoefficientRole::diffusion);

    const auto lip = growth_bounds(sigma_).lipschitz.value_or(0.0);
    certificate_ = lip + 2.0 * sup_b / inf_sigma;
}

std::size_t ZvonkinTransform::locate(double x) const {
    if (!(x >= nodes_.front() && x <= nodes_.back())) {
        throw RangeError("x = " + std::to_string(x) + " outside the Zvonkin table [" + std::to_string(nodes_.front()) +
                         ", " + std::to_string(nodes_.back()) + "]; enlarge the table");
    }
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    const auto i = static_cast<std::size_t>(it - nodes_.begin());
    return std::min(i, nodes_.size() - 1) - 1;
}

double ZvonkinTransform::T(double x) const {
    const std::size_t i = locate(x);
    const double w = (x - nodes_[i]) / (nodes_[i + 1] - nodes_[i]);
    return t_values_[i] + w * (t_values_[i + 1] - t_values_[i]);
}

double ZvonkinTransform::T_prime(double x) const {
    const std::size_t i = locate(x);
    const double w = (x - nodes_[i]) / (nodes_[i + 1] - nodes_[i]);
    return std::exp(-(inner_[i] + w * (inner_[i + 1] - inner_[i])));
}

double ZvonkinTransform::T_inverse(double y) const {
    if (!(y >= t_values_.front() && y <= t_values_.back())) {
        throw RangeError("y = " + std::to_string(y) + " outside the transformed range [" +
                         std::to_string(t_values_.front()) + ", " + std::to_string(t_values_.back()) +
                         "]; enlarge the table");
    }
    auto it = std::upper_bound(t_values_.begin(), t_values_.end(), y);
    const auto i = std::min(static_cast<std::size_t>(it - t_values_.begin()), t_values_.size() - 1) - 1;
    const double w = (y - t_values_[i]) / (t_values_[i + 1] - t_values_[i]);
    return nodes_[i] + w * (nodes_[i + 1] - nodes_[i]);
}

double transformed_step(const ZvonkinTransform& transform, double x, double delta) {
    const double y = transform.T(x) + transform.T_prime(x) * transform.sigma()(x) * delta;
    return transform.T_inverse(y);
}

SamplePath transformed_monotone_em(const ZvonkinTransform& transform, const TimeGrid& grid, double K, double x0,
                                   std::span<const double> truncated_increments) {
    check_increments(grid, truncated_increments);
    const double A = truncation_level(grid.h(), K);
    SamplePath path{grid, {}};
    path.values.reserve(grid.n_points());
    path.values.push_back(x0);
    double x = x0;
    for (int k = 0; k < grid.n_steps(); ++k) {
        const double d = truncated_increments[static_cast<std::size_t>(k)];
        if (std::abs(d) > A * (1.0 + 1e-12)) {
            throw ConfigError("increment exceeds the truncation level");
        }
        x = transformed_step(transform, x, d);
        path.values.push_back(x);
    }
    return path;
}

}  // namespace aot
