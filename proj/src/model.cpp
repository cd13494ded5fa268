#include "adapted_ot/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adapted_ot/errors.hpp"

namespace aot {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void validate_table(const TableCoef& t) {
    if (t.knots.size() < 2 || t.knots.size() != t.values.size()) {
        throw ConfigError("table coefficient needs >= 2 knots and one value per knot");
    }
    for (std::size_t i = 1; i < t.knots.size(); ++i) {
        if (!(t.knots[i] > t.knots[i - 1])) {
            throw ConfigError("table knots must be strictly increasing");
        }
    }
    for (double v : t.values) {
        if (!std::isfinite(v)) throw ConfigError("table values must be finite");
    }
}

double eval_table(const TableCoef& t, double x) {
    if (!(x >= t.knots.front() && x <= t.knots.back())) {
        throw RangeError("table coefficient queried at " + std::to_string(x) + " outside [" +
                         std::to_string(t.knots.front()) + ", " + std::to_string(t.knots.back()) +
                         "]; extrapolation is forbidden");
    }
    auto it = std::upper_bound(t.knots.begin(), t.knots.end(), x);
    std::size_t i = it == t.knots.end() ? t.knots.size() - 1 : static_cast<std::size_t>(it - t.knots.begin());
    std::size_t j = i - 1;
    const double w = (x - t.knots[j]) / (t.knots[i] - t.knots[j]);
    return t.values[j] + w * (t.values[i] - t.values[j]);
}

}  // namespace

CoefficientSpec::CoefficientSpec(Kind kind, CoefficientRole role) : kind_(std::move(kind)), role_(role) {
    if (const auto* t = std::get_if<TableCoef>(&kind_)) validate_table(*t);
    if (const auto* s = std::get_if<SignSwitchCoef>(&kind_)) {
        if (role_ == CoefficientRole::diffusion) throw ConfigError("sign-switch is a drift-only kind");
        if (!(s->switch_time >= 0.0 && s->switch_time <= 1.0)) {
            throw ConfigError("sign-switch time must lie in [0, 1]");
        }
    }
}

CoefficientSpec CoefficientSpec::constant(double c, CoefficientRole role) {
    return {ConstantCoef{c}, role};
}

CoefficientSpec CoefficientSpec::affine(double a, double slope, CoefficientRole role) {
    return {AffineCoef{a, slope}, role};
}

CoefficientSpec CoefficientSpec::ou(double theta) { return {OUCoef{theta}, CoefficientRole::drift}; }

CoefficientSpec CoefficientSpec::table(std::vector<double> knots, std::vector<double> values,
                                       CoefficientRole role) {
    return {TableCoef{std::move(knots), std::move(values)}, role};
}

CoefficientSpec CoefficientSpec::sign_switch(double level, double switch_time) {
    return {SignSwitchCoef{level, switch_time}, CoefficientRole::drift};
}

CoefficientSpec CoefficientSpec::with_role(CoefficientRole role) const { return {kind_, role}; }

bool CoefficientSpec::is_markovian() const noexcept {
    return !std::holds_alternative<SignSwitchCoef>(kind_);
}

bool CoefficientSpec::is_constant() const noexcept {
    if (std::holds_alternative<ConstantCoef>(kind_)) return true;
    if (const auto* a = std::get_if<AffineCoef>(&kind_)) return a->slope == 0.0;
    if (const auto* o = std::get_if<OUCoef>(&kind_)) return o->theta == 0.0;
    return false;
}

double CoefficientSpec::operator()(double x) const {
    const double v = std::visit(
        overloaded{
            [](const ConstantCoef& c) { return c.c; },
            [x](const AffineCoef& a) { return a.a + a.slope * x; },
            [x](const OUCoef& o) { return -o.theta * x; },
            [x](const TableCoef& t) { return eval_table(t, x); },
            [](const SignSwitchCoef&) -> double {
                throw ConfigError("sign-switch drift is path-dependent; use eval_coefficient");
            },
        },
        kind_);
    if (role_ == CoefficientRole::diffusion && v < 0.0) {
        throw DomainError("diffusion coefficient evaluates to " + std::to_string(v) + " < 0 at x = " +
                          std::to_string(x));
    }
    return v;
}

std::string CoefficientSpec::kind_name() const {
    return std::visit(overloaded{
                          [](const ConstantCoef&) { return std::string("constant"); },
                          [](const AffineCoef&) { return std::string("affine"); },
                          [](const OUCoef&) { return std::string("ou"); },
                          [](const TableCoef&) { return std::string("table"); },
                          [](const SignSwitchCoef&) { return std::string("sign-switch"); },
                      },
                      kind_);
}

GrowthBounds growth_bounds(const CoefficientSpec& spec) {
    return std::visit(
        overloaded{
            [](const ConstantCoef& c) {
                return GrowthBounds{0.0, std::abs(c.c), std::abs(c.c)};
            },
            [](const AffineCoef& a) {
                return GrowthBounds{std::abs(a.slope), std::max(std::abs(a.a), std::abs(a.slope)),
                                    std::abs(a.a)};
            },
            [](const OUCoef& o) { return GrowthBounds{std::abs(o.theta), std::abs(o.theta), 0.0}; },
            [](const TableCoef& t) {
                double lip = 0.0;
                for (std::size_t i = 1; i < t.knots.size(); ++i) {
                    lip = std::max(lip, std::abs((t.values[i] - t.values[i - 1]) / (t.knots[i] - t.knots[i - 1])));
                }
                // |phi| / (1 + |x|) is linear-fractional between knots, zero
                // crossings and the origin, so its maximum sits at a knot or at 0.
                double K = 0.0;
                for (std::size_t i = 0; i < t.knots.size(); ++i) {
                    K = std::max(K, std::abs(t.values[i]) / (1.0 + std::abs(t.knots[i])));
                }
                double at_zero;
                if (t.knots.front() <= 0.0 && 0.0 <= t.knots.back()) {
                    at_zero = std::abs(eval_table(t, 0.0));
                    K = std::max(K, at_zero);
                } else {
                    const double nearest = t.knots.front() > 0.0 ? t.knots.front() : t.knots.back();
                    at_zero = std::abs(eval_table(t, nearest)) + lip * std::abs(nearest);
                }
                return GrowthBounds{lip, K, at_zero};
            },
            [](const SignSwitchCoef&) -> GrowthBounds {
                throw ConfigError("growth bounds need a Markovian coefficient; sign-switch is path-dependent");
            },
        },
        spec.kind());
}

TimeGrid::TimeGrid(int n_steps) : n_(n_steps) {
    if (n_steps <= 0) throw ConfigError("time grid needs a positive number of steps");
}

std::optional<int> TimeGrid::index_of(double t) const noexcept {
    const double scaled = t * n_;
    const double k = std::round(scaled);
    if (k < 0 || k > n_ || std::abs(scaled - k) > 1e-12 * std::max(1.0, static_cast<double>(n_))) {
        return std::nullopt;
    }
    return static_cast<int>(k);
}

double eval_coefficient(const CoefficientSpec& spec, const TimeGrid& grid, int k,
                        std::span<const double> prefix) {
    if (k < 0 || k > grid.n_steps() || prefix.size() < static_cast<std::size_t>(k) + 1) {
        throw ConfigError("path prefix does not cover [0, t]");
    }
    if (const auto* s = std::get_if<SignSwitchCoef>(&spec.kind())) {
        const double t = grid.time(k);
        if (!(t > s->switch_time)) return 0.0;
        // The prefix covers t > switch_time, so the switch value is available.
        const double pos = s->switch_time * grid.n_steps();
        const auto j = static_cast<std::size_t>(std::floor(pos + 1e-9));
        double w = prefix[j];
        if (const auto exact = grid.index_of(s->switch_time); !exact) {
            const double frac = pos - static_cast<double>(j);
            w = prefix[j] + frac * (prefix[j + 1] - prefix[j]);
        }
        const double sign = (w > 0.0) - (w < 0.0);
        return s->level * sign;
    }
    return spec(prefix[static_cast<std::size_t>(k)]);
}

double eval_coefficient(const CoefficientSpec& spec, const TimeGrid& grid, double t,
                        std::span<const double> prefix) {
    const auto k = grid.index_of(t);
    if (!k) throw ConfigError("evaluation time " + std::to_string(t) + " is not a grid point");
    return eval_coefficient(spec, grid, *k, prefix);
}

void DiscretePathMeasure::validate() const {
    if (paths.empty()) throw ConfigError("path measure has no paths");
    if (paths.size() != weights.size()) throw ConfigError("path measure needs one weight per path");
    const std::size_t T = paths.front().size();
    if (T == 0) throw ConfigError("paths need at least one stage");
    double total = 0.0;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        if (paths[i].size() != T) throw ConfigError("all paths must share one grid");
        for (double v : paths[i]) {
            if (!std::isfinite(v)) throw ConfigError("path values must be finite");
        }
        if (!(weights[i] >= 0.0)) throw ConfigError("path weights must be nonnegative");
        total += weights[i];
    }
    if (std::abs(total - 1.0) > kProbabilityTolerance) {
        throw ConfigError("path weights sum to " + std::to_string(total) + ", not 1");
    }
}

std::vector<double> MarkovLattice::support(int k) const {
    if (k < 0 || k > n_stages()) throw ConfigError("lattice stage out of range");
    if (k == 0) return {x0};
    return stages[static_cast<std::size_t>(k - 1)].support;
}

std::vector<double> MarkovLattice::marginal(int k) const {
    if (k < 0 || k > n_stages()) throw ConfigError("lattice stage out of range");
    std::vector<double> p{1.0};
    for (int s = 0; s < k; ++s) {
        const auto& st = stages[static_cast<std::size_t>(s)];
        std::vector<double> next(st.support.size(), 0.0);
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p[i] == 0.0) continue;
            for (std::size_t j = 0; j < next.size(); ++j) next[j] += p[i] * st.transitions[i][j];
        }
        p = std::move(next);
    }
    return p;
}

void MarkovLattice::validate() const {
    std::size_t prev = 1;
    for (std::size_t s = 0; s < stages.size(); ++s) {
        const auto& st = stages[s];
        if (st.support.empty()) throw ConfigError("lattice stage " + std::to_string(s + 1) + " is empty");
        for (std::size_t j = 0; j < st.support.size(); ++j) {
            if (!std::isfinite(st.support[j])) throw ConfigError("lattice support must be finite");
            if (j > 0 && !(st.support[j] > st.support[j - 1])) {
                throw ConfigError("lattice support at stage " + std::to_string(s + 1) +
                                  " is not strictly increasing");
            }
        }
        if (st.transitions.size() != prev) {
            throw ConfigError("lattice stage " + std::to_string(s + 1) + " has the wrong number of rows");
        }
        for (const auto& row : st.transitions) {
            if (row.size() != st.support.size()) throw ConfigError("transition row has the wrong width");
            double total = 0.0;
            for (double w : row) {
                if (!(w >= 0.0)) throw ConfigError("transition probabilities must be nonnegative");
                total += w;
            }
            if (std::abs(total - 1.0) > kProbabilityTolerance) {
                throw ConfigError("transition row at stage " + std::to_string(s + 1) + " sums to " +
                                  std::to_string(total));
            }
        }
        prev = st.support.size();
    }
}

}  // namespace aot
