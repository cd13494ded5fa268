#pragma once

// Domain types shared by every module: coefficient descriptors, the unit-horizon
// time grid, sample paths, finite path measures and Markov lattices.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace aot {

/// Absolute tolerance for probability vectors summing to one.
inline constexpr double kProbabilityTolerance = 1e-12;

// ---------------------------------------------------------------------------
// Coefficients
// ---------------------------------------------------------------------------

struct ConstantCoef {
    double c = 0.0;

    bool operator==(const ConstantCoef&) const = default;
};

/// a + slope * x
struct AffineCoef {
    double a = 0.0;
    double slope = 0.0;

    bool operator==(const AffineCoef&) const = default;
};

/// Mean-reverting drift -theta * x.
struct OUCoef {
    double theta = 0.0;

    bool operator==(const OUCoef&) const = default;
};

/// Continuous piecewise-linear interpolation on strictly increasing knots.
/// Queries outside [knots.front(), knots.back()] are rejected.
struct TableCoef {
    std::vector<double> knots;
    std::vector<double> values;

    bool operator==(const TableCoef&) const = default;
};

/// Path-dependent drift C * sign(w(switch_time)) * 1{t > switch_time}.
struct SignSwitchCoef {
    double level = 0.0;
    double switch_time = 0.0;

    bool operator==(const SignSwitchCoef&) const = default;
};

enum class CoefficientRole { drift, diffusion };

class TimeGrid;

/// Declarative drift or diffusion coefficient.  The set of kinds is closed so
/// that Lipschitz and growth constants can be computed exactly.
class CoefficientSpec {
public:
    using Kind = std::variant<ConstantCoef, AffineCoef, OUCoef, TableCoef, SignSwitchCoef>;

    CoefficientSpec() = default;
    CoefficientSpec(Kind kind, CoefficientRole role);

    static CoefficientSpec constant(double c, CoefficientRole role = CoefficientRole::drift);
    static CoefficientSpec affine(double a, double slope, CoefficientRole role = CoefficientRole::drift);
    static CoefficientSpec ou(double theta);
    static CoefficientSpec table(std::vector<double> knots, std::vector<double> values,
                                 CoefficientRole role = CoefficientRole::drift);
    static CoefficientSpec sign_switch(double level, double switch_time);

    const Kind& kind() const noexcept { return kind_; }
    CoefficientRole role() const noexcept { return role_; }
    CoefficientSpec with_role(CoefficientRole role) const;

    bool is_markovian() const noexcept;
    bool is_constant() const noexcept;

    /// Markovian evaluation phi(x).  Throws ConfigError for SignSwitch,
    /// RangeError for table queries outside the knot range and DomainError for
    /// a negative diffusion value.
    double operator()(double x) const;

    /// Short human-readable name of the kind ("constant", "affine", ...).
    std::string kind_name() const;

    friend bool operator==(const CoefficientSpec&, const CoefficientSpec&) = default;

private:
    Kind kind_ = ConstantCoef{};
    CoefficientRole role_ = CoefficientRole::drift;
};

struct GrowthBounds {
    std::optional<double> lipschitz;
    double linear_growth_K = 0.0;     ///< |phi(x)| <= K (1 + |x|)
    double value_at_zero_bound = 0.0;  ///< |phi(0)|, or a bound when 0 lies outside a table
};

/// Exact constants for analytic kinds; tables use the maximal segment slope.
/// SignSwitch is rejected with ConfigError.
GrowthBounds growth_bounds(const CoefficientSpec& spec);

// ---------------------------------------------------------------------------
// Time and paths
// ---------------------------------------------------------------------------

/// Uniform grid t_k = k / N on the unit horizon.
class TimeGrid {
public:
    explicit TimeGrid(int n_steps);

    int n_steps() const noexcept { return n_; }
    double h() const noexcept { return 1.0 / n_; }
    double time(int k) const noexcept { return k == n_ ? 1.0 : k * h(); }
    std::size_t n_points() const noexcept { return static_cast<std::size_t>(n_) + 1; }

    /// Grid index of t when t is a grid point (within 1e-12), otherwise nullopt.
    std::optional<int> index_of(double t) const noexcept;

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    int n_;
};

struct SamplePath {
    TimeGrid grid{1};
    std::vector<double> values;  ///< x_0 first, N+1 entries

    double initial() const { return values.front(); }
    double terminal() const { return values.back(); }
};

/// Evaluates a coefficient at grid time t_k along a path prefix covering
/// [0, t_k] (prefix.size() >= k + 1).  Markovian kinds read prefix[k];
/// SignSwitch reads the prefix at its switch time.
double eval_coefficient(const CoefficientSpec& spec, const TimeGrid& grid, int k,
                        std::span<const double> prefix);

/// Convenience overload taking a time that must lie on the grid.
double eval_coefficient(const CoefficientSpec& spec, const TimeGrid& grid, double t,
                        std::span<const double> prefix);

// ---------------------------------------------------------------------------
// Finite measures
// ---------------------------------------------------------------------------

/// Finitely many paths on a common grid.  Paths hold the values at stages
/// 1..T; every path starts from the shared value x0.
struct DiscretePathMeasure {
    double x0 = 0.0;
    std::vector<std::vector<double>> paths;
    std::vector<double> weights;

    std::size_t n_stages() const { return paths.empty() ? 0 : paths.front().size(); }

    /// Throws ConfigError on ragged paths, negative weights or a sum off by > 1e-12.
    void validate() const;
};

struct LatticeStage {
    std::vector<double> support;                  ///< strictly increasing
    std::vector<std::vector<double>> transitions;  ///< rows: previous support, cols: this support
};

/// Finite-support Markov chain started from x0.  stages[k-1] holds the support
/// of X_k and the kernel from X_{k-1}.
struct MarkovLattice {
    double x0 = 0.0;
    std::vector<LatticeStage> stages;

    int n_stages() const { return static_cast<int>(stages.size()); }

    /// Support of X_k for k = 0..N (k = 0 gives {x0}).
    std::vector<double> support(int k) const;

    /// Unconditional law of X_k on support(k).
    std::vector<double> marginal(int k) const;

    /// Throws ConfigError when a row is not a probability vector or a support
    /// is not strictly increasing.
    void validate() const;
};

}  // namespace aot
