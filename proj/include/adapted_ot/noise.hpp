#pragma once

// Seeded Brownian noise: correlated increment pairs, barrier-stopped increments
// and the reflection-principle exit bounds that go with them.

#include <cstdint>
#include <random>
#include <utility>
#include <variant>
#include <vector>

#include "adapted_ot/model.hpp"

namespace aot {

/// Per-replicate random stream.  Streams are derived from (master seed,
/// replicate index) so serial and parallel runs draw identical numbers.
class RandomStream {
public:
    RandomStream(std::uint64_t master_seed, std::uint64_t index);

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// splitmix64 finaliser; used to derive stream seeds.
std::uint64_t mix_seed(std::uint64_t master_seed, std::uint64_t index) noexcept;

// ---------------------------------------------------------------------------
// Correlation controls
// ---------------------------------------------------------------------------

struct ConstantRho {
    double rho = 1.0;
};

/// Piecewise-constant rho(t): values[i] on [breaks[i], breaks[i+1]), with
/// breaks.front() == 0 and the last value extending to t = 1.
struct TableRho {
    std::vector<double> breaks;
    std::vector<double> values;
};

class RhoControl {
public:
    RhoControl() = default;
    static RhoControl constant(double rho);
    static RhoControl table(std::vector<double> breaks, std::vector<double> values);

    double at(double t) const;
    /// Time average of rho over [0, 1].
    double average() const;
    bool is_constant() const noexcept { return std::holds_alternative<ConstantRho>(kind_); }

private:
    std::variant<ConstantRho, TableRho> kind_ = ConstantRho{};
};

// ---------------------------------------------------------------------------
// Truncation
// ---------------------------------------------------------------------------

/// K * sqrt(-h log h); requires 0 < h < 1 and K >= 1.
double truncation_level(double h, double K);

struct ExitBounds {
    double lower;  ///< 2 * upper normal tail at A / sqrt(h)
    double upper;  ///< 4 * upper normal tail at A / sqrt(h), clamped to 1
};

/// Reflection-principle sandwich for the probability that a Brownian motion
/// leaves (-A, A) before time h.
ExitBounds exit_probability_bounds(double h, double A);

/// Standard normal upper tail.
double normal_upper_tail(double z);

struct TruncatedIncrement {
    double value = 0.0;       ///< W_{h ^ tau}, |value| <= A
    bool exited = false;
    double unstopped = 0.0;   ///< W_h from the same substeps
};

/// Stopped Brownian increment over [0, h] simulated with m_sub Gaussian
/// substeps; the first substep that leaves (-A, A) is clamped to the crossed
/// barrier.
TruncatedIncrement sample_truncated_increment(double h, double A, int m_sub, RandomStream& rng);
TruncatedIncrement sample_truncated_increment(double h, double A, int m_sub, std::uint64_t seed);

struct FourthMomentEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::int64_t exits = 0;
    std::int64_t samples = 0;
    bool no_exits = false;  ///< no exit observed; the bound holds trivially
    double bound = 0.0;     ///< 6 h^2 h^(K^2 / 2)
};

/// Monte Carlo estimate of E|dW - dW^h|^4 at barrier truncation_level(h, K).
/// K = +infinity disables the barrier.
FourthMomentEstimate fourth_moment_truncation_error(double h, double K, std::int64_t n_samples, int m_sub,
                                                    std::uint64_t seed);

// ---------------------------------------------------------------------------
// Correlated increments
// ---------------------------------------------------------------------------

struct IncrementBlock {
    TimeGrid grid{1};
    std::vector<double> dW;
    std::vector<double> dW_bar;
    std::uint64_t seed = 0;
    int m_sub = 1;
};

/// Increments of a rho-correlated pair: per substep dW_bar = rho dW + sqrt(1 - rho^2) dW_perp.
/// Deterministic in (grid, rho, seed, m_sub).
IncrementBlock sample_correlated_pair(const TimeGrid& grid, const RhoControl& rho, std::uint64_t seed,
                                      int m_sub = 1);

/// One step of a coupled pair: unstopped and barrier-stopped increments of W
/// and of W_bar built from the same substeps.
struct CoupledStep {
    TruncatedIncrement w;
    TruncatedIncrement w_bar;
};

/// Pass A = +infinity for no barrier.  With m_sub == 1 and no barrier a single
/// Gaussian pair is drawn.
CoupledStep sample_coupled_step(double h, double rho, double A, int m_sub, RandomStream& rng);

}  // namespace aot
