#pragma once

// Monte Carlo estimators of coupled transport costs between SDE laws and the
// experiment drivers built on them.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "adapted_ot/lattice.hpp"
#include "adapted_ot/model.hpp"
#include "adapted_ot/noise.hpp"

namespace aot {

enum class Scheme { em, monotone_em, zvonkin_em };

std::string scheme_name(Scheme scheme);
/// Accepts "em", "monotone-em", "zvonkin-em".
Scheme parse_scheme(const std::string& name);

/// dX = b(X) dt + sigma(X) dW, X_0 = x0.
struct SdeSpec {
    CoefficientSpec drift = CoefficientSpec::constant(0.0, CoefficientRole::drift);
    CoefficientSpec vol = CoefficientSpec::constant(1.0, CoefficientRole::diffusion);
    double x0 = 0.0;
};

struct McConfig {
    int n_steps = 64;
    double p = 2.0;
    std::int64_t n_samples = 100000;
    Scheme scheme = Scheme::monotone_em;
    double trunc_k = 4.0;
    int substeps = 16;
    std::uint64_t seed = 1;
    int threads = 0;  ///< 0: hardware concurrency
};

struct McEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;  ///< batch means over 20 contiguous batches
    std::int64_t n_samples = 0;
    std::int64_t diverged = 0;
};

inline constexpr int kBatchCount = 20;
/// Largest tolerated fraction of diverging replicates.
inline constexpr double kMaxDivergedFraction = 1e-3;

/// Runs fn(i) for i in [0, n) on up to `threads` workers.  fn must only write
/// to slots owned by i.
void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn);

/// Mean and batch-means standard error of per-replicate values; NaN entries
/// (diverged replicates) are skipped.
McEstimate summarize(const std::vector<double>& values);

/// In-step cost of one step of length h: the linear part between the
/// difference values a and b plus, for p = 2, the expected squared bridge of
/// the noise difference with variance rate v.  Other p use the trapezoid rule.
double step_cost(double a, double b, double v, double h, double p);

/// E int_0^1 |X_t - Y_t|^p dt with (W, W_bar) rho-correlated.
McEstimate coupled_cost_mc(const SdeSpec& x, const SdeSpec& y, const RhoControl& rho, const McConfig& config);

/// Synchronous coupling: rho == 1 on the same code path.
McEstimate sync_distance_mc(const SdeSpec& x, const SdeSpec& y, const McConfig& config);

struct RhoScanRow {
    double rho = 1.0;
    McEstimate cost;
};

/// Common random numbers across rho values (same seed for every entry).
std::vector<RhoScanRow> rho_scan(const SdeSpec& x, const SdeSpec& y, const std::vector<double>& rho_values,
                                 const McConfig& config);

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

/// Registered families at p = 2: constant/constant and OU with a common theta.
std::optional<double> closed_form_cost(const SdeSpec& x, const SdeSpec& y, double p);

/// Constant coefficients under a constant correlation:
/// (c1 - c2)^2 / 3 + (s^2 + s_bar^2 - 2 rho s s_bar) / 2.
std::optional<double> closed_form_cost(const SdeSpec& x, const SdeSpec& y, double rho, double p);

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

struct ConvergenceConfig {
    std::vector<int> n_list{2, 4, 8, 16};
    int atoms = 5;
    int max_support = 40;
    double trunc_k = 4.0;
    double p = 2.0;
    McConfig mc;  ///< n_steps is replaced by each N
};

struct ConvergenceRow {
    int n = 0;
    double h = 0.0;
    double dp_scaled = 0.0;  ///< p-th power, stage weights h
    double kr_cost = 0.0;    ///< p-th power, stage weights h
    double mc_sync = 0.0;
    double mc_stderr = 0.0;
    bool fosd_condition = false;  ///< 1 - h C0 - A_h C1 > 0 for both pairs
    bool fosd_certified = false;  ///< check_fosd on both lattices
};

struct ConvergenceResult {
    std::vector<ConvergenceRow> rows;
    std::vector<std::string> warnings;
};

ConvergenceResult convergence_study(const SdeSpec& x, const SdeSpec& y, const ConvergenceConfig& config);

struct StabilityRow {
    int level = 0;
    double cost = 0.0;
    double gap = 0.0;         ///< |cost_j - cost|
    double gap_stderr = 0.0;  ///< batch-means error of the paired differences
};

struct StabilityResult {
    McEstimate target;
    std::vector<StabilityRow> rows;
};

/// Synchronous costs of (approximant_j, reference) against (target, reference)
/// under common random numbers.
StabilityResult stability_study(const SdeSpec& target, const std::vector<SdeSpec>& approximants,
                                const SdeSpec& reference, const McConfig& config);

/// Piecewise-linear interpolant of |x| with knots (i + 1/2) 2^-j on [-radius, radius].
CoefficientSpec abs_table(int level, double radius, CoefficientRole role);

/// Piecewise-linear interpolant of sqrt(c + |x|) with knot spacing 2^-j.
CoefficientSpec sqrt_abs_table(int level, double c, double radius);

struct CounterexampleResult {
    McEstimate sync;
    McEstimate async;
    double sync_closed_form = 0.0;   ///< 4 C^2 (1 - h_sw)^3 / 3
    double async_closed_form = 0.0;  ///< 2
};

/// Drift C sign(omega_{h_sw}) 1{t > h_sw} against its negative, both with unit
/// noise.  The drift is integrated exactly on each step; h_sw must be a grid point.
CounterexampleResult counterexample_nonmarkov(double C, double h_sw, double p, const McConfig& config);

// ---------------------------------------------------------------------------
// Scheme diagnostics
// ---------------------------------------------------------------------------

/// Fraction of replicates on which Euler-Maruyama and monotone EM, fed by the
/// same substep noise, produce identical paths.
double truncation_agreement(const SdeSpec& x, const McConfig& config);

/// E sup_k |X^h_{kh} - X^{h/2}_{kh}|^2 with X^{h/2} driven by the finer noise.
McEstimate strong_self_difference(const SdeSpec& x, const McConfig& config);

/// Terminal values of monotone EM (zvonkin == false) or of the transformed
/// scheme, same noise streams for both choices.
std::vector<double> terminal_samples(const SdeSpec& x, const McConfig& config, bool zvonkin);

/// sup_x |F_a(x) - F_b(x)| between two empirical distributions.
double ks_distance(std::vector<double> a, std::vector<double> b);

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

struct Preset {
    std::string name;
    SdeSpec x;
    SdeSpec y;
    std::string description;
};

const std::vector<Preset>& presets();
const Preset& find_preset(const std::string& name);

}  // namespace aot
