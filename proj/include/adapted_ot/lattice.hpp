#pragma once

// Finite Markov lattices for the discrete-time monotone Euler-Maruyama chain,
// together with first-order stochastic dominance (FOSD) checks.

#include <optional>
#include <vector>

#include "adapted_ot/model.hpp"

namespace aot {

/// Finite surrogate for the barrier-stopped increment over one step.
struct IncrementQuantization {
    std::vector<double> atoms;    ///< sorted, within [-A, A]
    std::vector<double> weights;  ///< 1/m each

    std::size_t size() const noexcept { return atoms.size(); }
};

/// Conditional means of clamp(Z sqrt(h), -A, A) on the m equal-probability
/// quantile cells of Z.  Atoms are symmetrised so the mean is exactly zero.
IncrementQuantization quantize_increment(double h, double A, int m);

struct LatticeConfig {
    int n_steps = 8;
    int atoms = 5;          ///< m
    int max_support = 40;   ///< G
    double trunc_k = 4.0;   ///< K in A_h = K sqrt(-h log h)
    double x0 = 0.0;
};

/// Pushes each stage-(k-1) node through x -> x + h b(x) + sigma(x) a over the
/// quantization atoms.  When more than G distinct values appear they are
/// merged into at most G contiguous equal-mass bins represented by their
/// probability-weighted mean.
MarkovLattice build_lattice(const CoefficientSpec& b, const CoefficientSpec& sigma, const LatticeConfig& config);

/// Same construction with an explicit quantization shared by several lattices.
MarkovLattice build_lattice(const CoefficientSpec& b, const CoefficientSpec& sigma, const LatticeConfig& config,
                            const IncrementQuantization& quantization);

struct FosdWitness {
    int stage = 0;             ///< kernel into stage `stage` (1-based)
    std::size_t lower = 0;     ///< index of x in support(stage - 1)
    std::size_t upper = 0;     ///< index of x' > x
    double threshold = 0.0;    ///< a with F_{x'}(a) > F_x(a)
    double cdf_lower = 0.0;    ///< F_x(a)
    double cdf_upper = 0.0;    ///< F_{x'}(a)
};

struct FosdReport {
    bool certified = true;
    std::optional<FosdWitness> witness;
};

/// Checks F_{x'}(a) <= F_x(a) (within 1e-12) for every adjacent support pair
/// x < x' and every a in the next support; returns the first violation.
FosdReport check_fosd(const MarkovLattice& lattice);

/// 1 - h C0 - truncation_level(h, K) C1 > 0
bool fosd_sufficient_condition(double C0, double C1, double h, double K);

/// The margin 1 - h C0 - A_h C1 itself.
double fosd_margin(double C0, double C1, double h, double K);

struct StageMoments {
    double mean = 0.0;
    double variance = 0.0;
};

StageMoments lattice_moments(const MarkovLattice& lattice, int k);

}  // namespace aot
