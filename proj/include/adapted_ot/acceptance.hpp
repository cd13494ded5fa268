#pragma once

// Desk-scale acceptance suite (criteria 1-12) and the random instance
// generators it shares with the unit tests.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "adapted_ot/estimate.hpp"
#include "adapted_ot/model.hpp"

namespace aot {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    bool quick = false;  ///< reduced sample counts
    int threads = 0;
    std::uint64_t seed = 1;
    std::vector<int> only;  ///< empty: all criteria
};

/// Runs the criteria in order; `report` is called after each one.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& report = {});

/// "[PASS] 3 two-path-pins: ..." style line.
std::string format_result(const CriterionResult& result);

/// Tree with `stages` stages; every node has 1..max_branch children whose
/// values step from the parent by multiples of 0.5 in [-1, 1].
DiscretePathMeasure random_tree(std::mt19937_64& rng, int stages, int max_branch);

/// Drift in {constant, affine, OU} and volatility in {constant, positive ramp
/// table} with Lipschitz constants C0 <= c0_max and C1 <= c1_max.
SdeSpec random_lipschitz_sde(std::mt19937_64& rng, double c0_max, double c1_max);

/// Two-path measures: mu^n paths (+-1/n, +-1), nu paths (0, +-1), each with weight 1/2.
DiscretePathMeasure two_path_mu(int n);
DiscretePathMeasure two_path_nu();

}  // namespace aot
