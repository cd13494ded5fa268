#pragma once

// Path-level schemes for dX = b(X) dt + sigma(X) dW on [0, 1].

#include <span>
#include <vector>

#include "adapted_ot/model.hpp"

namespace aot {

/// |x| above this is reported as divergence.
inline constexpr double kDivergenceThreshold = 1e8;

/// x + h b + sigma delta with b and sigma read along the path prefix at step k.
double scheme_step(const CoefficientSpec& b, const CoefficientSpec& sigma, const TimeGrid& grid, int k,
                   std::span<const double> prefix, double delta);

/// Classical Euler-Maruyama on the grid; increments[k] is W_{t_{k+1}} - W_{t_k}.
SamplePath euler_maruyama(const CoefficientSpec& b, const CoefficientSpec& sigma, const TimeGrid& grid, double x0,
                          std::span<const double> increments);

/// Euler-Maruyama driven by barrier-stopped increments.  Every increment must
/// satisfy |delta| <= truncation_level(h, K).
SamplePath monotone_em(const CoefficientSpec& b, const CoefficientSpec& sigma, const TimeGrid& grid, double K,
                       double x0, std::span<const double> truncated_increments);

/// Drift-removing change of variable T(x) = int_{x0}^x exp(-2 int_{x0}^z b / sigma^2) dz,
/// tabulated on [x0 - R, x0 + R] with Simpson quadrature.  T and its inverse
/// interpolate linearly between nodes, so both are strictly increasing and
/// exact inverses of each other on the table.
class ZvonkinTransform {
public:
    ZvonkinTransform(const CoefficientSpec& b, const CoefficientSpec& sigma, double x0, double radius = 10.0,
                     int intervals = 10000);

    double T(double x) const;
    double T_inverse(double y) const;
    double T_prime(double x) const;

    /// (sigma T') o T^{-1} on the tabulated y-range.
    const CoefficientSpec& transformed_sigma() const noexcept { return transformed_sigma_; }

    /// K^sigma + 2 sup|b| / inf sigma over the table interval.
    double lipschitz_certificate() const noexcept { return certificate_; }

    double x_min() const noexcept { return nodes_.front(); }
    double x_max() const noexcept { return nodes_.back(); }
    double y_min() const noexcept { return t_values_.front(); }
    double y_max() const noexcept { return t_values_.back(); }

    const CoefficientSpec& sigma() const noexcept { return sigma_; }

private:
    std::size_t locate(double x) const;

    CoefficientSpec sigma_;
    std::vector<double> nodes_;
    std::vector<double> inner_;     // int_{x0}^{x} 2 b / sigma^2
    std::vector<double> t_values_;  // T at nodes
    CoefficientSpec transformed_sigma_;
    double certificate_ = 0.0;
};

/// Monotone EM in Y = T(X) coordinates mapped back through T^{-1}:
/// X_{k+1} = T^{-1}[T(X_k) + T'(X_k) sigma(X_k) delta_k].  Throws RangeError
/// when Y leaves the tabulated range.
SamplePath transformed_monotone_em(const ZvonkinTransform& transform, const TimeGrid& grid, double K, double x0,
                                   std::span<const double> truncated_increments);

/// One step of the transformed scheme.
double transformed_step(const ZvonkinTransform& transform, double x, double delta);

}  // namespace aot
