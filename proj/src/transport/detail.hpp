#pragma once

#include <vector>

namespace aot::detail {

// North-west corner on index orders sorted by value; mass between consecutive
// CDF breakpoints goes to (F_mu^{-1}(u), F_nu^{-1}(u)).  Zero-weight atoms are
// allowed and receive no mass.
std::vector<std::vector<double>> quantile_joint(const std::vector<double>& xa, const std::vector<double>& xw,
                                                const std::vector<double>& ya, const std::vector<double>& yw);

}  // namespace aot::detail
