#pragma once

#include <span>
#include <vector>

namespace segfuse {

// Quantile of ascending-sorted values by linear interpolation between closest
// ranks: position q * (n - 1). Throws EmptyList on empty input.
double quantile_sorted(std::span<const double> sorted, double q);

// Copies, sorts and takes the quantile.
double quantile(std::vector<double> values, double q);

}  // namespace segfuse
