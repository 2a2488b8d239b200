#include "segfuse/stats.hpp"

#include <algorithm>
#include <cmath>

#include "segfuse/error.hpp"

namespace segfuse {

double quantile_sorted(std::span<const double> sorted, double q)
{
    if (sorted.empty()) fail(ErrorKind::EmptyList, "quantile of an empty set");
    if (!(q >= 0.0 && q <= 1.0)) fail(ErrorKind::InvalidArgument, "quantile level outside [0,1]");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= sorted.size() || frac == 0.0) return sorted[lo];
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile(std::vector<double> values, double q)
{
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, q);
}

}  // namespace segfuse
