#pragma once

// Slow, independent reference implementations used only by the tests.
// Nothing here calls into the library's metric or fusion code.

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace oracle {

using Mask = std::vector<std::uint8_t>;
using Dims = std::array<std::size_t, 3>;
using Spacing = std::array<double, 3>;

struct EmResult {
    std::vector<double> posterior;
    std::vector<double> p, q;
    double prior = 0.0;
    int iterations = 0;
};

// Textbook binary STAPLE with direct (non-log) products. Prior is the mean
// vote rate; p and q are clamped to [1e-7, 1 - 1e-7] after each M-step.
EmResult staple(const std::vector<Mask>& raters, double init_quality = 0.99999, double tol = 1e-6,
                int max_iters = 100);

// Distance in mm from every voxel to the nearest nonzero voxel, by scanning
// all sources.
std::vector<double> edt(const Mask& m, const Dims& dims, const Spacing& spacing);

// Foreground voxels with a 6-neighbour that is background or off-grid.
Mask surface(const Mask& m, const Dims& dims);

// All-pairs surface distances, 95th percentile (linear interpolation) of each
// direction, max of the two.
double hd95(const Mask& a, const Mask& b, const Dims& dims, const Spacing& spacing, double penalty);

double dice(const Mask& a, const Mask& b);

// Region membership straight from the label values: ET {4}, TC {1,4}, WT {1,2,4}.
Mask region(const std::vector<std::uint8_t>& labels, int region_index);

double percentile(std::vector<double> v, double q);

}  // namespace oracle
