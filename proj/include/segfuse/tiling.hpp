#pragma once

// Sliding-window decomposition for patch-based inference and weighted
// re-assembly of per-window probability patches.

#include <span>
#include <vector>

#include "segfuse/volume.hpp"

namespace segfuse {

enum class Weighting { Uniform, Gaussian };

struct StitchWeighting {
    Weighting kind = Weighting::Gaussian;
    double sigma_frac = 0.125;  // of the patch extent, per axis
};

// Windows are expressed in the padded volume's index space, ordered with x
// varying fastest, then y, then z. Volumes smaller than the patch along an
// axis are zero-padded at the far end up to the patch size.
struct TilingPlan {
    Shape volume_shape{};
    Shape patch_shape{};
    Shape stride{};
    Shape padded_shape{};
    std::vector<BBox> windows;

    Shape padding() const
    {
        return {padded_shape[0] - volume_shape[0], padded_shape[1] - volume_shape[1],
                padded_shape[2] - volume_shape[2]};
    }
};

// Starts along one axis: 0, s, 2s, ... with the last start clamped so the
// final window touches the far face.
std::vector<std::size_t> window_starts(std::size_t dim, std::size_t patch, std::size_t stride);

TilingPlan plan_tiling(const Shape& volume_shape, const Shape& patch_shape, const Shape& stride);

// Default stride: half the patch (at least 1).
Shape default_stride(const Shape& patch_shape);

// Per-voxel weights of one patch, x-fastest. Gaussian weights are
// exp(-d^2 / 2 sigma^2) per axis around the patch centre, floored at 1e-12 so
// they stay strictly positive.
std::vector<double> window_weights(const Shape& patch_shape, const StitchWeighting& weighting);

template <GridKind K>
K extract(const K& v, const TilingPlan& plan, std::size_t window_index)
{
    if (window_index >= plan.windows.size())
        fail(ErrorKind::IndexOutOfRange, "window " + std::to_string(window_index) + " of " +
                                             std::to_string(plan.windows.size()));
    if (v.shape() != plan.volume_shape)
        fail(ErrorKind::PlanMismatch, "volume shape " + to_string(v.shape()) + " vs plan " +
                                          to_string(plan.volume_shape));

    constexpr std::size_t C = K::kChannels;
    const BBox& w = plan.windows[window_index];
    const Geometry& src = v.geometry();
    Geometry out = src;
    out.shape = plan.patch_shape;
    for (int d = 0; d < 3; ++d) out.origin[d] = src.origin[d] + static_cast<double>(w.lo[d]) * src.spacing[d];

    const auto fill = K::background();
    const auto in = v.data();
    std::vector<typename K::value_type> data(out.voxel_count() * C);
    std::size_t i = 0;
    for (std::size_t z = w.lo[2]; z <= w.hi[2]; ++z)
        for (std::size_t y = w.lo[1]; y <= w.hi[1]; ++y)
            for (std::size_t x = w.lo[0]; x <= w.hi[0]; ++x, ++i) {
                const bool inside = x < src.shape[0] && y < src.shape[1] && z < src.shape[2];
                for (std::size_t c = 0; c < C; ++c)
                    data[i * C + c] = inside ? in[src.linear(x, y, z) * C + c] : fill[c];
            }
    return v.rebuilt(std::move(out), std::move(data));
}

// Weighted average of the patches over covering windows, accumulated in
// window order, renormalized per voxel and cropped back to the volume shape.
// Throws PlanMismatch when the patches do not match the plan.
ProbMap stitch(std::span<const ProbMap> patches, const TilingPlan& plan, const StitchWeighting& weighting);

}  // namespace segfuse
