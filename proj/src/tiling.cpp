#include "segfuse/tiling.hpp"

#include <algorithm>
#include <cmath>

namespace segfuse {

std::vector<std::size_t> window_starts(std::size_t dim, std::size_t patch, std::size_t stride)
{
    if (dim <= patch) return {0};  // one window, padded at the far end
    std::vector<std::size_t> starts;
    for (std::size_t s = 0;; s += stride) {
        if (s + patch >= dim) {
            const std::size_t last = dim - patch;
            if (starts.empty() || starts.back() != last) starts.push_back(last);
            break;
        }
        starts.push_back(s);
    }
    return starts;
}

Shape default_stride(const Shape& patch_shape)
{
    Shape s;
    for (int d = 0; d < 3; ++d) s[d] = std::max<std::size_t>(1, patch_shape[d] / 2);
    return s;
}

TilingPlan plan_tiling(const Shape& volume_shape, const Shape& patch_shape, const Shape& stride)
{
    TilingPlan plan;
    plan.volume_shape = volume_shape;
    plan.patch_shape = patch_shape;
    plan.stride = stride;
    std::array<std::vector<std::size_t>, 3> starts;
    for (int d = 0; d < 3; ++d) {
        if (volume_shape[d] == 0 || patch_shape[d] == 0)
            fail(ErrorKind::InvalidArgument, "tiling shapes must be positive");
        if (stride[d] < 1 || stride[d] > patch_shape[d])
            fail(ErrorKind::InvalidArgument, "stride must lie in [1, patch] on every axis");
        plan.padded_shape[d] = std::max(volume_shape[d], patch_shape[d]);
        starts[d] = window_starts(plan.padded_shape[d], patch_shape[d], stride[d]);
    }
    for (std::size_t z : starts[2])
        for (std::size_t y : starts[1])
            for (std::size_t x : starts[0])
                plan.windows.push_back({{x, y, z},
                                        {x + patch_shape[0] - 1, y + patch_shape[1] - 1, z + patch_shape[2] - 1}});
    return plan;
}

std::vector<double> window_weights(const Shape& patch_shape, const StitchWeighting& weighting)
{
    const std::size_t n = patch_shape[0] * patch_shape[1] * patch_shape[2];
    if (weighting.kind == Weighting::Uniform) return std::vector<double>(n, 1.0);
    if (!(weighting.sigma_frac > 0.0) || !std::isfinite(weighting.sigma_frac))
        fail(ErrorKind::InvalidArgument, "gaussian sigma_frac must be positive");

    std::array<std::vector<double>, 3> axis;
    for (int d = 0; d < 3; ++d) {
        const double centre = (static_cast<double>(patch_shape[d]) - 1.0) / 2.0;
        const double sigma = weighting.sigma_frac * static_cast<double>(patch_shape[d]);
        axis[d].resize(patch_shape[d]);
        for (std::size_t i = 0; i < patch_shape[d]; ++i) {
            const double t = (static_cast<double>(i) - centre) / sigma;
            axis[d][i] = std::exp(-0.5 * t * t);
        }
    }
    std::vector<double> w(n);
    std::size_t i = 0;
    for (std::size_t z = 0; z < patch_shape[2]; ++z)
        for (std::size_t y = 0; y < patch_shape[1]; ++y)
            for (std::size_t x = 0; x < patch_shape[0]; ++x, ++i)
                w[i] = std::max(axis[0][x] * axis[1][y] * axis[2][z], 1e-12);
    return w;
}

ProbMap stitch(std::span<const ProbMap> patches, const TilingPlan& plan, const StitchWeighting& weighting)
{
    if (patches.size() != plan.windows.size())
        fail(ErrorKind::PlanMismatch, std::to_string(patches.size()) + " patches for " +
                                          std::to_string(plan.windows.size()) + " windows");
    for (const auto& p : patches)
        if (p.shape() != plan.patch_shape)
            fail(ErrorKind::PlanMismatch, "patch shape " + to_string(p.shape()) + " vs plan " +
                                              to_string(plan.patch_shape));

    Geometry out = patches.front().geometry();
    out.shape = plan.volume_shape;
    for (int d = 0; d < 3; ++d)
        out.origin[d] -= static_cast<double>(plan.windows.front().lo[d]) * out.spacing[d];

    const std::vector<double> weights = window_weights(plan.patch_shape, weighting);
    std::vector<double> acc(out.voxel_count() * 4, 0.0);
    std::vector<double> norm(out.voxel_count(), 0.0);

    for (std::size_t k = 0; k < patches.size(); ++k) {
        const BBox& w = plan.windows[k];
        const ProbMap& patch = patches[k];
        std::size_t i = 0;
        for (std::size_t z = w.lo[2]; z <= w.hi[2]; ++z)
            for (std::size_t y = w.lo[1]; y <= w.hi[1]; ++y)
                for (std::size_t x = w.lo[0]; x <= w.hi[0]; ++x, ++i) {
                    if (x >= out.shape[0] || y >= out.shape[1] || z >= out.shape[2]) continue;
                    const std::size_t v = out.linear(x, y, z);
                    norm[v] += weights[i];
                    for (std::size_t c = 0; c < 4; ++c) acc[v * 4 + c] += weights[i] * patch.prob(i, c);
                }
    }
    for (std::size_t v = 0; v < norm.size(); ++v) {
        if (norm[v] == 0.0) fail(ErrorKind::PlanMismatch, "plan leaves a voxel uncovered");
        for (std::size_t c = 0; c < 4; ++c) acc[v * 4 + c] /= norm[v];
    }
    return ProbMap::normalized(std::move(out), std::move(acc));
}

}  // namespace segfuse
