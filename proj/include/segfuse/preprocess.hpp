#pragma once

// Intensity normalization and seeded spatial/intensity augmentation.

#include <array>
#include <cstdint>
#include <utility>

#include "segfuse/volume.hpp"

namespace segfuse {

using AxisFlags = std::array<bool, 3>;

struct AugmentSpec {
    std::uint64_t seed = 0;
    double rotation_max_deg = 30.0;
    AxisFlags flip_axes{true, true, true};
    std::pair<double, double> gamma_range{0.7, 1.5};

    void validate() const;
};

// One concrete draw from an AugmentSpec.
struct AugmentDraw {
    Vec3 angles_deg{0.0, 0.0, 0.0};
    AxisFlags flips{false, false, false};
    double gamma = 1.0;

    bool is_identity() const;
    friend bool operator==(const AugmentDraw&, const AugmentDraw&) = default;
};

// Zero-mean, unit (population) variance over the nonzero voxels; zeros stay
// zero. A constant nonzero region maps to all zeros. Throws EmptyVolume.
Volume znorm(const Volume& v);

// out = m + (M - m) * ((v - m) / (M - m))^gamma with m/M the volume min/max.
// Throws ConstantVolume when M == m.
Volume gamma_transform(const Volume& v, double gamma);

// Rotation about the volume centre in physical (mm) space, applied about x,
// then y, then z. Trilinear interpolation, zero outside the input.
Volume rotate3d(const Volume& v, const Vec3& angles_deg);

// Same mapping as rotate3d but nearest-neighbour, so only input labels (or 0
// outside the input) appear in the result.
LabelMap rotate_labels(const LabelMap& m, const Vec3& angles_deg);

template <GridKind K>
K flip3d(const K& v, const AxisFlags& axes)
{
    constexpr std::size_t C = K::kChannels;
    const Geometry& g = v.geometry();
    const auto in = v.data();
    std::vector<typename K::value_type> out(in.size());
    for (std::size_t z = 0; z < g.shape[2]; ++z) {
        const std::size_t sz = axes[2] ? g.shape[2] - 1 - z : z;
        for (std::size_t y = 0; y < g.shape[1]; ++y) {
            const std::size_t sy = axes[1] ? g.shape[1] - 1 - y : y;
            for (std::size_t x = 0; x < g.shape[0]; ++x) {
                const std::size_t sx = axes[0] ? g.shape[0] - 1 - x : x;
                const std::size_t dst = g.linear(x, y, z) * C;
                const std::size_t src = g.linear(sx, sy, sz) * C;
                for (std::size_t c = 0; c < C; ++c) out[dst + c] = in[src + c];
            }
        }
    }
    return v.rebuilt(g, std::move(out));
}

// Deterministic in (spec.seed, draw_index): per-axis angles uniform in
// [0, rotation_max_deg], a fair coin per enabled flip axis, gamma uniform in
// gamma_range.
AugmentDraw sample_augmentation(const AugmentSpec& spec, std::uint64_t draw_index);

// rotate -> flip -> gamma. Gamma is skipped for gamma == 1 and for constant volumes.
Volume apply_augmentation(const Volume& v, const AugmentDraw& draw);
// rotate (nearest) -> flip.
LabelMap apply_augmentation(const LabelMap& m, const AugmentDraw& draw);

}  // namespace segfuse
