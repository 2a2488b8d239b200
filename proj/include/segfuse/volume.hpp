#pragma once

// Core volumetric types shared by every module.
//
// Voxel data is stored x-fastest: linear index = x + nx * (y + ny * z), which
// is the NIfTI on-disk order. Multi-channel grids (ProbMap) interleave the
// channels per voxel: data[voxel * channels + c].

#include <algorithm>
#include <array>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "segfuse/error.hpp"

namespace segfuse {

using Shape = std::array<std::size_t, 3>;
using Index3 = std::array<std::size_t, 3>;
using Vec3 = std::array<double, 3>;

std::string to_string(const Shape& s);

struct Geometry {
    Shape shape{1, 1, 1};
    Vec3 spacing{1.0, 1.0, 1.0};  // mm per voxel
    Vec3 origin{0.0, 0.0, 0.0};   // mm, world position of voxel (0,0,0)
    // Carried verbatim through NIfTI I/O, never interpreted.
    std::int16_t qform_code = 1;
    std::int16_t sform_code = 1;

    static Geometry of_shape(Shape shape, Vec3 spacing = {1.0, 1.0, 1.0});

    std::size_t voxel_count() const { return shape[0] * shape[1] * shape[2]; }

    std::size_t linear(std::size_t x, std::size_t y, std::size_t z) const
    {
        return x + shape[0] * (y + shape[1] * z);
    }
    std::size_t linear(const Index3& p) const { return linear(p[0], p[1], p[2]); }

    Index3 coords(std::size_t i) const
    {
        return {i % shape[0], (i / shape[0]) % shape[1], i / (shape[0] * shape[1])};
    }

    // Throws InvalidArgument on zero extents or non-positive/non-finite spacing.
    void validate() const;

    // Same shape, spacing and origin (to 1e-6 mm); xform codes are ignored.
    bool same_grid(const Geometry& other) const;
};

void require_same_grid(const Geometry& a, const Geometry& b, const std::string& context);

// Inclusive voxel-index box.
struct BBox {
    Index3 lo{0, 0, 0};
    Index3 hi{0, 0, 0};

    static BBox full(const Shape& shape);

    Shape extent() const { return {hi[0] - lo[0] + 1, hi[1] - lo[1] + 1, hi[2] - lo[2] + 1}; }
    bool valid() const { return lo[0] <= hi[0] && lo[1] <= hi[1] && lo[2] <= hi[2]; }
    bool fits(const Shape& shape) const
    {
        return valid() && hi[0] < shape[0] && hi[1] < shape[1] && hi[2] < shape[2];
    }
    bool contains(const Index3& p) const
    {
        for (int d = 0; d < 3; ++d)
            if (p[d] < lo[d] || p[d] > hi[d]) return false;
        return true;
    }
    friend bool operator==(const BBox&, const BBox&) = default;
};

template <typename T>
class Grid {
public:
    using value_type = T;

    const Geometry& geometry() const noexcept { return geometry_; }
    const Shape& shape() const noexcept { return geometry_.shape; }
    const Vec3& spacing() const noexcept { return geometry_.spacing; }
    const Vec3& origin() const noexcept { return geometry_.origin; }
    std::size_t voxel_count() const noexcept { return geometry_.voxel_count(); }
    std::size_t channels() const noexcept { return channels_; }

    std::span<const T> data() const noexcept { return data_; }
    const T& operator[](std::size_t i) const { return data_[i]; }
    const T& at(std::size_t x, std::size_t y, std::size_t z) const
    {
        return data_[geometry_.linear(x, y, z) * channels_];
    }

    friend bool operator==(const Grid& a, const Grid& b)
    {
        return a.geometry_.same_grid(b.geometry_) && a.data_ == b.data_;
    }

protected:
    Grid(Geometry geometry, std::vector<T> data, std::size_t channels)
        : geometry_(std::move(geometry)), data_(std::move(data)), channels_(channels)
    {
        geometry_.validate();
        if (data_.size() != geometry_.voxel_count() * channels_)
            fail(ErrorKind::ShapeMismatch,
                 "data length " + std::to_string(data_.size()) + " does not match shape " +
                     to_string(geometry_.shape) + " x " + std::to_string(channels_) + " channels");
    }

    Geometry geometry_;
    std::vector<T> data_;
    std::size_t channels_;
};

// Scalar intensity or probability volume. All values finite.
class Volume : public Grid<float> {
public:
    static constexpr std::size_t kChannels = 1;

    Volume(Geometry geometry, std::vector<float> data);
    static Volume filled(const Geometry& geometry, float value = 0.0f);

    Volume rebuilt(Geometry geometry, std::vector<float> data) const
    {
        return Volume(std::move(geometry), std::move(data));
    }
    static std::array<float, 1> background() { return {0.0f}; }
};

inline constexpr std::array<std::uint8_t, 4> kLabels{0, 1, 2, 4};

constexpr bool is_valid_label(long long value)
{
    return value == 0 || value == 1 || value == 2 || value == 4;
}

// BraTS label grid: every voxel in {0, 1, 2, 4}.
class LabelMap : public Grid<std::uint8_t> {
public:
    static constexpr std::size_t kChannels = 1;

    LabelMap(Geometry geometry, std::vector<std::uint8_t> data);
    static LabelMap filled(const Geometry& geometry, std::uint8_t label = 0);

    LabelMap rebuilt(Geometry geometry, std::vector<std::uint8_t> data) const
    {
        return LabelMap(std::move(geometry), std::move(data));
    }
    static std::array<std::uint8_t, 1> background() { return {0}; }

    std::size_t count(std::uint8_t label) const;
};

// Per-class probabilities, channel order {0, 1, 2, 4}. Each voxel's channels
// lie in [0, 1] and sum to 1 within kSumTolerance.
class ProbMap : public Grid<float> {
public:
    static constexpr std::size_t kChannels = 4;
    static constexpr double kSumTolerance = 1e-6;

    ProbMap(Geometry geometry, std::vector<float> data);
    // Clamps negatives to zero and divides each voxel by its channel sum.
    // Voxels whose sum is zero become pure background.
    static ProbMap normalized(Geometry geometry, std::vector<double> data);
    static ProbMap one_hot(const LabelMap& labels);

    ProbMap rebuilt(Geometry geometry, std::vector<float> data) const
    {
        return ProbMap(std::move(geometry), std::move(data));
    }
    static std::array<float, 4> background() { return {1.0f, 0.0f, 0.0f, 0.0f}; }

    float prob(std::size_t voxel, std::size_t channel) const { return data_[voxel * 4 + channel]; }
    std::span<const float> voxel(std::size_t i) const { return data().subspan(i * 4, 4); }
};

std::size_t channel_of_label(std::uint8_t label);

// A kind that crop/embed/flip/extract can rebuild after moving voxels around.
template <typename K>
concept GridKind = requires(const K& k, Geometry g, std::vector<typename K::value_type> d) {
    { K::kChannels } -> std::convertible_to<std::size_t>;
    { k.rebuilt(g, std::move(d)) } -> std::same_as<K>;
    { K::background() };
    { k.geometry() } -> std::convertible_to<const Geometry&>;
};

// Tightest box around the nonzero voxels. Throws EmptyVolume.
template <typename K>
BBox nonzero_bbox(const K& v)
{
    static_assert(K::kChannels == 1, "nonzero_bbox needs a single-channel grid");
    const auto& shape = v.shape();
    BBox box{{shape[0], shape[1], shape[2]}, {0, 0, 0}};
    bool any = false;
    std::size_t i = 0;
    for (std::size_t z = 0; z < shape[2]; ++z)
        for (std::size_t y = 0; y < shape[1]; ++y)
            for (std::size_t x = 0; x < shape[0]; ++x, ++i) {
                if (v[i] == 0) continue;
                any = true;
                const Index3 p{x, y, z};
                for (int d = 0; d < 3; ++d) {
                    box.lo[d] = std::min(box.lo[d], p[d]);
                    box.hi[d] = std::max(box.hi[d], p[d]);
                }
            }
    if (!any) fail(ErrorKind::EmptyVolume, "volume has no nonzero voxels");
    return box;
}

template <GridKind K>
K crop(const K& v, const BBox& box)
{
    const Geometry& src = v.geometry();
    if (!box.fits(src.shape))
        fail(ErrorKind::OutOfBounds, "crop box does not fit shape " + to_string(src.shape));

    constexpr std::size_t C = K::kChannels;
    Geometry out = src;
    out.shape = box.extent();
    for (int d = 0; d < 3; ++d)
        out.origin[d] = src.origin[d] + static_cast<double>(box.lo[d]) * src.spacing[d];

    std::vector<typename K::value_type> data;
    data.reserve(out.voxel_count() * C);
    const auto in = v.data();
    for (std::size_t z = box.lo[2]; z <= box.hi[2]; ++z)
        for (std::size_t y = box.lo[1]; y <= box.hi[1]; ++y) {
            const std::size_t row = src.linear(box.lo[0], y, z) * C;
            data.insert(data.end(), in.begin() + row, in.begin() + row + out.shape[0] * C);
        }
    return v.rebuilt(std::move(out), std::move(data));
}

// Inverse of crop: places v at box inside a background-filled grid of full_shape.
template <GridKind K>
K embed(const K& v, const BBox& box, const Shape& full_shape)
{
    if (!box.fits(full_shape) || box.extent() != v.shape())
        fail(ErrorKind::ShapeMismatch, "box extent " + to_string(box.extent()) + " vs volume " +
                                           to_string(v.shape()) + " in " + to_string(full_shape));

    constexpr std::size_t C = K::kChannels;
    const Geometry& src = v.geometry();
    Geometry out = src;
    out.shape = full_shape;
    for (int d = 0; d < 3; ++d)
        out.origin[d] = src.origin[d] - static_cast<double>(box.lo[d]) * src.spacing[d];

    const auto fill = K::background();
    std::vector<typename K::value_type> data(out.voxel_count() * C);
    for (std::size_t i = 0; i < out.voxel_count(); ++i)
        for (std::size_t c = 0; c < C; ++c) data[i * C + c] = fill[c];

    const auto in = v.data();
    std::size_t row_len = src.shape[0] * C;
    std::size_t src_row = 0;
    for (std::size_t z = box.lo[2]; z <= box.hi[2]; ++z)
        for (std::size_t y = box.lo[1]; y <= box.hi[1]; ++y, src_row += row_len) {
            const std::size_t dst = out.linear(box.lo[0], y, z) * C;
            std::copy(in.begin() + src_row, in.begin() + src_row + row_len, data.begin() + dst);
        }
    return v.rebuilt(std::move(out), std::move(data));
}

}  // namespace segfuse
