#include "segfuse/volume.hpp"

#include <cmath>

namespace segfuse {

std::string to_string(const Shape& s)
{
    return "(" + std::to_string(s[0]) + "," + std::to_string(s[1]) + "," + std::to_string(s[2]) + ")";
}

Geometry Geometry::of_shape(Shape shape, Vec3 spacing)
{
    Geometry g;
    g.shape = shape;
    g.spacing = spacing;
    g.validate();
    return g;
}

void Geometry::validate() const
{
    for (int d = 0; d < 3; ++d) {
        if (shape[d] == 0) fail(ErrorKind::InvalidArgument, "zero extent in shape " + to_string(shape));
        if (!std::isfinite(spacing[d]) || spacing[d] <= 0.0)
            fail(ErrorKind::InvalidArgument, "voxel spacing must be positive and finite");
        if (!std::isfinite(origin[d])) fail(ErrorKind::InvalidArgument, "origin must be finite");
    }
}

bool Geometry::same_grid(const Geometry& other) const
{
    if (shape != other.shape) return false;
    for (int d = 0; d < 3; ++d) {
        if (std::abs(spacing[d] - other.spacing[d]) > 1e-6) return false;
        if (std::abs(origin[d] - other.origin[d]) > 1e-6) return false;
    }
    return true;
}

void require_same_grid(const Geometry& a, const Geometry& b, const std::string& context)
{
    if (!a.same_grid(b))
        fail(ErrorKind::GeometryMismatch,
             context + ": shapes " + to_string(a.shape) + " and " + to_string(b.shape) +
                 " (or spacing/origin) differ");
}

BBox BBox::full(const Shape& shape)
{
    return {{0, 0, 0}, {shape[0] - 1, shape[1] - 1, shape[2] - 1}};
}

Volume::Volume(Geometry geometry, std::vector<float> data)
    : Grid(std::move(geometry), std::move(data), kChannels)
{
    for (float v : data_)
        if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "volume contains NaN or Inf");
}

Volume Volume::filled(const Geometry& geometry, float value)
{
    return Volume(geometry, std::vector<float>(geometry.voxel_count(), value));
}

LabelMap::LabelMap(Geometry geometry, std::vector<std::uint8_t> data)
    : Grid(std::move(geometry), std::move(data), kChannels)
{
    for (std::uint8_t v : data_)
        if (!is_valid_label(v))
            fail(ErrorKind::InvalidLabel, "label value " + std::to_string(v) + " not in {0,1,2,4}");
}

LabelMap LabelMap::filled(const Geometry& geometry, std::uint8_t label)
{
    return LabelMap(geometry, std::vector<std::uint8_t>(geometry.voxel_count(), label));
}

std::size_t LabelMap::count(std::uint8_t label) const
{
    return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), label));
}

ProbMap::ProbMap(Geometry geometry, std::vector<float> data)
    : Grid(std::move(geometry), std::move(data), kChannels)
{
    const std::size_t n = voxel_count();
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t c = 0; c < 4; ++c) {
            const float p = data_[i * 4 + c];
            if (!(p >= 0.0f && p <= 1.0f))
                fail(ErrorKind::InvalidArgument, "probability outside [0,1] at voxel " + std::to_string(i));
            sum += p;
        }
        if (std::abs(sum - 1.0) > kSumTolerance)
            fail(ErrorKind::InvalidArgument,
                 "channel sum " + std::to_string(sum) + " != 1 at voxel " + std::to_string(i));
    }
}

ProbMap ProbMap::normalized(Geometry geometry, std::vector<double> data)
{
    std::vector<float> out(data.size());
    const std::size_t n = data.size() / 4;
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t c = 0; c < 4; ++c) {
            double& p = data[i * 4 + c];
            if (!(p > 0.0)) p = 0.0;
            sum += p;
        }
        for (std::size_t c = 0; c < 4; ++c) {
            const double v = sum > 0.0 ? data[i * 4 + c] / sum : (c == 0 ? 1.0 : 0.0);
            out[i * 4 + c] = static_cast<float>(v);
        }
    }
    return ProbMap(std::move(geometry), std::move(out));
}

std::size_t channel_of_label(std::uint8_t label)
{
    switch (label) {
    case 0: return 0;
    case 1: return 1;
    case 2: return 2;
    case 4: return 3;
    default: fail(ErrorKind::InvalidLabel, "label " + std::to_string(label) + " has no channel");
    }
}

ProbMap ProbMap::one_hot(const LabelMap& labels)
{
    std::vector<float> data(labels.voxel_count() * 4, 0.0f);
    for (std::size_t i = 0; i < labels.voxel_count(); ++i)
        data[i * 4 + channel_of_label(labels[i])] = 1.0f;
    return ProbMap(labels.geometry(), std::move(data));
}

}  // namespace segfuse
