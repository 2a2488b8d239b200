#include "segfuse/regions.hpp"

#include <algorithm>
#include <string>

namespace segfuse {

namespace {
constexpr std::array<std::uint8_t, 1> kEtLabels{4};
constexpr std::array<std::uint8_t, 2> kTcLabels{1, 4};
constexpr std::array<std::uint8_t, 3> kWtLabels{1, 2, 4};
}  // namespace

std::string_view to_string(Region r)
{
    switch (r) {
    case Region::ET: return "ET";
    case Region::TC: return "TC";
    case Region::WT: return "WT";
    }
    return "?";
}

Region region_from_string(std::string_view name)
{
    for (Region r : kRegions)
        if (to_string(r) == name) return r;
    fail(ErrorKind::InvalidArgument, "unknown region '" + std::string(name) + "'");
}

std::span<const std::uint8_t> member_labels(Region r)
{
    switch (r) {
    case Region::ET: return kEtLabels;
    case Region::TC: return kTcLabels;
    case Region::WT: return kWtLabels;
    }
    return {};
}

bool in_region(std::uint8_t label, Region r)
{
    switch (r) {
    case Region::ET: return label == 4;
    case Region::TC: return label == 1 || label == 4;
    case Region::WT: return label == 1 || label == 2 || label == 4;
    }
    return false;
}

RegionMask::RegionMask(Geometry geometry, std::vector<std::uint8_t> data, Region region)
    : Grid(std::move(geometry), std::move(data), kChannels), region_(region)
{
    for (auto v : data_)
        if (v > 1) fail(ErrorKind::InvalidArgument, "region mask values must be 0 or 1");
}

RegionMask RegionMask::empty(const Geometry& geometry, Region region)
{
    return RegionMask(geometry, std::vector<std::uint8_t>(geometry.voxel_count(), 0), region);
}

std::size_t RegionMask::count() const
{
    return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

RegionMask region_mask(const LabelMap& m, Region r)
{
    std::vector<std::uint8_t> data(m.voxel_count());
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = in_region(m[i], r) ? 1 : 0;
    return RegionMask(m.geometry(), std::move(data), r);
}

LabelMap recompose_labels(const RegionMask& et, const RegionMask& tc, const RegionMask& wt)
{
    require_same_grid(et.geometry(), tc.geometry(), "recompose_labels ET/TC");
    require_same_grid(et.geometry(), wt.geometry(), "recompose_labels ET/WT");

    std::vector<std::uint8_t> labels(et.voxel_count(), 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool e = et[i] != 0;
        const bool t = e || tc[i] != 0;
        const bool w = t || wt[i] != 0;
        labels[i] = e ? 4 : t ? 1 : w ? 2 : 0;
    }
    return LabelMap(et.geometry(), std::move(labels));
}

}  // namespace segfuse
