#pragma once

// BraTS evaluation regions. Labels: 1 necrotic core, 2 edema, 4 enhancing.
//   ET = {4}, TC = {1, 4}, WT = {1, 2, 4}   (ET ⊂ TC ⊂ WT)

#include <array>
#include <span>
#include <string_view>

#include "segfuse/volume.hpp"

namespace segfuse {

enum class Region { ET, TC, WT };

inline constexpr std::array<Region, 3> kRegions{Region::ET, Region::TC, Region::WT};

std::string_view to_string(Region r);
Region region_from_string(std::string_view name);

std::span<const std::uint8_t> member_labels(Region r);
bool in_region(std::uint8_t label, Region r);

// Binary mask (0/1 per voxel) tagged with the region it represents.
class RegionMask : public Grid<std::uint8_t> {
public:
    static constexpr std::size_t kChannels = 1;

    RegionMask(Geometry geometry, std::vector<std::uint8_t> data, Region region);
    static RegionMask empty(const Geometry& geometry, Region region);

    Region region() const noexcept { return region_; }
    std::size_t count() const;

    RegionMask rebuilt(Geometry geometry, std::vector<std::uint8_t> data) const
    {
        return RegionMask(std::move(geometry), std::move(data), region_);
    }
    static std::array<std::uint8_t, 1> background() { return {0}; }

private:
    Region region_;
};

RegionMask region_mask(const LabelMap& m, Region r);

// Enforces nesting (TC |= ET, WT |= TC) and then paints 4 on ET, 1 on TC\ET,
// 2 on WT\TC. Throws GeometryMismatch.
LabelMap recompose_labels(const RegionMask& et, const RegionMask& tc, const RegionMask& wt);

}  // namespace segfuse
