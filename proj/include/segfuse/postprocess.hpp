#pragma once

#include <cstdint>
#include <vector>

#include "segfuse/regions.hpp"
#include "segfuse/volume.hpp"

namespace segfuse {

enum class Connectivity { Six = 6, TwentySix = 26 };

struct ComponentLabeling {
    Geometry geometry;
    std::vector<std::uint32_t> ids;    // 0 = background, components 1..K
    std::vector<std::size_t> sizes;    // sizes[k - 1] = voxels in component k
    Connectivity connectivity = Connectivity::Six;

    std::size_t count() const { return sizes.size(); }
};

// Flood-fill labeling. Component ids follow the raster-scan (x-fastest)
// order of each component's first voxel.
ComponentLabeling connected_components(const RegionMask& m, Connectivity connectivity);

inline constexpr std::size_t kDefaultEtThreshold = 200;

// When the total number of label-4 voxels is strictly below threshold, every
// 4 becomes 1; otherwise the map is returned unchanged.
LabelMap et_threshold_relabel(const LabelMap& m, std::size_t threshold = kDefaultEtThreshold);

}  // namespace segfuse
