#pragma once

// Dice and 95th-percentile Hausdorff distance over the ET/TC/WT regions,
// backed by an exact anisotropic Euclidean distance transform.

#include <array>
#include <string>

#include "segfuse/regions.hpp"
#include "segfuse/volume.hpp"

namespace segfuse {

inline constexpr double kEmptyHd95Penalty = 373.1287;

struct MetricOptions {
    // HD95 when exactly one of the two masks is empty.
    double empty_penalty = kEmptyHd95Penalty;
};

struct CaseMetrics {
    std::string case_id;
    std::array<double, 3> dsc{};   // indexed ET, TC, WT
    std::array<double, 3> hd95{};  // mm

    double dsc_of(Region r) const { return dsc[static_cast<std::size_t>(r)]; }
    double hd95_of(Region r) const { return hd95[static_cast<std::size_t>(r)]; }
};

// Per-voxel Euclidean distance in mm to the nearest source voxel.
class DistanceField : public Grid<double> {
public:
    static constexpr std::size_t kChannels = 1;
    DistanceField(Geometry geometry, std::vector<double> data);
};

// 2|A∩B| / (|A| + |B|); 1 when both are empty. Throws GeometryMismatch.
double dice(const RegionMask& a, const RegionMask& b);

// Foreground voxels with at least one 6-neighbour that is background or
// outside the volume.
RegionMask boundary(const RegionMask& m);

// Exact squared-distance lower-envelope transform, one axis at a time, in mm.
// Throws EmptyMask.
DistanceField edt(const RegionMask& m);

// max of the two directed 95th percentiles of boundary-to-boundary distances.
// 0 when both masks are empty, options.empty_penalty when exactly one is.
double hd95(const RegionMask& a, const RegionMask& b, const MetricOptions& options = {});

CaseMetrics evaluate_case(const LabelMap& pred, const LabelMap& gt, std::string case_id,
                          const MetricOptions& options = {});

}  // namespace segfuse
