#pragma once

#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "segfuse/random.hpp"
#include "segfuse/regions.hpp"
#include "segfuse/volume.hpp"

namespace testing {

inline segfuse::LabelMap labels_of(segfuse::Shape shape, std::vector<std::uint8_t> data,
                                   segfuse::Vec3 spacing = {1.0, 1.0, 1.0})
{
    return segfuse::LabelMap(segfuse::Geometry::of_shape(shape, spacing), std::move(data));
}

inline segfuse::Volume volume_of(segfuse::Shape shape, std::vector<float> data,
                                 segfuse::Vec3 spacing = {1.0, 1.0, 1.0})
{
    return segfuse::Volume(segfuse::Geometry::of_shape(shape, spacing), std::move(data));
}

inline segfuse::RegionMask mask_of(segfuse::Shape shape, std::vector<std::uint8_t> data,
                                   segfuse::Vec3 spacing = {1.0, 1.0, 1.0},
                                   segfuse::Region region = segfuse::Region::WT)
{
    return segfuse::RegionMask(segfuse::Geometry::of_shape(shape, spacing), std::move(data), region);
}

inline std::vector<std::uint8_t> random_bits(segfuse::Rng& rng, std::size_t n, double density)
{
    std::vector<std::uint8_t> v(n);
    for (auto& b : v) b = rng.uniform() < density ? 1 : 0;
    return v;
}

inline std::vector<std::uint8_t> random_labels(segfuse::Rng& rng, std::size_t n)
{
    std::vector<std::uint8_t> v(n);
    for (auto& b : v) b = segfuse::kLabels[rng.below(4)];
    return v;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("segfuse_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& p) const { return path_ / p; }

private:
    std::filesystem::path path_;
};

}  // namespace testing
