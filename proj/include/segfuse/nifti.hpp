#pragma once

// Uncompressed single-file NIfTI-1 (.nii) reading and writing.
//
// Supported: little-endian, 3-D, datatypes uint8 / int16 / float32. Volumes
// are written as float32, label maps as uint8, always with a 348-byte header
// followed by an empty 4-byte extension block and data at offset 352.
// Spacing and origin are stored as float32 on disk, so only float-representable
// values survive a round trip unchanged.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "segfuse/volume.hpp"

namespace segfuse::nifti {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::size_t kHeaderSize = 348;
inline constexpr std::size_t kDataOffset = 352;

enum class Dtype : std::int16_t { UInt8 = 2, Int16 = 4, Float32 = 16 };

Volume read_volume(std::span<const std::uint8_t> bytes);
// Like read_volume but every voxel must be an integer in {0,1,2,4}
// (InvalidLabel otherwise).
LabelMap read_label_map(std::span<const std::uint8_t> bytes);

Bytes write(const Volume& v);
Bytes write(const LabelMap& m);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

Volume load_volume(const std::filesystem::path& path);
LabelMap load_label_map(const std::filesystem::path& path);
void save(const std::filesystem::path& path, const Volume& v);
void save(const std::filesystem::path& path, const LabelMap& m);

// ProbMaps are stored as one float32 NIfTI per channel plus a JSON manifest
// {"channels":[0,1,2,4],"files":[...]} whose file names are relative to the
// manifest's directory. save_probmap writes <stem>_c<label>.nii next to the
// manifest.
void save_probmap(const std::filesystem::path& manifest, const ProbMap& p);
ProbMap load_probmap(const std::filesystem::path& manifest);

}  // namespace segfuse::nifti
