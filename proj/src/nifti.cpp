#include "segfuse/nifti.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace segfuse::nifti {

namespace {

static_assert(std::endian::native == std::endian::little,
              "NIfTI codec assumes a little-endian host");

// Header field offsets (NIfTI-1 nifti1_header layout).
namespace off {
constexpr std::size_t sizeof_hdr = 0;
constexpr std::size_t dim = 40;
constexpr std::size_t datatype = 70;
constexpr std::size_t bitpix = 72;
constexpr std::size_t pixdim = 76;
constexpr std::size_t vox_offset = 108;
constexpr std::size_t scl_slope = 112;
constexpr std::size_t scl_inter = 116;
constexpr std::size_t xyzt_units = 123;
constexpr std::size_t descrip = 148;
constexpr std::size_t qform_code = 252;
constexpr std::size_t sform_code = 254;
constexpr std::size_t qoffset = 268;
constexpr std::size_t srow_x = 280;
constexpr std::size_t magic = 344;
}  // namespace off

template <typename T>
T load(std::span<const std::uint8_t> b, std::size_t at)
{
    T v;
    std::memcpy(&v, b.data() + at, sizeof(T));
    return v;
}

template <typename T>
void store(Bytes& b, std::size_t at, T v)
{
    std::memcpy(b.data() + at, &v, sizeof(T));
}

std::int32_t byteswap32(std::int32_t v)
{
    auto u = static_cast<std::uint32_t>(v);
    u = (u >> 24) | ((u >> 8) & 0xff00u) | ((u << 8) & 0xff0000u) | (u << 24);
    return static_cast<std::int32_t>(u);
}

struct Decoded {
    Geometry geometry;
    std::vector<double> values;
};

Decoded decode(std::span<const std::uint8_t> b)
{
    if (b.size() >= 2 && b[0] == 0x1f && b[1] == 0x8b)
        fail(ErrorKind::UnsupportedEncoding, "gzip-compressed NIfTI is not supported");
    if (b.size() < kHeaderSize)
        fail(ErrorKind::TruncatedFile, "file shorter than the 348-byte header");

    const auto sizeof_hdr = load<std::int32_t>(b, off::sizeof_hdr);
    if (sizeof_hdr != 348) {
        if (byteswap32(sizeof_hdr) == 348)
            fail(ErrorKind::UnsupportedEncoding, "big-endian NIfTI is not supported");
        if (sizeof_hdr == 540 || byteswap32(sizeof_hdr) == 540)
            fail(ErrorKind::BadMagic, "NIfTI-2 is not supported");
        fail(ErrorKind::BadMagic, "sizeof_hdr is " + std::to_string(sizeof_hdr) + ", expected 348");
    }
    if (std::memcmp(b.data() + off::magic, "n+1\0", 4) != 0) {
        if (std::memcmp(b.data() + off::magic, "ni1\0", 4) == 0)
            fail(ErrorKind::BadMagic, "two-file (.hdr/.img) NIfTI is not supported");
        fail(ErrorKind::BadMagic, "magic is not \"n+1\"");
    }

    std::array<std::int16_t, 8> dim{};
    for (std::size_t i = 0; i < 8; ++i) dim[i] = load<std::int16_t>(b, off::dim + 2 * i);
    if (dim[0] < 3 || dim[0] > 7)
        fail(ErrorKind::InvalidArgument, "expected a 3-D image, dim[0] = " + std::to_string(dim[0]));
    for (int i = 4; i <= dim[0]; ++i)
        if (dim[i] != 1) fail(ErrorKind::InvalidArgument, "only 3-D images are supported");
    for (int i = 1; i <= 3; ++i)
        if (dim[i] < 1) fail(ErrorKind::InvalidArgument, "non-positive dimension in header");

    const auto datatype = load<std::int16_t>(b, off::datatype);
    const auto bitpix = load<std::int16_t>(b, off::bitpix);
    std::size_t bytes_per_voxel = 0;
    switch (static_cast<Dtype>(datatype)) {
    case Dtype::UInt8: bytes_per_voxel = 1; break;
    case Dtype::Int16: bytes_per_voxel = 2; break;
    case Dtype::Float32: bytes_per_voxel = 4; break;
    default: fail(ErrorKind::UnsupportedDtype, "datatype code " + std::to_string(datatype));
    }
    if (bitpix != static_cast<std::int16_t>(8 * bytes_per_voxel))
        fail(ErrorKind::UnsupportedDtype, "bitpix " + std::to_string(bitpix) + " inconsistent with datatype");

    Decoded out;
    Geometry& g = out.geometry;
    for (int d = 0; d < 3; ++d) {
        g.shape[d] = static_cast<std::size_t>(dim[d + 1]);
        g.spacing[d] = std::abs(static_cast<double>(load<float>(b, off::pixdim + 4 * (d + 1))));
        if (!(g.spacing[d] > 0.0) || !std::isfinite(g.spacing[d]))
            fail(ErrorKind::InvalidArgument, "pixdim must be positive and finite");
    }
    g.qform_code = load<std::int16_t>(b, off::qform_code);
    g.sform_code = load<std::int16_t>(b, off::sform_code);
    for (int d = 0; d < 3; ++d)
        g.origin[d] = g.sform_code > 0 ? load<float>(b, off::srow_x + 16 * d + 12)
                                       : load<float>(b, off::qoffset + 4 * d);

    const float vox_offset = load<float>(b, off::vox_offset);
    if (!(vox_offset >= 352.0f) || vox_offset != std::floor(vox_offset))
        fail(ErrorKind::BadMagic, "vox_offset must be an integer >= 352");
    const auto data_at = static_cast<std::size_t>(vox_offset);
    const std::size_t n = g.voxel_count();
    if (b.size() < data_at || b.size() - data_at < n * bytes_per_voxel)
        fail(ErrorKind::TruncatedFile, "expected " + std::to_string(n * bytes_per_voxel) +
                                           " data bytes at offset " + std::to_string(data_at));

    const double slope = load<float>(b, off::scl_slope);
    const double inter = load<float>(b, off::scl_inter);
    const bool scaled = slope != 0.0 && !(slope == 1.0 && inter == 0.0);

    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t at = data_at + i * bytes_per_voxel;
        double v = 0.0;
        switch (static_cast<Dtype>(datatype)) {
        case Dtype::UInt8: v = b[at]; break;
        case Dtype::Int16: v = load<std::int16_t>(b, at); break;
        case Dtype::Float32: v = load<float>(b, at); break;
        }
        out.values[i] = scaled ? v * slope + inter : v;
    }
    return out;
}

Bytes encode(const Geometry& g, Dtype dtype, std::size_t bytes_per_voxel)
{
    Bytes b(kDataOffset + g.voxel_count() * bytes_per_voxel, 0);
    store<std::int32_t>(b, off::sizeof_hdr, 348);
    store<std::int16_t>(b, off::dim, 3);
    for (std::size_t i = 1; i < 8; ++i)
        store<std::int16_t>(b, off::dim + 2 * i, i <= 3 ? static_cast<std::int16_t>(g.shape[i - 1]) : 1);
    store<std::int16_t>(b, off::datatype, static_cast<std::int16_t>(dtype));
    store<std::int16_t>(b, off::bitpix, static_cast<std::int16_t>(8 * bytes_per_voxel));
    store<float>(b, off::pixdim, 1.0f);  // qfac
    for (int d = 0; d < 3; ++d) store<float>(b, off::pixdim + 4 * (d + 1), static_cast<float>(g.spacing[d]));
    store<float>(b, off::vox_offset, static_cast<float>(kDataOffset));
    store<float>(b, off::scl_slope, 1.0f);
    store<float>(b, off::scl_inter, 0.0f);
    b[off::xyzt_units] = 2;  // NIFTI_UNITS_MM
    constexpr char descrip[] = "segfuse";
    std::memcpy(b.data() + off::descrip, descrip, sizeof(descrip));
    store<std::int16_t>(b, off::qform_code, g.qform_code);
    store<std::int16_t>(b, off::sform_code, g.sform_code);
    for (int d = 0; d < 3; ++d) {
        store<float>(b, off::qoffset + 4 * d, static_cast<float>(g.origin[d]));
        store<float>(b, off::srow_x + 16 * d + 4 * d, static_cast<float>(g.spacing[d]));
        store<float>(b, off::srow_x + 16 * d + 12, static_cast<float>(g.origin[d]));
    }
    std::memcpy(b.data() + off::magic, "n+1\0", 4);
    return b;
}

std::size_t check_shape_fits(const Geometry& g)
{
    for (auto n : g.shape)
        if (n > 32767) fail(ErrorKind::InvalidArgument, "dimension exceeds NIfTI-1 int16 limit");
    return g.voxel_count();
}

}  // namespace

Volume read_volume(std::span<const std::uint8_t> bytes)
{
    Decoded d = decode(bytes);
    std::vector<float> data(d.values.begin(), d.values.end());
    return Volume(std::move(d.geometry), std::move(data));
}

LabelMap read_label_map(std::span<const std::uint8_t> bytes)
{
    Decoded d = decode(bytes);
    std::vector<std::uint8_t> data(d.values.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double v = d.values[i];
        if (v != std::floor(v) || !is_valid_label(static_cast<long long>(v)))
            fail(ErrorKind::InvalidLabel,
                 "voxel " + std::to_string(i) + " has value " + std::to_string(v) + ", not in {0,1,2,4}");
        data[i] = static_cast<std::uint8_t>(v);
    }
    return LabelMap(std::move(d.geometry), std::move(data));
}

Bytes write(const Volume& v)
{
    const std::size_t n = check_shape_fits(v.geometry());
    Bytes b = encode(v.geometry(), Dtype::Float32, 4);
    std::memcpy(b.data() + kDataOffset, v.data().data(), n * sizeof(float));
    return b;
}

Bytes write(const LabelMap& m)
{
    const std::size_t n = check_shape_fits(m.geometry());
    Bytes b = encode(m.geometry(), Dtype::UInt8, 1);
    std::memcpy(b.data() + kDataOffset, m.data().data(), n);
    return b;
}

Bytes read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::IoError, "cannot open " + path.string());
    Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorKind::IoError, "short write to " + path.string());
}

Volume load_volume(const std::filesystem::path& path)
{
    return read_volume(read_file(path));
}

LabelMap load_label_map(const std::filesystem::path& path)
{
    return read_label_map(read_file(path));
}

void save(const std::filesystem::path& path, const Volume& v)
{
    write_file(path, write(v));
}

void save(const std::filesystem::path& path, const LabelMap& m)
{
    write_file(path, write(m));
}

void save_probmap(const std::filesystem::path& manifest, const ProbMap& p)
{
    const std::string stem = manifest.stem().string();
    const auto dir = manifest.parent_path();
    nlohmann::json files = nlohmann::json::array();
    const std::size_t n = p.voxel_count();
    for (std::size_t c = 0; c < ProbMap::kChannels; ++c) {
        std::vector<float> channel(n);
        for (std::size_t i = 0; i < n; ++i) channel[i] = p.prob(i, c);
        const std::string name = stem + "_c" + std::to_string(kLabels[c]) + ".nii";
        save(dir / name, Volume(p.geometry(), std::move(channel)));
        files.push_back(name);
    }
    nlohmann::json j{{"channels", {0, 1, 2, 4}}, {"files", files}};
    const std::string text = j.dump(2) + "\n";
    write_file(manifest, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

ProbMap load_probmap(const std::filesystem::path& manifest)
{
    const Bytes raw = read_file(manifest);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(raw.begin(), raw.end());
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::ConfigError, manifest.string() + ": " + e.what());
    }
    if (!j.contains("channels") || j["channels"] != nlohmann::json({0, 1, 2, 4}))
        fail(ErrorKind::ConfigError, manifest.string() + ": channels must be [0,1,2,4]");
    if (!j.contains("files") || !j["files"].is_array() || j["files"].size() != 4)
        fail(ErrorKind::ConfigError, manifest.string() + ": expected four channel files");

    std::vector<Volume> channels;
    for (const auto& f : j["files"]) channels.push_back(load_volume(manifest.parent_path() / f.get<std::string>()));
    for (const auto& c : channels) require_same_grid(channels[0].geometry(), c.geometry(), manifest.string());

    const std::size_t n = channels[0].voxel_count();
    std::vector<float> data(n * 4);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < 4; ++c) data[i * 4 + c] = channels[c][i];
    return ProbMap(channels[0].geometry(), std::move(data));
}

}  // namespace segfuse::nifti
