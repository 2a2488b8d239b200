#include <cstring>
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "segfuse/nifti.hpp"

using namespace segfuse;
namespace fs = std::filesystem;

namespace {

const fs::path kData = SEGFUSE_TEST_DATA;

ErrorKind read_error(const nifti::Bytes& b, bool as_labels = false)
{
    try {
        if (as_labels)
            nifti::read_label_map(b);
        else
            nifti::read_volume(b);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::IoError;
}

template <typename T>
T field(const nifti::Bytes& b, std::size_t at)
{
    T v;
    std::memcpy(&v, b.data() + at, sizeof v);
    return v;
}

}  // namespace

TEST_CASE("byte layout of a 2x2x2 label map")
{
    const LabelMap m = LabelMap::filled(Geometry::of_shape({2, 2, 2}));
    const nifti::Bytes b = nifti::write(m);
    CHECK(b.size() == 348 + 4 + 8);
    CHECK(field<std::int32_t>(b, 0) == 348);
    CHECK(std::memcmp(b.data() + 344, "n+1\0", 4) == 0);
    CHECK(field<float>(b, 108) == 352.0f);
    CHECK(field<std::int16_t>(b, 40) == 3);
    CHECK(field<std::int16_t>(b, 42) == 2);
    CHECK(field<std::int16_t>(b, 44) == 2);
    CHECK(field<std::int16_t>(b, 46) == 2);
    CHECK(field<std::int16_t>(b, 70) == 2);  // DT_UINT8
    CHECK(field<std::int16_t>(b, 72) == 8);
    for (std::size_t i = 348; i < b.size(); ++i) CHECK(b[i] == 0);
}

TEST_CASE("pixdim fields carry the spacing")
{
    const Volume v = Volume::filled(Geometry::of_shape({1, 1, 1}, {1.0, 1.0, 1.0}));
    const nifti::Bytes b = nifti::write(v);
    CHECK(field<std::int16_t>(b, 70) == 16);  // DT_FLOAT32
    CHECK(field<std::int16_t>(b, 72) == 32);
    CHECK(field<float>(b, 80) == 1.0f);
    CHECK(field<float>(b, 84) == 1.0f);
    CHECK(field<float>(b, 88) == 1.0f);

    const nifti::Bytes a = nifti::write(Volume::filled(Geometry::of_shape({1, 1, 1}, {0.5, 2.0, 3.25})));
    CHECK(field<float>(a, 80) == 0.5f);
    CHECK(field<float>(a, 84) == 2.0f);
    CHECK(field<float>(a, 88) == 3.25f);
}

TEST_CASE("minimal float32 file")
{
    const Volume v = nifti::load_volume(kData / "single_f32.nii");
    CHECK(v.shape() == Shape{1, 1, 1});
    CHECK(v[0] == 0.0f);
}

TEST_CASE("fixture files parse with the expected shape and spacing")
{
    const LabelMap m = nifti::load_label_map(kData / "labels_4x3x2_u8.nii");
    CHECK(m.shape() == Shape{4, 3, 2});
    CHECK(m.spacing() == Vec3{1.0, 1.0, 1.0});
    for (std::size_t z = 0; z < 2; ++z)
        for (std::size_t y = 0; y < 3; ++y)
            for (std::size_t x = 0; x < 4; ++x) CHECK(m.at(x, y, z) == kLabels[(x + 2 * y + 3 * z) % 4]);

    const Volume t1 = nifti::load_volume(kData / "t1_5x4x3_i16.nii");
    CHECK(t1.shape() == Shape{5, 4, 3});
    CHECK(t1.spacing() == Vec3{0.9375, 0.9375, 1.5});
    CHECK(t1.origin() == Vec3{-120.0, -120.0, -60.0});
    CHECK(t1.at(4, 3, 2) == doctest::Approx(4 - 6 + 200 - 7));
    CHECK(t1.at(0, 3, 0) == -13.0f);

    const Volume fl = nifti::load_volume(kData / "flair_3x3x3_f32.nii");
    CHECK(fl.shape() == Shape{3, 3, 3});
    CHECK(fl.spacing() == Vec3{1.0, 2.0, 3.0});
    CHECK(fl.origin() == Vec3{1.5, -2.5, 4.0});  // from qoffset, sform_code 0
    CHECK(fl.geometry().sform_code == 0);
    for (std::size_t i = 0; i < 27; ++i) CHECK(fl[i] == 0.25f * static_cast<float>(i) - 1.0f);
}

TEST_CASE("rejected inputs")
{
    CHECK(read_error(nifti::read_file(kData / "bad_label_3.nii"), true) == ErrorKind::InvalidLabel);
    CHECK_NOTHROW(nifti::load_volume(kData / "bad_label_3.nii"));
    CHECK(read_error(nifti::read_file(kData / "big_endian.nii")) == ErrorKind::UnsupportedEncoding);
    CHECK(read_error(nifti::read_file(kData / "gzipped.nii.gz")) == ErrorKind::UnsupportedEncoding);
    CHECK(read_error(nifti::read_file(kData / "two_file_magic.nii")) == ErrorKind::BadMagic);
    CHECK(read_error(nifti::read_file(kData / "float64.nii")) == ErrorKind::UnsupportedDtype);
    CHECK(read_error(nifti::read_file(kData / "truncated.nii")) == ErrorKind::TruncatedFile);
    CHECK(read_error(nifti::Bytes(100, 0)) == ErrorKind::TruncatedFile);

    nifti::Bytes b = nifti::write(LabelMap::filled(Geometry::of_shape({1, 1, 1})));
    b[345] = 'x';
    CHECK(read_error(b) == ErrorKind::BadMagic);

    nifti::Bytes v2 = nifti::write(LabelMap::filled(Geometry::of_shape({1, 1, 1})));
    const std::int32_t nifti2 = 540;
    std::memcpy(v2.data(), &nifti2, 4);
    CHECK(read_error(v2) == ErrorKind::BadMagic);

    nifti::Bytes frac = nifti::write(Volume::filled(Geometry::of_shape({1, 1, 1}), 1.5f));
    CHECK(read_error(frac, true) == ErrorKind::InvalidLabel);
}

TEST_CASE("round trip is bit exact for random volumes")
{
    Rng rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        const Shape s{1 + rng.below(8), 1 + rng.below(8), 1 + rng.below(8)};
        Geometry g = Geometry::of_shape(s, {0.25 * static_cast<double>(1 + rng.below(12)), 1.5, 0.75});
        g.origin = {static_cast<double>(static_cast<float>(rng.uniform(-100, 100))), -3.5, 12.0};
        g.sform_code = static_cast<std::int16_t>(rng.below(3));
        g.qform_code = static_cast<std::int16_t>(rng.below(3));

        std::vector<float> d(g.voxel_count());
        for (auto& x : d) x = static_cast<float>(rng.normal() * 1e3);
        const Volume v(g, d);
        const Volume back = nifti::read_volume(nifti::write(v));
        CHECK(back.shape() == v.shape());
        CHECK(back.spacing() == v.spacing());
        CHECK(back.origin() == v.origin());
        CHECK(back.geometry().sform_code == g.sform_code);
        CHECK(back.geometry().qform_code == g.qform_code);
        CHECK(std::memcmp(back.data().data(), v.data().data(), d.size() * sizeof(float)) == 0);
        CHECK(nifti::write(back) == nifti::write(v));

        const LabelMap m(g, testing::random_labels(rng, g.voxel_count()));
        const LabelMap mb = nifti::read_label_map(nifti::write(m));
        CHECK(mb == m);
        CHECK(nifti::write(mb) == nifti::write(m));
    }
}

TEST_CASE("int16 input reads exactly")
{
    const nifti::Bytes raw = nifti::read_file(kData / "t1_5x4x3_i16.nii");
    const Volume v = nifti::read_volume(raw);
    for (std::size_t i = 0; i < v.voxel_count(); ++i) {
        std::int16_t s;
        std::memcpy(&s, raw.data() + 352 + 2 * i, 2);
        CHECK(v[i] == static_cast<float>(s));
    }
}

TEST_CASE("probmap manifest round trip")
{
    testing::TempDir dir("probmap");
    Rng rng(5);
    const Geometry g = Geometry::of_shape({3, 2, 2}, {1.0, 1.0, 2.0});
    std::vector<double> raw(g.voxel_count() * 4);
    for (auto& x : raw) x = rng.uniform();
    const ProbMap p = ProbMap::normalized(g, raw);
    nifti::save_probmap(dir / "m.json", p);
    CHECK(fs::exists(dir / "m_c4.nii"));
    const ProbMap back = nifti::load_probmap(dir / "m.json");
    CHECK(back == p);

    testing::TempDir bad("probmap_bad");
    std::ofstream(bad / "x.json") << R"({"channels":[0,1,2],"files":["a","b","c"]})";
    CHECK_THROWS_AS(nifti::load_probmap(bad / "x.json"), Error);
}

TEST_CASE("file helpers report missing files")
{
    try {
        nifti::read_file("/nonexistent/file.nii");
        FAIL("expected IoError");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::IoError);
    }
}
