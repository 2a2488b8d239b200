#include <cstring>

#include "doctest.h"
#include "helpers.hpp"
#include "segfuse/fusion.hpp"
#include "segfuse/synth.hpp"

using namespace segfuse;

namespace {

std::uint64_t fnv1a(std::span<const float> data)
{
    std::uint64_t h = 1469598103934665603ULL;
    const auto* p = reinterpret_cast<const unsigned char*>(data.data());
    for (std::size_t i = 0; i < data.size_bytes(); ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

// Golden value recorded when the generator was first built. A change here
// means noisy_probmap (or the generator under it) no longer reproduces old
// fixtures.
constexpr std::uint64_t kNoisyProbmapT05Seed9 = 10685051950157369507ULL;

}  // namespace

TEST_CASE("make_phantom is deterministic and nested")
{
    PhantomSpec spec;
    spec.seed = 21;
    const Phantom a = make_phantom(spec);
    const Phantom b = make_phantom(spec);
    CHECK(a.labels == b.labels);
    CHECK(a.intensity == b.intensity);
    const auto et = region_mask(a.labels, Region::ET);
    const auto tc = region_mask(a.labels, Region::TC);
    const auto wt = region_mask(a.labels, Region::WT);
    for (std::size_t i = 0; i < et.voxel_count(); ++i) {
        CHECK(et[i] <= tc[i]);
        CHECK(tc[i] <= wt[i]);
    }
    CHECK(a.labels.count(4) > 200);  // default ET survives the 200-voxel relabel
    CHECK(a.labels.count(1) > 0);
    CHECK(a.labels.count(2) > 0);

    spec.seed = 22;
    CHECK_FALSE(make_phantom(spec).labels == a.labels);
}

TEST_CASE("ET sphere of radius 2 has a lattice-sized voxel count")
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        PhantomSpec spec;
        spec.shape = {24, 24, 24};
        spec.seed = seed;
        spec.wt_radii = {8, 8, 8};
        spec.tc_radii = {5, 5, 5};
        spec.et_radii = {2, 2, 2};
        const std::size_t n = make_phantom(spec).labels.count(4);
        CHECK(n >= 27);
        CHECK(n <= 41);
    }
}

TEST_CASE("PhantomSpec validation")
{
    PhantomSpec s;
    s.tc_radii = s.wt_radii;
    CHECK_THROWS_AS(s.validate(), Error);
    s = {};
    s.et_radii = {0, 0, 0};
    CHECK_THROWS_AS(s.validate(), Error);
    s = {};
    s.shape = {16, 16, 16};
    try {
        make_phantom(s);
        FAIL("expected RadiiDontFit");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::RadiiDontFit);
    }
}

TEST_CASE("intensity follows the labels")
{
    PhantomSpec spec;
    spec.seed = 4;
    const Phantom p = make_phantom(spec);
    double et = 0, ed = 0;
    std::size_t net = 0, ned = 0;
    for (std::size_t i = 0; i < p.labels.voxel_count(); ++i) {
        if (p.labels[i] == 4) et += p.intensity[i], ++net;
        if (p.labels[i] == 2) ed += p.intensity[i], ++ned;
        if (p.labels[i] != 0) CHECK(p.intensity[i] > 0.0f);
    }
    CHECK(et / net > ed / ned);
}

TEST_CASE("corrupt_labels")
{
    PhantomSpec spec;
    spec.seed = 5;
    const LabelMap gt = make_phantom(spec).labels;
    CHECK(corrupt_labels(gt, 0.0, 1) == gt);

    const LabelMap all = corrupt_labels(gt, 1.0, 1);
    for (std::size_t i = 0; i < gt.voxel_count(); ++i) CHECK(all[i] != gt[i]);

    const LabelMap tenth = corrupt_labels(gt, 0.1, 5);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < gt.voxel_count(); ++i) changed += tenth[i] != gt[i];
    const double frac = static_cast<double>(changed) / static_cast<double>(gt.voxel_count());
    CHECK(frac >= 0.08);
    CHECK(frac <= 0.12);
    CHECK(corrupt_labels(gt, 0.1, 5) == tenth);
    CHECK_THROWS_AS(corrupt_labels(gt, 1.5, 1), Error);
}

TEST_CASE("corruption picks every other label")
{
    const LabelMap zeros = LabelMap::filled(Geometry::of_shape({20, 20, 20}));
    const LabelMap c = corrupt_labels(zeros, 1.0, 3);
    const double n = 8000.0;
    for (std::uint8_t l : {1, 2, 4}) {
        const double f = static_cast<double>(c.count(l)) / n;
        CHECK(f > 0.30);
        CHECK(f < 0.37);
    }
}

TEST_CASE("noisy_probmap")
{
    PhantomSpec spec;
    spec.seed = 9;
    const LabelMap gt = make_phantom(spec).labels;

    for (double t : {0.01, 0.1})
        CHECK(argmax_labels(noisy_probmap(gt, t, 3)) == gt);

    for (double t : {0.01, 0.5, 1.0, 5.0}) {
        const ProbMap p = noisy_probmap(gt, t, 11);
        for (std::size_t i = 0; i < p.voxel_count(); ++i) {
            double s = 0;
            for (std::size_t c = 0; c < 4; ++c) s += p.prob(i, c);
            CHECK(std::abs(s - 1.0) <= 1e-6);
        }
    }
    CHECK(noisy_probmap(gt, 0.5, 9) == noisy_probmap(gt, 0.5, 9));
    CHECK_THROWS_AS(noisy_probmap(gt, 0.0, 1), Error);
}

TEST_CASE("noisy_probmap golden hash")
{
    PhantomSpec spec;
    spec.seed = 9;
    const LabelMap gt = make_phantom(spec).labels;
    const std::uint64_t h = fnv1a(noisy_probmap(gt, 0.5, 9).data());
    MESSAGE("noisy_probmap(T=0.5, seed=9) fnv1a = " << h);
    CHECK(h == kNoisyProbmapT05Seed9);
}
