#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles/oracles.hpp"
#include "segfuse/metrics.hpp"
#include "segfuse/stats.hpp"
#include "segfuse/synth.hpp"

using namespace segfuse;
using testing::labels_of;
using testing::mask_of;

namespace {

RegionMask points(Shape s, std::initializer_list<Index3> pts, Vec3 spacing = {1, 1, 1})
{
    const Geometry g = Geometry::of_shape(s, spacing);
    std::vector<std::uint8_t> d(g.voxel_count(), 0);
    for (const auto& p : pts) d[g.linear(p)] = 1;
    return RegionMask(g, d, Region::WT);
}

oracle::Mask bits(const RegionMask& m)
{
    return {m.data().begin(), m.data().end()};
}

// One step of 6-neighbour dilation, repeated k times.
RegionMask dilate(const RegionMask& m, int k)
{
    const Geometry& g = m.geometry();
    std::vector<std::uint8_t> cur(m.data().begin(), m.data().end());
    for (int step = 0; step < k; ++step) {
        std::vector<std::uint8_t> next = cur;
        for (std::size_t i = 0; i < cur.size(); ++i) {
            if (!cur[i]) continue;
            const auto p = g.coords(i);
            for (int a = 0; a < 3; ++a) {
                if (p[a] > 0) {
                    auto q = p;
                    --q[a];
                    next[g.linear(q)] = 1;
                }
                if (p[a] + 1 < g.shape[a]) {
                    auto q = p;
                    ++q[a];
                    next[g.linear(q)] = 1;
                }
            }
        }
        cur = std::move(next);
    }
    return RegionMask(g, cur, m.region());
}

}  // namespace

TEST_CASE("dice")
{
    const auto a = mask_of({10, 1, 1}, {1, 1, 1, 1, 0, 0, 0, 0, 0, 0});
    const auto b = mask_of({10, 1, 1}, {0, 1, 1, 1, 1, 1, 1, 0, 0, 0});
    CHECK(dice(a, b) == doctest::Approx(0.6));
    CHECK(dice(a, a) == 1.0);
    const auto empty = mask_of({10, 1, 1}, std::vector<std::uint8_t>(10, 0));
    const auto five = mask_of({10, 1, 1}, {1, 1, 1, 1, 1, 0, 0, 0, 0, 0});
    CHECK(dice(empty, five) == 0.0);
    CHECK(dice(five, empty) == 0.0);
    CHECK(dice(empty, empty) == 1.0);
    CHECK_THROWS_AS(dice(a, mask_of({1, 10, 1}, std::vector<std::uint8_t>(10, 0))), Error);
}

TEST_CASE("dice symmetry and range on random masks")
{
    Rng rng(10);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.below(200);
        const auto a = mask_of({n, 1, 1}, testing::random_bits(rng, n, rng.uniform()));
        const auto b = mask_of({n, 1, 1}, testing::random_bits(rng, n, rng.uniform()));
        const double d = dice(a, b);
        CHECK(d == dice(b, a));
        CHECK(d >= 0.0);
        CHECK(d <= 1.0);
        CHECK(d == oracle::dice(bits(a), bits(b)));
    }
}

TEST_CASE("boundary")
{
    const auto one = points({3, 3, 3}, {{1, 1, 1}});
    CHECK(boundary(one) == one);
    const auto block = mask_of({3, 3, 3}, std::vector<std::uint8_t>(27, 1));
    const auto shell = boundary(block);
    CHECK(shell.count() == 26);
    CHECK(shell.at(1, 1, 1) == 0);
    const auto empty = mask_of({3, 3, 3}, std::vector<std::uint8_t>(27, 0));
    CHECK(boundary(empty).count() == 0);

    Rng rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const Shape s{1 + rng.below(7), 1 + rng.below(7), 1 + rng.below(7)};
        const auto m = mask_of(s, testing::random_bits(rng, s[0] * s[1] * s[2], 0.6));
        CHECK(bits(boundary(m)) == oracle::surface(bits(m), s));
    }
}

TEST_CASE("edt")
{
    const auto src = points({5, 5, 1}, {{0, 0, 0}});
    const DistanceField d = edt(src);
    CHECK(d[0] == 0.0);
    CHECK(d.at(3, 4, 0) == doctest::Approx(5.0).epsilon(1e-12));

    const auto aniso = points({3, 1, 1}, {{0, 0, 0}}, {2, 1, 1});
    CHECK(edt(aniso).at(1, 0, 0) == 2.0);

    CHECK_THROWS_AS(edt(mask_of({2, 1, 1}, {0, 0})), Error);
}

TEST_CASE("edt matches the brute-force scan within 12^3")
{
    Rng rng(12);
    for (int trial = 0; trial < 40; ++trial) {
        const Shape s{1 + rng.below(12), 1 + rng.below(12), 1 + rng.below(12)};
        const Vec3 sp{rng.uniform(0.3, 3.0), rng.uniform(0.3, 3.0), rng.uniform(0.3, 3.0)};
        auto b = testing::random_bits(rng, s[0] * s[1] * s[2], rng.uniform(0.001, 0.2));
        b[rng.below(b.size())] = 1;
        const auto m = mask_of(s, b, sp);
        const DistanceField got = edt(m);
        const auto ref = oracle::edt(b, s, {sp[0], sp[1], sp[2]});
        double worst = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i) {
            worst = std::max(worst, std::abs(got[i] - ref[i]));
            if (b[i]) CHECK(got[i] == 0.0);
            CHECK(got[i] >= 0.0);
        }
        CHECK(worst <= 1e-9);
    }
}

TEST_CASE("hd95")
{
    const auto a = points({5, 5, 1}, {{0, 0, 0}});
    const auto b = points({5, 5, 1}, {{3, 4, 0}});
    CHECK(hd95(a, b) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(hd95(a, a) == 0.0);
    const auto empty = mask_of({5, 5, 1}, std::vector<std::uint8_t>(25, 0));
    CHECK(hd95(a, empty) == 373.1287);
    CHECK(hd95(empty, a) == 373.1287);
    CHECK(hd95(empty, empty) == 0.0);
    MetricOptions opt;
    opt.empty_penalty = 50.0;
    CHECK(hd95(a, empty, opt) == 50.0);
    CHECK_THROWS_AS(hd95(a, mask_of({25, 1, 1}, std::vector<std::uint8_t>(25, 0))), Error);
}

TEST_CASE("single-element percentile is that element")
{
    CHECK(quantile({3.25}, 0.95) == 3.25);
    CHECK(quantile({1, 2, 3, 4}, 0.5) == 2.5);
    CHECK(quantile({1, 2, 3, 4}, 0.25) == 1.75);
    CHECK(quantile({4, 1, 3, 2}, 0.75) == 3.25);
    CHECK_THROWS_AS(quantile({}, 0.5), Error);
}

TEST_CASE("hd95 symmetry, oracle agreement and dilation bound")
{
    Rng rng(95);
    for (int trial = 0; trial < 30; ++trial) {
        const Shape s{2 + rng.below(9), 2 + rng.below(9), 2 + rng.below(9)};
        const Vec3 sp{rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)};
        auto ab = testing::random_bits(rng, s[0] * s[1] * s[2], 0.2);
        auto bb = testing::random_bits(rng, s[0] * s[1] * s[2], 0.2);
        ab[0] = 1;
        bb.back() = 1;
        const auto a = mask_of(s, ab, sp), b = mask_of(s, bb, sp);
        const double h = hd95(a, b);
        CHECK(h == hd95(b, a));
        CHECK(h >= 0.0);
        CHECK(std::abs(h - oracle::hd95(ab, bb, s, {sp[0], sp[1], sp[2]}, kEmptyHd95Penalty)) <= 1e-9);

        const int k = 1 + static_cast<int>(rng.below(3));
        const double max_sp = std::max({sp[0], sp[1], sp[2]});
        CHECK(hd95(a, dilate(a, k)) <= k * max_sp + 1e-12);
    }
}

TEST_CASE("evaluate_case")
{
    Rng rng(1);
    const LabelMap gt = labels_of({6, 6, 6}, testing::random_labels(rng, 216));
    const CaseMetrics same = evaluate_case(gt, gt, "c");
    CHECK(same.case_id == "c");
    for (int r = 0; r < 3; ++r) {
        CHECK(same.dsc[r] == 1.0);
        CHECK(same.hd95[r] == 0.0);
    }

    std::vector<std::uint8_t> d(27, 2);
    const LabelMap no_et = labels_of({3, 3, 3}, d);
    const CaseMetrics m = evaluate_case(no_et, no_et, "x");
    CHECK(m.dsc_of(Region::ET) == 1.0);
    CHECK(m.hd95_of(Region::ET) == 0.0);

    d[13] = 4;
    const CaseMetrics fp = evaluate_case(labels_of({3, 3, 3}, d), no_et, "y");
    CHECK(fp.dsc_of(Region::ET) == 0.0);
    CHECK(fp.hd95_of(Region::ET) == kEmptyHd95Penalty);
    CHECK(fp.dsc_of(Region::WT) == 1.0);
}

TEST_CASE("phantom vs corrupted phantom matches the brute-force evaluator")
{
    PhantomSpec spec;
    spec.seed = 3;
    const LabelMap gt = make_phantom(spec).labels;
    const LabelMap pred = corrupt_labels(gt, 0.05, 3);
    const CaseMetrics m = evaluate_case(pred, gt, "p");
    const std::vector<std::uint8_t> p(pred.data().begin(), pred.data().end());
    const std::vector<std::uint8_t> g(gt.data().begin(), gt.data().end());
    for (int r = 0; r < 3; ++r) {
        const auto pr = oracle::region(p, r), gr = oracle::region(g, r);
        CHECK(std::abs(m.dsc[r] - oracle::dice(pr, gr)) <= 1e-9);
        CHECK(std::abs(m.hd95[r] - oracle::hd95(pr, gr, gt.shape(), {1, 1, 1}, kEmptyHd95Penalty)) <= 1e-9);
    }
}
