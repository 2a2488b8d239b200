#include "segfuse/synth.hpp"

#include <algorithm>
#include <cmath>

#include "segfuse/random.hpp"

namespace segfuse {

namespace {

// Stream ids keep the different consumers of one seed independent.
constexpr std::uint64_t kJitterStream = 0x6a6974746572ULL;
constexpr std::uint64_t kNoiseStream = 0x6e6f697365ULL;
constexpr std::uint64_t kCorruptStream = 0x636f7272757074ULL;
constexpr std::uint64_t kProbStream = 0x70726f62ULL;

bool inside(const Index3& p, const Vec3& c, const Vec3& r)
{
    double s = 0.0;
    for (int d = 0; d < 3; ++d) {
        const double t = (static_cast<double>(p[d]) - c[d]) / r[d];
        s += t * t;
    }
    return s <= 1.0;
}

}  // namespace

void PhantomSpec::validate() const
{
    Geometry::of_shape(shape, spacing).validate();
    if (!(center_jitter >= 0.0 && center_jitter < 1.0))
        fail(ErrorKind::InvalidArgument, "center_jitter must lie in [0, 1)");
    for (int d = 0; d < 3; ++d) {
        if (!(wt_radii[d] > tc_radii[d] && tc_radii[d] > et_radii[d] && et_radii[d] > 0.0))
            fail(ErrorKind::InvalidArgument, "radii must satisfy WT > TC > ET > 0 on every axis");
        const double half = (static_cast<double>(shape[d]) - 1.0) / 2.0;
        if (wt_radii[d] > half * (1.0 - center_jitter))
            fail(ErrorKind::RadiiDontFit, "WT radius " + std::to_string(wt_radii[d]) + " does not fit axis " +
                                              std::to_string(d) + " of extent " + std::to_string(shape[d]));
    }
}

Phantom make_phantom(const PhantomSpec& spec)
{
    spec.validate();
    const Geometry g = Geometry::of_shape(spec.shape, spec.spacing);

    Rng jitter(spec.seed, kJitterStream);
    Vec3 centre, brain;
    for (int d = 0; d < 3; ++d) {
        const double half = (static_cast<double>(spec.shape[d]) - 1.0) / 2.0;
        centre[d] = half + jitter.uniform(-1.0, 1.0) * spec.center_jitter * half;
        brain[d] = half + 0.5;
    }
    Vec3 brain_centre;
    for (int d = 0; d < 3; ++d) brain_centre[d] = (static_cast<double>(spec.shape[d]) - 1.0) / 2.0;

    std::vector<std::uint8_t> labels(g.voxel_count(), 0);
    std::vector<float> intensity(g.voxel_count(), 0.0f);
    Rng noise(spec.seed, kNoiseStream);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const Index3 p = g.coords(i);
        std::uint8_t l = 0;
        if (inside(p, centre, spec.et_radii))
            l = 4;
        else if (inside(p, centre, spec.tc_radii))
            l = 1;
        else if (inside(p, centre, spec.wt_radii))
            l = 2;
        labels[i] = l;
        const double n = noise.normal();
        if (l == 0 && !inside(p, brain_centre, brain)) continue;
        double level = 100.0;
        switch (l) {
        case 1: level = 60.0; break;
        case 2: level = 180.0; break;
        case 4: level = 250.0; break;
        default: break;
        }
        intensity[i] = static_cast<float>(std::max(1.0, level + 10.0 * n));
    }
    return {LabelMap(g, std::move(labels)), Volume(g, std::move(intensity))};
}

LabelMap corrupt_labels(const LabelMap& gt, double rate, std::uint64_t seed)
{
    if (!(rate >= 0.0 && rate <= 1.0)) fail(ErrorKind::InvalidArgument, "corruption rate must lie in [0, 1]");
    Rng rng(seed, kCorruptStream);
    std::vector<std::uint8_t> out(gt.data().begin(), gt.data().end());
    for (auto& v : out) {
        if (!(rng.uniform() < rate)) continue;
        std::array<std::uint8_t, 3> others{};
        std::size_t k = 0;
        for (auto l : kLabels)
            if (l != v) others[k++] = l;
        v = others[rng.below(3)];
    }
    return LabelMap(gt.geometry(), std::move(out));
}

ProbMap noisy_probmap(const LabelMap& gt, double temperature, std::uint64_t seed)
{
    if (!(temperature > 0.0) || !std::isfinite(temperature))
        fail(ErrorKind::InvalidArgument, "temperature must be positive and finite");
    Rng rng(seed, kProbStream);
    std::vector<double> data(gt.voxel_count() * 4);
    for (std::size_t i = 0; i < gt.voxel_count(); ++i) {
        const std::size_t hot = channel_of_label(gt[i]);
        for (std::size_t c = 0; c < 4; ++c) data[i * 4 + c] = (c == hot ? 1.0 : 0.0) + temperature * rng.uniform();
    }
    return ProbMap::normalized(gt.geometry(), std::move(data));
}

}  // namespace segfuse
