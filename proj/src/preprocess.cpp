#include "segfuse/preprocess.hpp"

#include <cmath>
#include <numbers>

#include "segfuse/random.hpp"

namespace segfuse {

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

std::pair<double, double> cos_sin_deg(double deg)
{
    // Exact values on quarter turns so axis-aligned rotations are pure
    // index permutations.
    const double turns = deg / 90.0;
    if (turns == std::floor(turns)) {
        switch (((static_cast<long long>(turns) % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
        }
    }
    const double rad = deg * std::numbers::pi / 180.0;
    return {std::cos(rad), std::sin(rad)};
}

Mat3 mul(const Mat3& a, const Mat3& b)
{
    Mat3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
    return r;
}

// R = Rz * Ry * Rx (x applied first).
Mat3 rotation(const Vec3& deg)
{
    const auto [cx, sx] = cos_sin_deg(deg[0]);
    const auto [cy, sy] = cos_sin_deg(deg[1]);
    const auto [cz, sz] = cos_sin_deg(deg[2]);
    const Mat3 rx{{{1, 0, 0}, {0, cx, -sx}, {0, sx, cx}}};
    const Mat3 ry{{{cy, 0, sy}, {0, 1, 0}, {-sy, 0, cy}}};
    const Mat3 rz{{{cz, -sz, 0}, {sz, cz, 0}, {0, 0, 1}}};
    return mul(rz, mul(ry, rx));
}

double snap(double v)
{
    const double r = std::round(v);
    return std::abs(v - r) < 1e-9 ? r : v;
}

// Calls sample(out_index, source_continuous_index) for every output voxel.
template <typename F>
void for_each_source(const Geometry& g, const Vec3& angles_deg, F&& sample)
{
    const Mat3 r = rotation(angles_deg);
    Vec3 centre;
    for (int d = 0; d < 3; ++d) centre[d] = (static_cast<double>(g.shape[d]) - 1.0) / 2.0;
    std::size_t i = 0;
    for (std::size_t z = 0; z < g.shape[2]; ++z)
        for (std::size_t y = 0; y < g.shape[1]; ++y)
            for (std::size_t x = 0; x < g.shape[0]; ++x, ++i) {
                const Vec3 p{(static_cast<double>(x) - centre[0]) * g.spacing[0],
                             (static_cast<double>(y) - centre[1]) * g.spacing[1],
                             (static_cast<double>(z) - centre[2]) * g.spacing[2]};
                Vec3 src;
                // Inverse mapping: source = R^T * p.
                for (int d = 0; d < 3; ++d) {
                    const double phys = r[0][d] * p[0] + r[1][d] * p[1] + r[2][d] * p[2];
                    src[d] = snap(phys / g.spacing[d] + centre[d]);
                }
                sample(i, src);
            }
}

}  // namespace

void AugmentSpec::validate() const
{
    if (!(rotation_max_deg >= 0.0 && rotation_max_deg <= 180.0))
        fail(ErrorKind::InvalidArgument, "rotation_max_deg must lie in [0, 180]");
    const auto [lo, hi] = gamma_range;
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo > 0.0) || !(lo <= hi))
        fail(ErrorKind::InvalidArgument, "gamma_range must satisfy 0 < lo <= hi");
}

bool AugmentDraw::is_identity() const
{
    return angles_deg == Vec3{0.0, 0.0, 0.0} && flips == AxisFlags{false, false, false} && gamma == 1.0;
}

Volume znorm(const Volume& v)
{
    double sum = 0.0;
    std::size_t n = 0;
    for (float x : v.data())
        if (x != 0.0f) {
            sum += x;
            ++n;
        }
    if (n == 0) fail(ErrorKind::EmptyVolume, "znorm: no nonzero voxels");
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (float x : v.data())
        if (x != 0.0f) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n));

    std::vector<float> out(v.voxel_count(), 0.0f);
    if (sd > 0.0) {
        for (std::size_t i = 0; i < out.size(); ++i)
            if (v[i] != 0.0f) out[i] = static_cast<float>((v[i] - mean) / sd);
    }
    return Volume(v.geometry(), std::move(out));
}

Volume gamma_transform(const Volume& v, double gamma)
{
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        fail(ErrorKind::InvalidArgument, "gamma must be positive and finite");
    const auto [lo_it, hi_it] = std::minmax_element(v.data().begin(), v.data().end());
    const double m = *lo_it;
    const double top = *hi_it;
    if (top == m) fail(ErrorKind::ConstantVolume, "gamma_transform: constant volume");
    const double range = top - m;

    std::vector<float> out(v.voxel_count());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double t = (v[i] - m) / range;
        out[i] = static_cast<float>(m + range * std::pow(t, gamma));
    }
    return Volume(v.geometry(), std::move(out));
}

Volume rotate3d(const Volume& v, const Vec3& angles_deg)
{
    const Geometry& g = v.geometry();
    std::vector<float> out(v.voxel_count(), 0.0f);
    for_each_source(g, angles_deg, [&](std::size_t i, const Vec3& s) {
        double acc = 0.0;
        std::array<long long, 3> base;
        Vec3 frac;
        for (int d = 0; d < 3; ++d) {
            const double f = std::floor(s[d]);
            base[d] = static_cast<long long>(f);
            frac[d] = s[d] - f;
            if (s[d] <= -1.0 || s[d] >= static_cast<double>(g.shape[d])) return;
        }
        for (int corner = 0; corner < 8; ++corner) {
            double w = 1.0;
            std::array<long long, 3> p;
            bool inside = true;
            for (int d = 0; d < 3; ++d) {
                const int bit = (corner >> d) & 1;
                p[d] = base[d] + bit;
                w *= bit ? frac[d] : 1.0 - frac[d];
                if (p[d] < 0 || p[d] >= static_cast<long long>(g.shape[d])) inside = false;
            }
            if (!inside || w == 0.0) continue;
            acc += w * v.at(static_cast<std::size_t>(p[0]), static_cast<std::size_t>(p[1]),
                            static_cast<std::size_t>(p[2]));
        }
        out[i] = static_cast<float>(acc);
    });
    return Volume(g, std::move(out));
}

LabelMap rotate_labels(const LabelMap& m, const Vec3& angles_deg)
{
    const Geometry& g = m.geometry();
    std::vector<std::uint8_t> out(m.voxel_count(), 0);
    for_each_source(g, angles_deg, [&](std::size_t i, const Vec3& s) {
        std::array<std::size_t, 3> p;
        for (int d = 0; d < 3; ++d) {
            const double r = std::round(s[d]);
            if (r < 0.0 || r >= static_cast<double>(g.shape[d])) return;
            p[d] = static_cast<std::size_t>(r);
        }
        out[i] = m.at(p[0], p[1], p[2]);
    });
    return LabelMap(g, std::move(out));
}

AugmentDraw sample_augmentation(const AugmentSpec& spec, std::uint64_t draw_index)
{
    spec.validate();
    Rng rng(spec.seed, draw_index);
    AugmentDraw draw;
    for (int d = 0; d < 3; ++d) draw.angles_deg[d] = rng.uniform(0.0, spec.rotation_max_deg);
    for (int d = 0; d < 3; ++d) {
        const bool coin = rng.coin();
        draw.flips[d] = spec.flip_axes[d] && coin;
    }
    const auto [lo, hi] = spec.gamma_range;
    const double u = rng.uniform();
    draw.gamma = lo == hi ? lo : lo + (hi - lo) * u;
    return draw;
}

Volume apply_augmentation(const Volume& v, const AugmentDraw& draw)
{
    Volume out = flip3d(rotate3d(v, draw.angles_deg), draw.flips);
    if (draw.gamma == 1.0) return out;
    const auto [lo, hi] = std::minmax_element(out.data().begin(), out.data().end());
    if (*lo == *hi) return out;
    return gamma_transform(out, draw.gamma);
}

LabelMap apply_augmentation(const LabelMap& m, const AugmentDraw& draw)
{
    return flip3d(rotate_labels(m, draw.angles_deg), draw.flips);
}

}  // namespace segfuse
