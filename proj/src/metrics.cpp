#include "segfuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "segfuse/stats.hpp"

namespace segfuse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct EnvelopeScratch {
    std::vector<double> f, d, z;
    std::vector<std::size_t> v;

    void resize(std::size_t n)
    {
        f.resize(n);
        d.resize(n);
        z.resize(n + 1);
        v.resize(n);
    }
};

// 1-D squared distance transform of sampled function f (entries may be +inf)
// at positions q * spacing: d(q) = min_p (f(p) + ((q - p) * spacing)^2).
void envelope_1d(EnvelopeScratch& s, std::size_t n, double spacing)
{
    const auto pos = [spacing](std::size_t q) { return static_cast<double>(q) * spacing; };
    std::size_t first = 0;
    while (first < n && s.f[first] == kInf) ++first;
    if (first == n) {
        std::fill(s.d.begin(), s.d.begin() + static_cast<std::ptrdiff_t>(n), kInf);
        return;
    }
    std::size_t k = 0;
    s.v[0] = first;
    s.z[0] = -kInf;
    s.z[1] = kInf;
    for (std::size_t q = first + 1; q < n; ++q) {
        if (s.f[q] == kInf) continue;
        const double xq = pos(q);
        double cut;
        for (;;) {
            const double xv = pos(s.v[k]);
            cut = ((s.f[q] + xq * xq) - (s.f[s.v[k]] + xv * xv)) / (2.0 * (xq - xv));
            if (cut <= s.z[k] && k > 0)
                --k;
            else
                break;
        }
        // With k == 0 the cut is always above z[0] = -inf.
        ++k;
        s.v[k] = q;
        s.z[k] = cut;
        s.z[k + 1] = kInf;
    }
    k = 0;
    for (std::size_t q = 0; q < n; ++q) {
        const double xq = pos(q);
        while (s.z[k + 1] < xq) ++k;
        const double dx = xq - pos(s.v[k]);
        s.d[q] = dx * dx + s.f[s.v[k]];
    }
}

std::vector<double> squared_edt(const RegionMask& m)
{
    const Geometry& g = m.geometry();
    std::vector<double> sq(m.voxel_count());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = m[i] ? 0.0 : kInf;

    const std::array<std::size_t, 3> stride{1, g.shape[0], g.shape[0] * g.shape[1]};
    EnvelopeScratch s;
    for (int axis = 0; axis < 3; ++axis) {
        const std::size_t n = g.shape[axis];
        if (n == 1) continue;
        s.resize(n);
        const int a = (axis + 1) % 3;
        const int b = (axis + 2) % 3;
        for (std::size_t ib = 0; ib < g.shape[b]; ++ib)
            for (std::size_t ia = 0; ia < g.shape[a]; ++ia) {
                const std::size_t base = ia * stride[a] + ib * stride[b];
                for (std::size_t q = 0; q < n; ++q) s.f[q] = sq[base + q * stride[axis]];
                envelope_1d(s, n, g.spacing[axis]);
                for (std::size_t q = 0; q < n; ++q) sq[base + q * stride[axis]] = s.d[q];
            }
    }
    return sq;
}

BBox union_bbox(const RegionMask& a, const RegionMask& b)
{
    const BBox ba = nonzero_bbox(a);
    const BBox bb = nonzero_bbox(b);
    BBox u;
    for (int d = 0; d < 3; ++d) {
        u.lo[d] = std::min(ba.lo[d], bb.lo[d]);
        u.hi[d] = std::max(ba.hi[d], bb.hi[d]);
    }
    return u;
}

// 95th percentile of the distances from every voxel of `from` to the nearest
// voxel of `to` (both already boundaries on the same grid).
double directed_hd95(const RegionMask& from, const RegionMask& to)
{
    const std::vector<double> sq = squared_edt(to);
    std::vector<double> dist;
    for (std::size_t i = 0; i < from.voxel_count(); ++i)
        if (from[i]) dist.push_back(std::sqrt(sq[i]));
    std::sort(dist.begin(), dist.end());
    return quantile_sorted(dist, 0.95);
}

}  // namespace

DistanceField::DistanceField(Geometry geometry, std::vector<double> data)
    : Grid(std::move(geometry), std::move(data), kChannels)
{
}

double dice(const RegionMask& a, const RegionMask& b)
{
    require_same_grid(a.geometry(), b.geometry(), "dice");
    std::size_t na = 0, nb = 0, both = 0;
    for (std::size_t i = 0; i < a.voxel_count(); ++i) {
        na += a[i];
        nb += b[i];
        both += a[i] & b[i];
    }
    if (na + nb == 0) return 1.0;
    return 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

RegionMask boundary(const RegionMask& m)
{
    const Geometry& g = m.geometry();
    std::vector<std::uint8_t> out(m.voxel_count(), 0);
    std::size_t i = 0;
    for (std::size_t z = 0; z < g.shape[2]; ++z)
        for (std::size_t y = 0; y < g.shape[1]; ++y)
            for (std::size_t x = 0; x < g.shape[0]; ++x, ++i) {
                if (!m[i]) continue;
                const bool edge = x == 0 || y == 0 || z == 0 || x + 1 == g.shape[0] || y + 1 == g.shape[1] ||
                                  z + 1 == g.shape[2];
                out[i] = edge || !m.at(x - 1, y, z) || !m.at(x + 1, y, z) || !m.at(x, y - 1, z) ||
                                 !m.at(x, y + 1, z) || !m.at(x, y, z - 1) || !m.at(x, y, z + 1)
                             ? 1
                             : 0;
            }
    return m.rebuilt(g, std::move(out));
}

DistanceField edt(const RegionMask& m)
{
    if (m.count() == 0) fail(ErrorKind::EmptyMask, "edt of an empty mask");
    std::vector<double> d = squared_edt(m);
    for (double& v : d) v = std::sqrt(v);
    return DistanceField(m.geometry(), std::move(d));
}

double hd95(const RegionMask& a, const RegionMask& b, const MetricOptions& options)
{
    require_same_grid(a.geometry(), b.geometry(), "hd95");
    const bool a_empty = a.count() == 0;
    const bool b_empty = b.count() == 0;
    if (a_empty && b_empty) return 0.0;
    if (a_empty || b_empty) return options.empty_penalty;

    // Every source and query voxel lies inside the union box, so the
    // transform restricted to it is still exact.
    const RegionMask ba = boundary(a);
    const RegionMask bb = boundary(b);
    const BBox box = union_bbox(ba, bb);
    const RegionMask ca = crop(ba, box);
    const RegionMask cb = crop(bb, box);
    return std::max(directed_hd95(ca, cb), directed_hd95(cb, ca));
}

CaseMetrics evaluate_case(const LabelMap& pred, const LabelMap& gt, std::string case_id,
                          const MetricOptions& options)
{
    require_same_grid(pred.geometry(), gt.geometry(), "evaluate_case " + case_id);
    CaseMetrics out;
    out.case_id = std::move(case_id);
    for (Region r : kRegions) {
        const RegionMask p = region_mask(pred, r);
        const RegionMask t = region_mask(gt, r);
        const auto k = static_cast<std::size_t>(r);
        out.dsc[k] = dice(p, t);
        out.hd95[k] = hd95(p, t, options);
    }
    return out;
}

}  // namespace segfuse
