#include "segfuse/postprocess.hpp"

#include <array>
#include <cstdlib>

namespace segfuse {

namespace {

std::vector<std::array<int, 3>> neighbour_offsets(Connectivity c)
{
    std::vector<std::array<int, 3>> offs;
    for (int dz = -1; dz <= 1; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const int manhattan = std::abs(dx) + std::abs(dy) + std::abs(dz);
                if (manhattan == 0) continue;
                if (c == Connectivity::Six && manhattan != 1) continue;
                offs.push_back({dx, dy, dz});
            }
    return offs;
}

}  // namespace

ComponentLabeling connected_components(const RegionMask& m, Connectivity connectivity)
{
    const Geometry& g = m.geometry();
    ComponentLabeling out;
    out.geometry = g;
    out.connectivity = connectivity;
    out.ids.assign(m.voxel_count(), 0);

    const auto offs = neighbour_offsets(connectivity);
    std::vector<std::size_t> stack;
    for (std::size_t seed = 0; seed < m.voxel_count(); ++seed) {
        if (!m[seed] || out.ids[seed] != 0) continue;
        const auto id = static_cast<std::uint32_t>(out.sizes.size() + 1);
        std::size_t size = 0;
        out.ids[seed] = id;
        stack.push_back(seed);
        while (!stack.empty()) {
            const std::size_t cur = stack.back();
            stack.pop_back();
            ++size;
            const Index3 p = g.coords(cur);
            for (const auto& o : offs) {
                const long long x = static_cast<long long>(p[0]) + o[0];
                const long long y = static_cast<long long>(p[1]) + o[1];
                const long long z = static_cast<long long>(p[2]) + o[2];
                if (x < 0 || y < 0 || z < 0 || x >= static_cast<long long>(g.shape[0]) ||
                    y >= static_cast<long long>(g.shape[1]) || z >= static_cast<long long>(g.shape[2]))
                    continue;
                const std::size_t nb = g.linear(static_cast<std::size_t>(x), static_cast<std::size_t>(y),
                                                static_cast<std::size_t>(z));
                if (m[nb] && out.ids[nb] == 0) {
                    out.ids[nb] = id;
                    stack.push_back(nb);
                }
            }
        }
        out.sizes.push_back(size);
    }
    return out;
}

LabelMap et_threshold_relabel(const LabelMap& m, std::size_t threshold)
{
    if (m.count(4) >= threshold) return m;
    std::vector<std::uint8_t> data(m.data().begin(), m.data().end());
    for (auto& v : data)
        if (v == 4) v = 1;
    return LabelMap(m.geometry(), std::move(data));
}

}  // namespace segfuse
