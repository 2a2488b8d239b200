#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace segfuse {

// Deterministic generator used by augmentation sampling and the phantom
// generator: std::mt19937_64 seeded with splitmix64(seed) ^ splitmix64(stream).
// Derived values are built from raw 64-bit outputs only (doubles from the top
// 53 bits, Box-Muller normals), never from <random> distributions, so a given
// (seed, stream) yields the same sequence with any standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next() { return engine_(); }
    double uniform();  // [0, 1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    bool coin() { return (next() >> 63) != 0; }
    std::size_t below(std::size_t n);  // uniform in [0, n), n > 0
    double normal();

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace segfuse
