#pragma once

// Synthetic phantoms and imperfect-rater stand-ins for end-to-end testing.

#include <cstdint>

#include "segfuse/volume.hpp"

namespace segfuse {

// Nested ellipsoids (radii in voxels, per axis) centred near the middle of
// the volume. The centre is shifted per axis by up to
// center_jitter * (n - 1) / 2, drawn from the seed.
struct PhantomSpec {
    Shape shape{32, 32, 32};
    Vec3 spacing{1.0, 1.0, 1.0};
    std::uint64_t seed = 0;
    Vec3 wt_radii{11.0, 10.0, 9.0};
    Vec3 tc_radii{8.0, 7.0, 6.5};
    Vec3 et_radii{5.0, 4.5, 4.0};
    double center_jitter = 0.1;

    // InvalidArgument for non-decreasing radii; RadiiDontFit when the whole
    // tumour cannot fit for the worst-case jitter.
    void validate() const;
};

struct Phantom {
    LabelMap labels;
    Volume intensity;
};

// Labels: 4 inside ET, 1 in TC\ET, 2 in WT\TC. Intensity: a label-dependent
// level plus Gaussian noise inside an ellipsoidal "brain" covering the volume
// (and the tumour), zero elsewhere.
Phantom make_phantom(const PhantomSpec& spec);

// Each voxel independently, with probability rate, replaced by a uniformly
// chosen different label.
LabelMap corrupt_labels(const LabelMap& gt, double rate, std::uint64_t seed);

// p_c proportional to onehot_c + temperature * u_c with u_c ~ U[0,1). For
// temperature < 1 the argmax is always the input label.
ProbMap noisy_probmap(const LabelMap& gt, double temperature, std::uint64_t seed);

}  // namespace segfuse
