#pragma once

// Ensemble fusion: softmax averaging, argmax decoding, majority voting and
// binary STAPLE (expectation-maximization over rater sensitivity/specificity).

#include <optional>
#include <span>
#include <vector>

#include "segfuse/regions.hpp"
#include "segfuse/volume.hpp"

namespace segfuse {

ProbMap average_probs(std::span<const ProbMap> maps);

// Per-voxel argmax; ties go to the later channel in {0,1,2,4}.
LabelMap argmax_labels(const ProbMap& p);

// Per-voxel mode; ties resolved by priority 4 > 1 > 2 > 0.
LabelMap majority_vote(std::span<const LabelMap> maps);

enum class PriorMode {
    Global,    // one foreground prior: mean vote rate over all raters and voxels
    PerVoxel,  // each voxel's own vote fraction
};

struct StapleParams {
    // Per-rater sensitivity p_j and specificity q_j. Empty means every rater
    // starts at default_quality.
    std::vector<double> sensitivity;
    std::vector<double> specificity;
    // Global foreground prior; computed from the votes when unset.
    std::optional<double> prior;
    PriorMode prior_mode = PriorMode::Global;
    int max_iters = 100;
    double tol = 1e-6;
    double default_quality = 0.99999;

    static constexpr double kClampLo = 1e-7;
    static constexpr double kClampHi = 1.0 - 1e-7;
};

struct StapleResult {
    RegionMask mask;                // posterior >= 0.5
    std::vector<double> posterior;  // W_i, x-fastest
    StapleParams final_params;      // M-step of the returned posterior
    int iterations = 0;             // number of E-steps run
    bool converged = false;
};

// Iterates E-step (posterior from the current p, q) and M-step (p, q from
// the posterior) until the largest posterior change drops below tol or
// max_iters E-steps have run. E-step evidence is accumulated in log-odds
// space with per-voxel terms summed in sorted order, so the result does not
// depend on rater order. p, q are clamped to [1e-7, 1 - 1e-7] after each M-step.
StapleResult staple_binary(std::span<const RegionMask> masks, const StapleParams& init = {});

// The M-step applied to a posterior; exposed so callers can check that a
// returned result is a fixed point.
void staple_m_step(std::span<const RegionMask> masks, std::span<const double> posterior,
                   std::vector<double>& sensitivity, std::vector<double>& specificity);

struct MultiStapleResult {
    LabelMap labels;
    std::vector<StapleResult> regions;  // ET, TC, WT
};

// Per-region binary STAPLE on the ET/TC/WT decompositions, then
// recompose_labels (which repairs non-nested region outputs by union).
MultiStapleResult staple_multilabel_detailed(std::span<const LabelMap> maps, const StapleParams& init = {});
LabelMap staple_multilabel(std::span<const LabelMap> maps, const StapleParams& init = {});

}  // namespace segfuse
