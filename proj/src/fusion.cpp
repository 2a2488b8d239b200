#include "segfuse/fusion.hpp"

#include <algorithm>
#include <cmath>

namespace segfuse {

namespace {

template <typename T>
void require_nonempty_same_grid(std::span<const T> items, const char* what)
{
    if (items.empty()) fail(ErrorKind::EmptyList, std::string(what) + ": no inputs");
    for (const auto& item : items) require_same_grid(items.front().geometry(), item.geometry(), what);
}

double clamp_prob(double v)
{
    return std::clamp(v, StapleParams::kClampLo, StapleParams::kClampHi);
}

double logit(double p)
{
    return std::log(p) - std::log1p(-p);
}

double sigmoid(double x)
{
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double sorted_sum(std::vector<double>& terms)
{
    std::sort(terms.begin(), terms.end());
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
}

}  // namespace

ProbMap average_probs(std::span<const ProbMap> maps)
{
    require_nonempty_same_grid(maps, "average_probs");
    const std::size_t len = maps.front().data().size();
    std::vector<float> out(len);
    std::vector<double> vals(maps.size());
    for (std::size_t k = 0; k < len; ++k) {
        for (std::size_t m = 0; m < maps.size(); ++m) vals[m] = maps[m][k];
        out[k] = static_cast<float>(sorted_sum(vals) / static_cast<double>(maps.size()));
    }
    return ProbMap(maps.front().geometry(), std::move(out));
}

LabelMap argmax_labels(const ProbMap& p)
{
    std::vector<std::uint8_t> labels(p.voxel_count());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < 4; ++c)
            if (p.prob(i, c) >= p.prob(i, best)) best = c;
        labels[i] = kLabels[best];
    }
    return LabelMap(p.geometry(), std::move(labels));
}

LabelMap majority_vote(std::span<const LabelMap> maps)
{
    require_nonempty_same_grid(maps, "majority_vote");
    // Highest priority first so strict '>' keeps it on ties.
    constexpr std::array<std::uint8_t, 4> priority{4, 1, 2, 0};
    std::vector<std::uint8_t> labels(maps.front().voxel_count());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        std::array<std::size_t, 5> votes{};
        for (const auto& m : maps) ++votes[m[i]];
        std::uint8_t winner = priority[0];
        for (std::uint8_t l : priority)
            if (votes[l] > votes[winner]) winner = l;
        labels[i] = winner;
    }
    return LabelMap(maps.front().geometry(), std::move(labels));
}

void staple_m_step(std::span<const RegionMask> masks, std::span<const double> posterior,
                   std::vector<double>& sensitivity, std::vector<double>& specificity)
{
    const std::size_t n = posterior.size();
    double w_sum = 0.0;
    double not_w_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        w_sum += posterior[i];
        not_w_sum += 1.0 - posterior[i];
    }
    for (std::size_t j = 0; j < masks.size(); ++j) {
        double tp = 0.0;
        double tn = 0.0;
        const auto d = masks[j].data();
        for (std::size_t i = 0; i < n; ++i) {
            if (d[i])
                tp += posterior[i];
            else
                tn += 1.0 - posterior[i];
        }
        // An empty denominator carries no information: keep the previous value.
        if (w_sum > 0.0) sensitivity[j] = clamp_prob(tp / w_sum);
        if (not_w_sum > 0.0) specificity[j] = clamp_prob(tn / not_w_sum);
    }
}

StapleResult staple_binary(std::span<const RegionMask> masks, const StapleParams& init)
{
    require_nonempty_same_grid(masks, "staple_binary");
    const std::size_t raters = masks.size();
    const std::size_t n = masks.front().voxel_count();
    if (init.max_iters < 1) fail(ErrorKind::InvalidArgument, "staple max_iters must be >= 1");
    if (!(init.tol > 0.0)) fail(ErrorKind::InvalidArgument, "staple tol must be positive");

    StapleParams params = init;
    auto seed_quality = [&](std::vector<double>& v, const char* name) {
        if (v.empty()) v.assign(raters, init.default_quality);
        if (v.size() != raters)
            fail(ErrorKind::InvalidArgument, std::string("staple ") + name + " has wrong rater count");
        for (double& x : v) x = clamp_prob(x);
    };
    seed_quality(params.sensitivity, "sensitivity");
    seed_quality(params.specificity, "specificity");

    std::size_t votes = 0;
    for (const auto& m : masks) votes += m.count();
    if (!params.prior)
        params.prior = static_cast<double>(votes) / (static_cast<double>(raters) * static_cast<double>(n));
    params.prior = clamp_prob(*params.prior);

    // Per-voxel log prior odds.
    std::vector<double> prior_logit;
    if (params.prior_mode == PriorMode::PerVoxel) {
        prior_logit.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t c = 0;
            for (const auto& m : masks) c += m[i];
            prior_logit[i] = logit(clamp_prob(static_cast<double>(c) / static_cast<double>(raters)));
        }
    }
    const double global_logit = logit(*params.prior);

    std::vector<double> posterior(n, 0.0);
    std::vector<double> terms(raters);
    std::vector<double> on(raters), off(raters);
    StapleResult result{RegionMask::empty(masks.front().geometry(), masks.front().region()), {}, {}, 0, false};

    for (int iter = 1; iter <= params.max_iters; ++iter) {
        for (std::size_t j = 0; j < raters; ++j) {
            const double p = params.sensitivity[j];
            const double q = params.specificity[j];
            on[j] = std::log(p) - std::log1p(-q);   // D = 1: log p - log(1 - q)
            off[j] = std::log1p(-p) - std::log(q);  // D = 0: log(1 - p) - log q
        }
        double max_change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < raters; ++j) terms[j] = masks[j][i] ? on[j] : off[j];
            const double base = prior_logit.empty() ? global_logit : prior_logit[i];
            const double w = sigmoid(base + sorted_sum(terms));
            max_change = std::max(max_change, std::abs(w - posterior[i]));
            posterior[i] = w;
        }
        staple_m_step(masks, posterior, params.sensitivity, params.specificity);
        result.iterations = iter;
        if (iter > 1 && max_change < params.tol) {
            result.converged = true;
            break;
        }
    }

    std::vector<std::uint8_t> mask(n);
    for (std::size_t i = 0; i < n; ++i) mask[i] = posterior[i] >= 0.5 ? 1 : 0;
    result.mask = RegionMask(masks.front().geometry(), std::move(mask), masks.front().region());
    result.posterior = std::move(posterior);
    result.final_params = std::move(params);
    return result;
}

MultiStapleResult staple_multilabel_detailed(std::span<const LabelMap> maps, const StapleParams& init)
{
    require_nonempty_same_grid(maps, "staple_multilabel");
    std::vector<StapleResult> regions;
    for (Region r : kRegions) {
        std::vector<RegionMask> masks;
        masks.reserve(maps.size());
        for (const auto& m : maps) masks.push_back(region_mask(m, r));
        regions.push_back(staple_binary(masks, init));
    }
    LabelMap labels = recompose_labels(regions[0].mask, regions[1].mask, regions[2].mask);
    return {std::move(labels), std::move(regions)};
}

LabelMap staple_multilabel(std::span<const LabelMap> maps, const StapleParams& init)
{
    return staple_multilabel_detailed(maps, init).labels;
}

}  // namespace segfuse
