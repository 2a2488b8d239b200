#pragma once

// Aggregate statistics over cases and the average-based model ranking.

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "segfuse/metrics.hpp"

namespace segfuse {

struct Stats {
    double mean = 0.0;
    double stddev = 0.0;  // population
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
};

// Values are sorted before any accumulation, so the result does not depend
// on input order.
Stats describe(std::vector<double> values);

struct SummaryStats {
    std::size_t cases = 0;
    std::array<Stats, 3> dsc;   // ET, TC, WT
    std::array<Stats, 3> hd95;
};

SummaryStats summarize(std::span<const CaseMetrics> cases);

struct ModelSummary {
    std::string name;
    std::array<double, 3> dsc{};   // per-region means, ET, TC, WT
    std::array<double, 3> hd95{};
    double avg_dsc = 0.0;
    double avg_hd95 = 0.0;
};

ModelSummary model_summary(std::string name, const std::array<double, 3>& dsc, const std::array<double, 3>& hd95);

// Per-region means over a model's cases.
ModelSummary model_summary(std::string name, std::span<const CaseMetrics> cases);

inline constexpr double kRankTieTolerance = 5e-5;

struct RankedModel {
    std::string name;
    int rank = 0;
    ModelSummary summary;
};

struct ModelRanking {
    std::vector<RankedModel> entries;  // ordered by rank

    int rank_of(std::string_view name) const;
};

// Higher avg_dsc first. Models whose avg_dsc lies within kRankTieTolerance of
// the best model in their tie group are ordered by avg_hd95 ascending, then
// by name.
ModelRanking rank_models(std::span<const ModelSummary> summaries);

// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

// Rows Mean/StdDev/Median/25quantile/75quantile, columns DSC ET TC WT then
// HD95 ET TC WT; DSC with 4 decimals, HD95 with 2.
std::string format_summary_table(const SummaryStats& s);
std::string format_ranking_table(const ModelRanking& r);

inline constexpr std::string_view kMetricsCsvHeader = "case_id,DSC_ET,DSC_TC,DSC_WT,HD95_ET,HD95_TC,HD95_WT";

std::string metrics_csv_row(const CaseMetrics& m);
std::string metrics_csv(std::span<const CaseMetrics> cases);
std::vector<CaseMetrics> parse_metrics_csv(std::string_view text);

// One row per model: name,DSC_ET,DSC_TC,DSC_WT,HD95_ET,HD95_TC,HD95_WT.
std::vector<ModelSummary> parse_model_summary_csv(std::string_view text);
std::string ranking_csv(const ModelRanking& r);

}  // namespace segfuse
