#pragma once

// JSON forms of the toolkit's records (nlohmann::json ADL hooks).

#include "json.hpp"

#include "segfuse/fusion.hpp"
#include "segfuse/metrics.hpp"
#include "segfuse/preprocess.hpp"
#include "segfuse/report.hpp"
#include "segfuse/tiling.hpp"

namespace segfuse {

using Json = nlohmann::json;

void to_json(Json& j, const BBox& b);
void from_json(const Json& j, BBox& b);

void to_json(Json& j, const TilingPlan& p);

void to_json(Json& j, const AugmentSpec& s);
void from_json(const Json& j, AugmentSpec& s);
void to_json(Json& j, const AugmentDraw& d);

// Final per-rater sensitivity/specificity, prior, iteration count, convergence.
Json staple_diagnostics(const StapleResult& r);

void to_json(Json& j, const CaseMetrics& m);
void to_json(Json& j, const Stats& s);
void to_json(Json& j, const SummaryStats& s);
void to_json(Json& j, const ModelRanking& r);

Weighting weighting_from_string(std::string_view name);
std::string_view to_string(Weighting w);

}  // namespace segfuse
