#pragma once

// File-level orchestration behind the command-line tool.
//
// Pipeline config (JSON, paths relative to the config file):
//
//   {
//     "output_dir": "fused",
//     "et_threshold": 200,
//     "staple": {"tol": 1e-6, "max_iters": 100},
//     "tiling": {"patch": [128,128,128], "stride": [64,64,64],
//                "weighting": "gaussian", "sigma_frac": 0.125},
//     "seed": 0,
//     "jobs": 1,
//     "cases": [
//       {"case_id": "case_000",
//        "ground_truth": "gt/case_000.nii",              (optional)
//        "models": [
//          {"name": "m0", "folds": ["pred/m0/case_000_f0.json", ...]},
//          {"name": "m1", "label_map": "pred/m1/case_000.nii"}]}
//     ]
//   }
//
// A fold file is either a ProbMap manifest ({"channels":..., "files":...}) or
// a patch set {"volume_shape":[..], "patch_shape":[..], "stride":[..],
// "patches":[<ProbMap manifest>, ...]} whose patches are stitched with the
// configured weighting. "stride" in a patch set overrides the config stride.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "segfuse/fusion.hpp"
#include "segfuse/json_io.hpp"
#include "segfuse/metrics.hpp"
#include "segfuse/preprocess.hpp"
#include "segfuse/report.hpp"
#include "segfuse/tiling.hpp"

namespace segfuse {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitPartialFailure = 2;

struct ModelInput {
    std::string name;
    std::vector<fs::path> folds;
    std::optional<fs::path> label_map;
};

struct CaseInput {
    std::string case_id;
    std::vector<ModelInput> models;
    std::optional<fs::path> ground_truth;
};

struct PipelineConfig {
    std::vector<CaseInput> cases;
    std::size_t et_threshold = 200;
    bool postprocess = true;
    StapleParams staple;
    Shape patch{128, 128, 128};
    std::optional<Shape> stride;
    StitchWeighting weighting;
    MetricOptions metrics;
    fs::path output_dir = "fused";
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

// Throws ConfigError on malformed JSON or missing fields.
PipelineConfig parse_config(const Json& j, const fs::path& base_dir);
PipelineConfig load_config(const fs::path& path);

// Every referenced input must exist and thresholds be sane; throws ConfigError
// naming the first offending path or field.
void validate_config(const PipelineConfig& config);

struct CaseOutcome {
    std::string case_id;
    bool ok = false;
    std::string error;
};

struct FuseReport {
    std::vector<CaseOutcome> cases;  // sorted by case id
    int exit_code() const;
};

// Fuses one case in memory: per model, average the fold ProbMaps and take the
// argmax (or load its label map); STAPLE across models; ET threshold relabel.
struct FusedCase {
    LabelMap labels;
    MultiStapleResult staple;
};
FusedCase fuse_case(const CaseInput& input, const PipelineConfig& config);

// Writes <output_dir>/<case>.nii, <case>_staple.json and fuse_report.json.
FuseReport run_fuse(const PipelineConfig& config);

struct EvalOptions {
    fs::path output_dir = "eval";
    unsigned jobs = 1;
    MetricOptions metrics;
    // Explicit {"case_id": ["pred.nii", "gt.nii"], ...} pairing, replacing
    // the filename-stem pairing.
    std::optional<fs::path> pairs_manifest;
};

struct EvalReport {
    std::vector<CaseMetrics> metrics;  // sorted by case id
    std::vector<CaseOutcome> errors;
    std::optional<SummaryStats> summary;
    int exit_code() const;
};

// Pairs *.nii files by stem, evaluates every pair and writes metrics.csv,
// metrics.json, summary.txt and summary.json. Unpaired or failing cases are
// recorded and skipped.
EvalReport run_eval(const fs::path& pred_dir, const fs::path& gt_dir, const EvalOptions& options);

// Ranking from a per-model summary CSV, and/or per-case metrics CSVs
// (one per model) reduced to per-region means.
ModelRanking run_rank(const std::optional<fs::path>& summary_csv,
                      const std::vector<std::pair<std::string, fs::path>>& metrics_csvs);

SummaryStats run_report(const fs::path& metrics_csv);

struct SynthOptions {
    fs::path output_dir = "synth";
    std::size_t cases = 3;
    std::size_t models = 3;
    std::size_t folds = 2;
    double rate = 0.05;
    double temperature = 0.5;
    Shape shape{32, 32, 32};
    std::uint64_t seed = 7;
    // Emit rater label maps directly instead of per-fold ProbMaps.
    bool label_raters = false;
};

// Writes images/, gt/, pred/<model>/ and a ready-to-run config.json.
fs::path run_synth(const SynthOptions& options);

struct PreprocessOptions {
    fs::path input;
    fs::path output;
    bool label_map = false;
    enum class Crop { None, Tight, Box } crop = Crop::None;
    BBox box;
    bool znorm = false;
    std::optional<AugmentSpec> augment;
    std::uint64_t augment_index = 0;
};

// Writes the output volume plus <output stem>.json describing the crop box
// and augmentation draw that were applied.
void run_preprocess(const PreprocessOptions& options);

void run_postprocess(const fs::path& input, const fs::path& output, std::size_t et_threshold);

// Shortest decimal JSON dump with a trailing newline.
void write_json(const fs::path& path, const Json& j);
void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

}  // namespace segfuse
