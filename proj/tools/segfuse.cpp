// segfuse: command-line front end for the fusion pipeline.
//
// Exit status: 0 success, 1 configuration or usage error, 2 some cases failed.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "segfuse/nifti.hpp"
#include "segfuse/pipeline.hpp"
#include "segfuse/postprocess.hpp"

using namespace segfuse;

namespace {

std::optional<Shape> parse_shape_list(const std::vector<std::size_t>& v, const std::string& flag)
{
    if (v.empty()) return std::nullopt;
    if (v.size() == 1) return Shape{v[0], v[0], v[0]};
    if (v.size() == 3) return Shape{v[0], v[1], v[2]};
    fail(ErrorKind::ConfigError, flag + " takes one or three values");
}

struct FuseFlags {
    std::string config;
    std::optional<std::size_t> et_threshold;
    std::optional<double> staple_tol;
    std::optional<int> staple_max_iters;
    std::vector<std::size_t> stride;
    std::optional<std::string> weighting;
    std::optional<unsigned> jobs;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output;
    bool no_postprocess = false;
};

void apply_overrides(PipelineConfig& c, const FuseFlags& f)
{
    if (f.et_threshold) c.et_threshold = *f.et_threshold;
    if (f.staple_tol) c.staple.tol = *f.staple_tol;
    if (f.staple_max_iters) c.staple.max_iters = *f.staple_max_iters;
    if (auto s = parse_shape_list(f.stride, "--stride")) c.stride = s;
    if (f.weighting) c.weighting.kind = weighting_from_string(*f.weighting);
    if (f.jobs) c.jobs = *f.jobs;
    if (f.seed) c.seed = *f.seed;
    if (f.output) c.output_dir = *f.output;
    if (f.no_postprocess) c.postprocess = false;
}

int report_errors(const std::vector<CaseOutcome>& cases)
{
    int failed = 0;
    for (const auto& c : cases)
        if (!c.ok) {
            std::cerr << "case " << c.case_id << ": " << c.error << "\n";
            ++failed;
        }
    return failed;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Brain tumour segmentation fusion, post-processing and evaluation"};
    app.require_subcommand(1);

    // fuse
    FuseFlags ff;
    auto* fuse = app.add_subcommand("fuse", "Average folds, STAPLE across models, relabel small ET");
    fuse->add_option("--config", ff.config, "Pipeline config JSON")->required();
    fuse->add_option("--et-threshold", ff.et_threshold, "Minimum ET voxel count kept as ET");
    fuse->add_option("--staple-tol", ff.staple_tol, "STAPLE convergence tolerance");
    fuse->add_option("--staple-max-iters", ff.staple_max_iters, "STAPLE iteration cap");
    fuse->add_option("--stride", ff.stride, "Tiling stride (one or three values)");
    fuse->add_option("--weighting", ff.weighting, "Patch stitching weights")
        ->check(CLI::IsMember({"uniform", "gaussian"}));
    fuse->add_option("--jobs", ff.jobs, "Cases processed in parallel");
    fuse->add_option("--seed", ff.seed, "Recorded in fuse_report.json");
    fuse->add_option("-o,--output", ff.output, "Output directory (overrides config)");
    fuse->add_flag("--no-postprocess", ff.no_postprocess, "Skip the ET threshold relabel");

    // eval
    std::string pred_dir, gt_dir;
    std::optional<std::string> pairs;
    EvalOptions eo;
    std::string eval_out = "eval";
    std::optional<double> penalty;
    auto* eval = app.add_subcommand("eval", "Per-case DSC/HD95 and summary statistics");
    eval->add_option("pred_dir", pred_dir, "Directory of predicted label maps")->required();
    eval->add_option("gt_dir", gt_dir, "Directory of ground-truth label maps")->required();
    eval->add_option("-o,--output", eval_out, "Output directory");
    eval->add_option("--jobs", eo.jobs, "Cases evaluated in parallel");
    eval->add_option("--pairs", pairs, "JSON {case_id: [pred, gt]} overriding stem pairing");
    eval->add_option("--hd95-empty-penalty", penalty, "HD95 when exactly one mask is empty");

    // rank
    std::optional<std::string> summary_csv;
    std::vector<std::string> model_csvs;
    std::optional<std::string> rank_out;
    auto* rank = app.add_subcommand("rank", "Rank models by average DSC, then HD95");
    rank->add_option("--summary", summary_csv,
                     "CSV: model,DSC_ET,DSC_TC,DSC_WT,HD95_ET,HD95_TC,HD95_WT");
    rank->add_option("--model", model_csvs, "name=metrics.csv (repeatable)");
    rank->add_option("-o,--output", rank_out, "Write ranking CSV here");

    // report
    std::string report_csv;
    std::optional<std::string> report_json;
    auto* report = app.add_subcommand("report", "Summary table from a metrics CSV");
    report->add_option("metrics_csv", report_csv)->required();
    report->add_option("--json", report_json, "Also write summary JSON");

    // synth
    SynthOptions so;
    std::string synth_out = "synth";
    std::vector<std::size_t> synth_shape;
    auto* synth = app.add_subcommand("synth", "Generate phantom cases and corrupted raters");
    synth->add_option("-o,--output", synth_out, "Output directory");
    synth->add_option("--cases", so.cases);
    synth->add_option("--models", so.models);
    synth->add_option("--folds", so.folds);
    synth->add_option("--rate", so.rate, "Label corruption rate");
    synth->add_option("--temperature", so.temperature, "ProbMap noise temperature");
    synth->add_option("--shape", synth_shape, "Volume shape (one or three values)");
    synth->add_option("--seed", so.seed);
    synth->add_flag("--label-raters", so.label_raters, "Write rater label maps instead of fold ProbMaps");

    // preprocess
    PreprocessOptions po;
    std::string pre_in, pre_out, crop_mode = "none";
    std::vector<std::size_t> box;
    std::optional<std::string> augment_json;
    std::optional<std::uint64_t> augment_seed;
    auto* pre = app.add_subcommand("preprocess", "Crop, z-normalise and augment one volume");
    pre->add_option("input", pre_in)->required();
    pre->add_option("output", pre_out)->required();
    pre->add_flag("--labels", po.label_map, "Input is a label map");
    pre->add_option("--crop", crop_mode)->check(CLI::IsMember({"none", "tight", "box"}));
    pre->add_option("--box", box, "x0 y0 z0 x1 y1 z1 (inclusive)")->expected(6);
    pre->add_flag("--znorm", po.znorm, "Z-score over nonzero voxels");
    pre->add_option("--augment", augment_json, "AugmentSpec JSON file");
    pre->add_option("--seed", augment_seed, "Augmentation seed (overrides the augment file's seed)");
    pre->add_option("--augment-index", po.augment_index, "Draw index");

    // postprocess
    std::string post_in, post_out;
    std::size_t post_threshold = kDefaultEtThreshold;
    auto* post = app.add_subcommand("postprocess", "Relabel ET as NCR when ET is small");
    post->add_option("input", post_in)->required();
    post->add_option("output", post_out)->required();
    post->add_option("--et-threshold", post_threshold);

    // tiling-plan
    std::vector<std::size_t> tp_volume, tp_patch{128}, tp_stride;
    std::optional<std::string> tp_config;
    auto* plan = app.add_subcommand("tiling-plan", "Print the sliding-window plan as JSON");
    plan->add_option("--volume", tp_volume, "Volume shape");
    plan->add_option("--patch", tp_patch, "Patch shape");
    plan->add_option("--stride", tp_stride, "Stride (default patch/2)");
    plan->add_option("--config", tp_config, "Take patch/stride from a pipeline config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (*fuse) {
            PipelineConfig config = load_config(ff.config);
            apply_overrides(config, ff);
            const FuseReport r = run_fuse(config);
            report_errors(r.cases);
            return r.exit_code();
        }
        if (*eval) {
            eo.output_dir = eval_out;
            if (pairs) eo.pairs_manifest = *pairs;
            if (penalty) eo.metrics.empty_penalty = *penalty;
            const EvalReport r = run_eval(pred_dir, gt_dir, eo);
            report_errors(r.errors);
            if (r.summary) std::cout << format_summary_table(*r.summary);
            return r.exit_code();
        }
        if (*rank) {
            std::vector<std::pair<std::string, fs::path>> models;
            for (const auto& m : model_csvs) {
                const auto eq = m.find('=');
                if (eq == std::string::npos || eq == 0)
                    fail(ErrorKind::ConfigError, "--model expects name=path, got " + m);
                models.emplace_back(m.substr(0, eq), m.substr(eq + 1));
            }
            if (!summary_csv && models.empty())
                fail(ErrorKind::ConfigError, "rank needs --summary or at least one --model");
            std::optional<fs::path> s;
            if (summary_csv) s = *summary_csv;
            const ModelRanking r = run_rank(s, models);
            std::cout << format_ranking_table(r);
            if (rank_out) write_text(*rank_out, ranking_csv(r));
            return kExitOk;
        }
        if (*report) {
            const SummaryStats s = run_report(report_csv);
            std::cout << format_summary_table(s);
            if (report_json) write_json(*report_json, s);
            return kExitOk;
        }
        if (*synth) {
            so.output_dir = synth_out;
            if (auto s = parse_shape_list(synth_shape, "--shape")) so.shape = *s;
            std::cout << run_synth(so).string() << "\n";
            return kExitOk;
        }
        if (*pre) {
            po.input = pre_in;
            po.output = pre_out;
            if (crop_mode == "tight") po.crop = PreprocessOptions::Crop::Tight;
            if (crop_mode == "box") {
                if (box.size() != 6) fail(ErrorKind::ConfigError, "--crop box needs --box");
                po.crop = PreprocessOptions::Crop::Box;
                po.box = BBox{{box[0], box[1], box[2]}, {box[3], box[4], box[5]}};
            }
            if (augment_json) {
                AugmentSpec spec = Json::parse(read_text(*augment_json)).get<AugmentSpec>();
                if (augment_seed) spec.seed = *augment_seed;
                po.augment = spec;
            } else if (augment_seed) {
                AugmentSpec spec;
                spec.seed = *augment_seed;
                po.augment = spec;
            }
            run_preprocess(po);
            return kExitOk;
        }
        if (*post) {
            run_postprocess(post_in, post_out, post_threshold);
            return kExitOk;
        }
        if (*plan) {
            Shape patch = *parse_shape_list(tp_patch, "--patch");
            std::optional<Shape> stride = parse_shape_list(tp_stride, "--stride");
            if (tp_config) {
                const PipelineConfig c = load_config(*tp_config);
                patch = c.patch;
                if (!stride) stride = c.stride;
            }
            const auto volume = parse_shape_list(tp_volume, "--volume");
            if (!volume) fail(ErrorKind::ConfigError, "tiling-plan needs --volume");
            const TilingPlan p = plan_tiling(*volume, patch, stride.value_or(default_stride(patch)));
            std::cout << Json(p).dump(2) << "\n";
            return kExitOk;
        }
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return kExitOk;
}
