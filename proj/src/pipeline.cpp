#include "segfuse/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "segfuse/nifti.hpp"
#include "segfuse/postprocess.hpp"
#include "segfuse/regions.hpp"
#include "segfuse/synth.hpp"

namespace segfuse {

namespace {

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Each index writes only
// its own slot, so results never depend on scheduling.
template <typename F>
void parallel_for(std::size_t n, unsigned jobs, F&& fn)
{
    const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
    for (auto& t : pool) t.join();
}

Json read_json(const fs::path& path)
{
    if (!fs::exists(path)) fail(ErrorKind::ConfigError, "missing file " + path.string());
    try {
        return Json::parse(read_text(path));
    } catch (const Json::exception& e) {
        fail(ErrorKind::ConfigError, path.string() + ": " + e.what());
    }
}

// Integer literals built in code are signed even when nonnegative.
bool is_count(const Json& j)
{
    return j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0);
}

Shape shape_from_json(const Json& j, const std::string& field)
{
    if (is_count(j) && j.get<std::size_t>() > 0) {
        const auto n = j.get<std::size_t>();
        return {n, n, n};
    }
    if (!j.is_array() || j.size() != 3)
        fail(ErrorKind::ConfigError, field + " must be a positive integer or a list of three");
    Shape s;
    for (std::size_t d = 0; d < 3; ++d) {
        if (!is_count(j[d]) || j[d].get<std::size_t>() == 0)
            fail(ErrorKind::ConfigError, field + " entries must be positive integers");
        s[d] = j[d].get<std::size_t>();
    }
    return s;
}

fs::path resolve(const fs::path& base, const std::string& p)
{
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

ProbMap load_fold(const fs::path& fold, const PipelineConfig& config)
{
    const Json j = read_json(fold);
    if (j.contains("channels")) return nifti::load_probmap(fold);
    if (!j.contains("patches"))
        fail(ErrorKind::ConfigError, fold.string() + ": neither a ProbMap manifest nor a patch set");

    const Shape volume = shape_from_json(j.at("volume_shape"), "volume_shape");
    const Shape patch = j.contains("patch_shape") ? shape_from_json(j["patch_shape"], "patch_shape") : config.patch;
    const Shape stride = j.contains("stride") ? shape_from_json(j["stride"], "stride")
                                              : config.stride.value_or(default_stride(patch));
    const TilingPlan plan = plan_tiling(volume, patch, stride);
    std::vector<ProbMap> patches;
    for (const auto& p : j.at("patches")) patches.push_back(nifti::load_probmap(resolve(fold.parent_path(), p)));
    return stitch(patches, plan, config.weighting);
}

LabelMap model_labels(const ModelInput& model, const PipelineConfig& config)
{
    if (model.label_map) return nifti::load_label_map(*model.label_map);
    std::vector<ProbMap> folds;
    for (const auto& f : model.folds) folds.push_back(load_fold(f, config));
    return argmax_labels(average_probs(folds));
}

std::map<std::string, fs::path> nii_by_stem(const fs::path& dir)
{
    std::map<std::string, fs::path> out;
    if (!fs::is_directory(dir)) fail(ErrorKind::ConfigError, "not a directory: " + dir.string());
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file() || e.path().extension() != ".nii") continue;
        out.emplace(e.path().stem().string(), e.path());
    }
    return out;
}

}  // namespace

void write_text(const fs::path& path, const std::string& text)
{
    nifti::write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string read_text(const fs::path& path)
{
    const auto bytes = nifti::read_file(path);
    return std::string(bytes.begin(), bytes.end());
}

void write_json(const fs::path& path, const Json& j)
{
    write_text(path, j.dump(2) + "\n");
}

PipelineConfig parse_config(const Json& j, const fs::path& base_dir)
{
    PipelineConfig c;
    c.output_dir = base_dir / "fused";
    try {
        if (j.contains("output_dir")) c.output_dir = resolve(base_dir, j["output_dir"].get<std::string>());
        if (j.contains("et_threshold")) {
            if (!is_count(j["et_threshold"]))
                fail(ErrorKind::ConfigError, "et_threshold must be a nonnegative integer");
            c.et_threshold = j["et_threshold"].get<std::size_t>();
        }
        if (j.contains("postprocess")) c.postprocess = j["postprocess"].get<bool>();
        if (j.contains("staple")) {
            const auto& s = j["staple"];
            if (s.contains("tol")) c.staple.tol = s["tol"].get<double>();
            if (s.contains("max_iters")) c.staple.max_iters = s["max_iters"].get<int>();
        }
        if (j.contains("tiling")) {
            const auto& t = j["tiling"];
            if (t.contains("patch")) c.patch = shape_from_json(t["patch"], "tiling.patch");
            if (t.contains("stride")) c.stride = shape_from_json(t["stride"], "tiling.stride");
            if (t.contains("weighting")) c.weighting.kind = weighting_from_string(t["weighting"].get<std::string>());
            if (t.contains("sigma_frac")) c.weighting.sigma_frac = t["sigma_frac"].get<double>();
        }
        if (j.contains("hd95_empty_penalty")) c.metrics.empty_penalty = j["hd95_empty_penalty"].get<double>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("jobs")) c.jobs = j["jobs"].get<unsigned>();

        for (const auto& cj : j.at("cases")) {
            CaseInput ci;
            ci.case_id = cj.at("case_id").get<std::string>();
            if (cj.contains("ground_truth")) ci.ground_truth = resolve(base_dir, cj["ground_truth"].get<std::string>());
            for (const auto& mj : cj.at("models")) {
                ModelInput m;
                m.name = mj.at("name").get<std::string>();
                if (mj.contains("label_map")) m.label_map = resolve(base_dir, mj["label_map"].get<std::string>());
                if (mj.contains("folds"))
                    for (const auto& f : mj["folds"]) m.folds.push_back(resolve(base_dir, f.get<std::string>()));
                ci.models.push_back(std::move(m));
            }
            c.cases.push_back(std::move(ci));
        }
    } catch (const Json::exception& e) {
        fail(ErrorKind::ConfigError, std::string("config: ") + e.what());
    }
    return c;
}

PipelineConfig load_config(const fs::path& path)
{
    return parse_config(read_json(path), path.parent_path());
}

void validate_config(const PipelineConfig& config)
{
    if (config.cases.empty()) fail(ErrorKind::ConfigError, "config lists no cases");
    if (!(config.staple.tol > 0.0)) fail(ErrorKind::ConfigError, "staple tol must be positive");
    if (config.staple.max_iters < 1) fail(ErrorKind::ConfigError, "staple max_iters must be >= 1");
    if (!(config.metrics.empty_penalty >= 0.0)) fail(ErrorKind::ConfigError, "hd95 penalty must be nonnegative");
    if (config.stride)
        for (int d = 0; d < 3; ++d)
            if ((*config.stride)[d] < 1 || (*config.stride)[d] > config.patch[d])
                fail(ErrorKind::ConfigError, "tiling stride must lie in [1, patch]");
    std::set<std::string> ids;
    auto require_file = [](const fs::path& p) {
        if (!fs::exists(p)) fail(ErrorKind::ConfigError, "missing input file " + p.string());
    };
    for (const auto& c : config.cases) {
        if (c.case_id.empty() || c.case_id.find_first_of("/\\") != std::string::npos)
            fail(ErrorKind::ConfigError, "invalid case id '" + c.case_id + "'");
        if (!ids.insert(c.case_id).second) fail(ErrorKind::ConfigError, "duplicate case id " + c.case_id);
        if (c.models.empty()) fail(ErrorKind::ConfigError, "case " + c.case_id + " lists no models");
        if (c.ground_truth) require_file(*c.ground_truth);
        for (const auto& m : c.models) {
            if (m.label_map.has_value() == !m.folds.empty())
                fail(ErrorKind::ConfigError,
                     "model " + m.name + " in case " + c.case_id + " needs either folds or a label_map");
            if (m.label_map) require_file(*m.label_map);
            for (const auto& f : m.folds) require_file(f);
        }
    }
}

int FuseReport::exit_code() const
{
    for (const auto& c : cases)
        if (!c.ok) return kExitPartialFailure;
    return kExitOk;
}

int EvalReport::exit_code() const
{
    return errors.empty() ? kExitOk : kExitPartialFailure;
}

FusedCase fuse_case(const CaseInput& input, const PipelineConfig& config)
{
    std::vector<LabelMap> raters;
    for (const auto& m : input.models) raters.push_back(model_labels(m, config));
    MultiStapleResult fused = staple_multilabel_detailed(raters, config.staple);
    LabelMap labels = config.postprocess ? et_threshold_relabel(fused.labels, config.et_threshold) : fused.labels;
    return {std::move(labels), std::move(fused)};
}

FuseReport run_fuse(const PipelineConfig& config)
{
    validate_config(config);
    fs::create_directories(config.output_dir);

    std::vector<const CaseInput*> order;
    for (const auto& c : config.cases) order.push_back(&c);
    std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->case_id < b->case_id; });

    FuseReport report;
    report.cases.resize(order.size());
    parallel_for(order.size(), config.jobs, [&](std::size_t i) {
        const CaseInput& c = *order[i];
        CaseOutcome& out = report.cases[i];
        out.case_id = c.case_id;
        try {
            FusedCase fused = fuse_case(c, config);
            nifti::save(config.output_dir / (c.case_id + ".nii"), fused.labels);
            Json diag{{"case_id", c.case_id},
                      {"models", Json::array()},
                      {"et_threshold", config.et_threshold},
                      {"et_relabeled", fused.labels.count(4) != fused.staple.labels.count(4)},
                      {"regions", Json::array()}};
            for (const auto& m : c.models) diag["models"].push_back(m.name);
            for (const auto& r : fused.staple.regions) diag["regions"].push_back(staple_diagnostics(r));
            write_json(config.output_dir / (c.case_id + "_staple.json"), diag);
            out.ok = true;
        } catch (const std::exception& e) {
            out.error = e.what();
        }
    });

    Json summary{{"seed", config.seed}, {"cases", Json::array()}};
    for (const auto& c : report.cases) {
        Json cj{{"case_id", c.case_id}, {"ok", c.ok}};
        if (!c.ok) cj["error"] = c.error;
        summary["cases"].push_back(cj);
    }
    write_json(config.output_dir / "fuse_report.json", summary);
    return report;
}

EvalReport run_eval(const fs::path& pred_dir, const fs::path& gt_dir, const EvalOptions& options)
{
    struct Pair {
        std::string case_id;
        fs::path pred, gt;
    };
    std::vector<Pair> pairs;
    EvalReport report;

    if (options.pairs_manifest) {
        const Json j = read_json(*options.pairs_manifest);
        const fs::path base = options.pairs_manifest->parent_path();
        for (const auto& [id, v] : j.items()) {
            if (!v.is_array() || v.size() != 2)
                fail(ErrorKind::ConfigError, "pairs manifest entry " + id + " must be [pred, gt]");
            pairs.push_back({id, resolve(base, v[0].get<std::string>()), resolve(base, v[1].get<std::string>())});
        }
    } else {
        const auto preds = nii_by_stem(pred_dir);
        const auto gts = nii_by_stem(gt_dir);
        for (const auto& [stem, p] : preds) {
            const auto it = gts.find(stem);
            if (it == gts.end())
                report.errors.push_back({stem, false, "UnpairedCase: no ground truth for " + p.string()});
            else
                pairs.push_back({stem, p, it->second});
        }
        for (const auto& [stem, g] : gts)
            if (!preds.contains(stem))
                report.errors.push_back({stem, false, "UnpairedCase: no prediction for " + g.string()});
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.case_id < b.case_id; });

    std::vector<std::optional<CaseMetrics>> results(pairs.size());
    std::vector<std::string> failures(pairs.size());
    parallel_for(pairs.size(), options.jobs, [&](std::size_t i) {
        try {
            const LabelMap pred = nifti::load_label_map(pairs[i].pred);
            const LabelMap gt = nifti::load_label_map(pairs[i].gt);
            results[i] = evaluate_case(pred, gt, pairs[i].case_id, options.metrics);
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (results[i])
            report.metrics.push_back(std::move(*results[i]));
        else
            report.errors.push_back({pairs[i].case_id, false, failures[i]});
    }
    std::sort(report.errors.begin(), report.errors.end(),
              [](const CaseOutcome& a, const CaseOutcome& b) { return a.case_id < b.case_id; });

    fs::create_directories(options.output_dir);
    write_text(options.output_dir / "metrics.csv", metrics_csv(report.metrics));
    Json per_case = Json::array();
    for (const auto& m : report.metrics) per_case.push_back(m);
    Json errors = Json::array();
    for (const auto& e : report.errors) errors.push_back({{"case_id", e.case_id}, {"error", e.error}});
    write_json(options.output_dir / "metrics.json", Json{{"cases", per_case}, {"errors", errors}});
    if (!report.metrics.empty()) {
        report.summary = summarize(report.metrics);
        write_text(options.output_dir / "summary.txt", format_summary_table(*report.summary));
        write_json(options.output_dir / "summary.json", *report.summary);
    }
    return report;
}

ModelRanking run_rank(const std::optional<fs::path>& summary_csv,
                      const std::vector<std::pair<std::string, fs::path>>& metrics_csvs)
{
    std::vector<ModelSummary> models;
    if (summary_csv) models = parse_model_summary_csv(read_text(*summary_csv));
    for (const auto& [name, path] : metrics_csvs) {
        const auto cases = parse_metrics_csv(read_text(path));
        if (cases.empty()) fail(ErrorKind::EmptyList, path.string() + " has no cases");
        models.push_back(model_summary(name, cases));
    }
    return rank_models(models);
}

SummaryStats run_report(const fs::path& metrics_csv)
{
    const auto cases = parse_metrics_csv(read_text(metrics_csv));
    return summarize(cases);
}

fs::path run_synth(const SynthOptions& o)
{
    if (o.cases == 0 || o.models == 0 || (!o.label_raters && o.folds == 0))
        fail(ErrorKind::ConfigError, "synth needs at least one case, model and fold");
    const fs::path root = o.output_dir;
    Json cases = Json::array();
    for (std::size_t c = 0; c < o.cases; ++c) {
        char id[32];
        std::snprintf(id, sizeof id, "case_%03zu", c);
        const std::string case_id = id;
        const std::uint64_t case_seed = o.seed * 1000003ULL + c;

        PhantomSpec spec;
        spec.shape = o.shape;
        spec.seed = case_seed;
        // Scale the default 32^3 radii to the requested shape.
        for (int d = 0; d < 3; ++d) {
            const double k = static_cast<double>(o.shape[d]) / 32.0;
            spec.wt_radii[d] *= k;
            spec.tc_radii[d] *= k;
            spec.et_radii[d] *= k;
        }
        const Phantom ph = make_phantom(spec);
        nifti::save(root / "gt" / (case_id + ".nii"), ph.labels);
        nifti::save(root / "images" / (case_id + ".nii"), ph.intensity);

        Json models = Json::array();
        for (std::size_t m = 0; m < o.models; ++m) {
            const std::string model = "model_" + std::to_string(m);
            const LabelMap rater = corrupt_labels(ph.labels, o.rate, case_seed * 31 + m);
            if (o.label_raters) {
                const std::string rel = "pred/" + model + "/" + case_id + ".nii";
                nifti::save(root / rel, rater);
                models.push_back({{"name", model}, {"label_map", rel}});
                continue;
            }
            Json folds = Json::array();
            for (std::size_t f = 0; f < o.folds; ++f) {
                const std::string rel = "pred/" + model + "/" + case_id + "_f" + std::to_string(f) + ".json";
                nifti::save_probmap(root / rel, noisy_probmap(rater, o.temperature, (case_seed * 31 + m) * 17 + f));
                folds.push_back(rel);
            }
            models.push_back({{"name", model}, {"folds", folds}});
        }
        cases.push_back({{"case_id", case_id}, {"ground_truth", "gt/" + case_id + ".nii"}, {"models", models}});
    }
    Json config{{"output_dir", "fused"},
                {"et_threshold", kDefaultEtThreshold},
                {"staple", {{"tol", 1e-6}, {"max_iters", 100}}},
                {"seed", o.seed},
                {"cases", cases}};
    const fs::path config_path = root / "config.json";
    write_json(config_path, config);
    return config_path;
}

void run_preprocess(const PreprocessOptions& o)
{
    Json info{{"input", o.input.filename().string()}};
    auto crop_box = [&](const auto& v) -> std::optional<BBox> {
        switch (o.crop) {
        case PreprocessOptions::Crop::None: return std::nullopt;
        case PreprocessOptions::Crop::Tight: return nonzero_bbox(v);
        case PreprocessOptions::Crop::Box: return o.box;
        }
        return std::nullopt;
    };
    std::optional<AugmentDraw> draw;
    if (o.augment) draw = sample_augmentation(*o.augment, o.augment_index);

    if (o.label_map) {
        LabelMap m = nifti::load_label_map(o.input);
        info["input_shape"] = m.shape();
        if (auto box = crop_box(m)) {
            m = crop(m, *box);
            info["crop"] = *box;
        }
        if (draw) m = apply_augmentation(m, *draw);
        nifti::save(o.output, m);
    } else {
        Volume v = nifti::load_volume(o.input);
        info["input_shape"] = v.shape();
        if (auto box = crop_box(v)) {
            v = crop(v, *box);
            info["crop"] = *box;
        }
        if (o.znorm) v = znorm(v);
        if (draw) v = apply_augmentation(v, *draw);
        nifti::save(o.output, v);
    }
    info["znorm"] = o.znorm && !o.label_map;
    if (draw) {
        info["augment_spec"] = *o.augment;
        info["augment_index"] = o.augment_index;
        info["augment_draw"] = *draw;
    }
    write_json(o.output.parent_path() / (o.output.stem().string() + ".json"), info);
}

void run_postprocess(const fs::path& input, const fs::path& output, std::size_t et_threshold)
{
    nifti::save(output, et_threshold_relabel(nifti::load_label_map(input), et_threshold));
}

}  // namespace segfuse
