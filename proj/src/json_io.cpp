#include "segfuse/json_io.hpp"

namespace segfuse {

void to_json(Json& j, const BBox& b)
{
    j = Json{{"lo", b.lo}, {"hi", b.hi}};
}

void from_json(const Json& j, BBox& b)
{
    j.at("lo").get_to(b.lo);
    j.at("hi").get_to(b.hi);
}

void to_json(Json& j, const TilingPlan& p)
{
    j = Json{{"volume_shape", p.volume_shape}, {"patch_shape", p.patch_shape}, {"stride", p.stride},
             {"padded_shape", p.padded_shape}, {"padding", p.padding()}, {"window_count", p.windows.size()},
             {"windows", p.windows}};
}

void to_json(Json& j, const AugmentSpec& s)
{
    j = Json{{"seed", s.seed},
             {"rotation_max_deg", s.rotation_max_deg},
             {"flip_axes", s.flip_axes},
             {"gamma_range", {s.gamma_range.first, s.gamma_range.second}}};
}

void from_json(const Json& j, AugmentSpec& s)
{
    s = AugmentSpec{};
    if (j.contains("seed")) j.at("seed").get_to(s.seed);
    if (j.contains("rotation_max_deg")) j.at("rotation_max_deg").get_to(s.rotation_max_deg);
    if (j.contains("flip_axes")) j.at("flip_axes").get_to(s.flip_axes);
    if (j.contains("gamma_range")) {
        const auto& g = j.at("gamma_range");
        s.gamma_range = {g.at(0).get<double>(), g.at(1).get<double>()};
    }
    s.validate();
}

void to_json(Json& j, const AugmentDraw& d)
{
    j = Json{{"angles_deg", d.angles_deg}, {"flips", d.flips}, {"gamma", d.gamma}};
}

Json staple_diagnostics(const StapleResult& r)
{
    return Json{{"region", to_string(r.mask.region())},
                {"sensitivity", r.final_params.sensitivity},
                {"specificity", r.final_params.specificity},
                {"prior", r.final_params.prior.value_or(0.0)},
                {"iterations", r.iterations},
                {"converged", r.converged},
                {"foreground_voxels", r.mask.count()}};
}

void to_json(Json& j, const CaseMetrics& m)
{
    j = Json{{"case_id", m.case_id}};
    for (Region r : kRegions) {
        j["DSC_" + std::string(to_string(r))] = m.dsc_of(r);
        j["HD95_" + std::string(to_string(r))] = m.hd95_of(r);
    }
}

void to_json(Json& j, const Stats& s)
{
    j = Json{{"mean", s.mean}, {"stddev", s.stddev}, {"median", s.median}, {"q25", s.q25}, {"q75", s.q75}};
}

void to_json(Json& j, const SummaryStats& s)
{
    j = Json{{"cases", s.cases}};
    for (Region r : kRegions) {
        const auto k = static_cast<std::size_t>(r);
        j["DSC"][std::string(to_string(r))] = s.dsc[k];
        j["HD95"][std::string(to_string(r))] = s.hd95[k];
    }
}

void to_json(Json& j, const ModelRanking& r)
{
    j = Json::array();
    for (const auto& e : r.entries)
        j.push_back(Json{{"name", e.name},
                         {"rank", e.rank},
                         {"dsc", e.summary.dsc},
                         {"hd95", e.summary.hd95},
                         {"avg_dsc", e.summary.avg_dsc},
                         {"avg_hd95", e.summary.avg_hd95}});
}

Weighting weighting_from_string(std::string_view name)
{
    if (name == "uniform") return Weighting::Uniform;
    if (name == "gaussian") return Weighting::Gaussian;
    fail(ErrorKind::ConfigError, "weighting must be 'uniform' or 'gaussian', got '" + std::string(name) + "'");
}

std::string_view to_string(Weighting w)
{
    return w == Weighting::Uniform ? "uniform" : "gaussian";
}

}  // namespace segfuse
