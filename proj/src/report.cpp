#include "segfuse/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "segfuse/stats.hpp"

namespace segfuse {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const std::size_t at = s.find(sep, start);
        parts.push_back(s.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
        if (at == std::string_view::npos) break;
        start = at + 1;
    }
    return parts;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\r' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view s, std::size_t line)
{
    s = trim(s);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        fail(ErrorKind::InvalidArgument, "line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
    return v;
}

// Each data row: label followed by six numbers.
template <typename F>
void for_each_row(std::string_view text, F&& row)
{
    std::size_t line_no = 0;
    bool header_seen = false;
    for (std::string_view line : split(text, '\n')) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        const auto cols = split(line, ',');
        if (cols.size() != 7)
            fail(ErrorKind::InvalidArgument, "line " + std::to_string(line_no) + ": expected 7 columns");
        std::array<double, 6> v;
        for (std::size_t k = 0; k < 6; ++k) v[k] = parse_double(cols[k + 1], line_no);
        row(std::string(trim(cols[0])), v);
    }
}

std::string fixed(double v, int decimals)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string pad(std::string s, std::size_t width)
{
    if (s.size() < width) s.insert(0, width - s.size(), ' ');
    return s;
}

}  // namespace

Stats describe(std::vector<double> values)
{
    if (values.empty()) fail(ErrorKind::EmptyList, "describe: no values");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    Stats s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / n);
    s.median = quantile_sorted(values, 0.5);
    s.q25 = quantile_sorted(values, 0.25);
    s.q75 = quantile_sorted(values, 0.75);
    return s;
}

SummaryStats summarize(std::span<const CaseMetrics> cases)
{
    if (cases.empty()) fail(ErrorKind::EmptyList, "summarize: no cases");
    SummaryStats out;
    out.cases = cases.size();
    for (std::size_t r = 0; r < 3; ++r) {
        std::vector<double> d, h;
        for (const auto& c : cases) {
            d.push_back(c.dsc[r]);
            h.push_back(c.hd95[r]);
        }
        out.dsc[r] = describe(std::move(d));
        out.hd95[r] = describe(std::move(h));
    }
    return out;
}

ModelSummary model_summary(std::string name, const std::array<double, 3>& dsc, const std::array<double, 3>& hd95)
{
    ModelSummary m;
    m.name = std::move(name);
    m.dsc = dsc;
    m.hd95 = hd95;
    m.avg_dsc = (dsc[0] + dsc[1] + dsc[2]) / 3.0;
    m.avg_hd95 = (hd95[0] + hd95[1] + hd95[2]) / 3.0;
    return m;
}

ModelSummary model_summary(std::string name, std::span<const CaseMetrics> cases)
{
    const SummaryStats s = summarize(cases);
    return model_summary(std::move(name), {s.dsc[0].mean, s.dsc[1].mean, s.dsc[2].mean},
                         {s.hd95[0].mean, s.hd95[1].mean, s.hd95[2].mean});
}

int ModelRanking::rank_of(std::string_view name) const
{
    for (const auto& e : entries)
        if (e.name == name) return e.rank;
    fail(ErrorKind::InvalidArgument, "model '" + std::string(name) + "' is not ranked");
}

ModelRanking rank_models(std::span<const ModelSummary> summaries)
{
    if (summaries.empty()) fail(ErrorKind::EmptyList, "rank_models: no models");
    std::vector<ModelSummary> sorted(summaries.begin(), summaries.end());
    // Total order first so tie groups come out the same for any input order.
    std::sort(sorted.begin(), sorted.end(), [](const ModelSummary& a, const ModelSummary& b) {
        if (a.avg_dsc != b.avg_dsc) return a.avg_dsc > b.avg_dsc;
        if (a.avg_hd95 != b.avg_hd95) return a.avg_hd95 < b.avg_hd95;
        return a.name < b.name;
    });
    for (std::size_t start = 0; start < sorted.size();) {
        std::size_t end = start + 1;
        while (end < sorted.size() && sorted[start].avg_dsc - sorted[end].avg_dsc <= kRankTieTolerance) ++end;
        std::sort(sorted.begin() + static_cast<std::ptrdiff_t>(start), sorted.begin() + static_cast<std::ptrdiff_t>(end),
                  [](const ModelSummary& a, const ModelSummary& b) {
                      if (a.avg_hd95 != b.avg_hd95) return a.avg_hd95 < b.avg_hd95;
                      return a.name < b.name;
                  });
        start = end;
    }
    ModelRanking out;
    for (std::size_t k = 0; k < sorted.size(); ++k)
        out.entries.push_back({sorted[k].name, static_cast<int>(k + 1), sorted[k]});
    return out;
}

std::string format_number(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string format_summary_table(const SummaryStats& s)
{
    std::ostringstream os;
    os << pad("", 12);
    for (const char* h : {"DSC_ET", "DSC_TC", "DSC_WT", "HD95_ET", "HD95_TC", "HD95_WT"}) os << pad(h, 10);
    os << '\n';
    const std::array<std::pair<const char*, double Stats::*>, 5> rows{{{"Mean", &Stats::mean},
                                                                       {"StdDev", &Stats::stddev},
                                                                       {"Median", &Stats::median},
                                                                       {"25quantile", &Stats::q25},
                                                                       {"75quantile", &Stats::q75}}};
    for (const auto& [label, field] : rows) {
        std::string line = label;
        line.resize(12, ' ');
        os << line;
        for (std::size_t r = 0; r < 3; ++r) os << pad(fixed(s.dsc[r].*field, 4), 10);
        for (std::size_t r = 0; r < 3; ++r) os << pad(fixed(s.hd95[r].*field, 2), 10);
        os << '\n';
    }
    return os.str();
}

std::string format_ranking_table(const ModelRanking& r)
{
    std::ostringstream os;
    os << "Model       " << pad("DSC_ET", 8) << pad("DSC_TC", 8) << pad("DSC_WT", 8) << pad("Avg", 8)
       << pad("HD95_ET", 9) << pad("HD95_TC", 9) << pad("HD95_WT", 9) << pad("Avg", 9) << pad("Rank", 6) << '\n';
    for (const auto& e : r.entries) {
        std::string name = e.name;
        if (name.size() < 12) name.resize(12, ' ');
        os << name;
        for (double v : e.summary.dsc) os << pad(fixed(v, 4), 8);
        os << pad(fixed(e.summary.avg_dsc, 4), 8);
        for (double v : e.summary.hd95) os << pad(fixed(v, 2), 9);
        os << pad(fixed(e.summary.avg_hd95, 2), 9) << pad(std::to_string(e.rank), 6) << '\n';
    }
    return os.str();
}

std::string metrics_csv_row(const CaseMetrics& m)
{
    std::string row = m.case_id;
    for (double v : m.dsc) row += "," + format_number(v);
    for (double v : m.hd95) row += "," + format_number(v);
    return row;
}

std::string metrics_csv(std::span<const CaseMetrics> cases)
{
    std::string out(kMetricsCsvHeader);
    out += '\n';
    for (const auto& c : cases) out += metrics_csv_row(c) + "\n";
    return out;
}

std::vector<CaseMetrics> parse_metrics_csv(std::string_view text)
{
    std::vector<CaseMetrics> out;
    for_each_row(text, [&](std::string id, const std::array<double, 6>& v) {
        CaseMetrics m;
        m.case_id = std::move(id);
        for (std::size_t r = 0; r < 3; ++r) {
            m.dsc[r] = v[r];
            m.hd95[r] = v[r + 3];
        }
        out.push_back(std::move(m));
    });
    return out;
}

std::vector<ModelSummary> parse_model_summary_csv(std::string_view text)
{
    std::vector<ModelSummary> out;
    for_each_row(text, [&](std::string name, const std::array<double, 6>& v) {
        out.push_back(model_summary(std::move(name), {v[0], v[1], v[2]}, {v[3], v[4], v[5]}));
    });
    return out;
}

std::string ranking_csv(const ModelRanking& r)
{
    std::string out = "name,DSC_ET,DSC_TC,DSC_WT,DSC_Avg,HD95_ET,HD95_TC,HD95_WT,HD95_Avg,rank\n";
    for (const auto& e : r.entries) {
        out += e.name;
        for (double v : e.summary.dsc) out += "," + format_number(v);
        out += "," + format_number(e.summary.avg_dsc);
        for (double v : e.summary.hd95) out += "," + format_number(v);
        out += "," + format_number(e.summary.avg_hd95) + "," + std::to_string(e.rank) + "\n";
    }
    return out;
}

}  // namespace segfuse
