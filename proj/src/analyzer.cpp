#include "dfmr/analyzer.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>

#include <json.hpp>

namespace dfmr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_label_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

HistogramSeries build_histogram(const std::string & label, const std::vector<double> & values,
                                int bins) {
    HistogramSeries series;
    series.label = label;
    if (values.empty() || bins < 1) {
        return series;
    }
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    const double width = (hi - lo) / bins;

    series.bins.resize(static_cast<std::size_t>(bins));
    for (int i = 0; i < bins; ++i) {
        series.bins[i].lo = lo + i * width;
        series.bins[i].hi = lo + (i + 1) * width;
    }
    series.bins.back().hi = hi;

    for (double v : values) {
        int idx = width > 0.0 ? static_cast<int>((v - lo) / width) : 0;
        idx = std::clamp(idx, 0, bins - 1);
        ++series.bins[static_cast<std::size_t>(idx)].count;
    }
    return series;
}

json histogram_to_json(const HistogramSeries & series) {
    json bins = json::array();
    for (const auto & b : series.bins) {
        bins.push_back({b.lo, b.hi, b.count});
    }
    return {{"label", series.label}, {"bins", bins}};
}

} // namespace

CorpusReport analyze_corpus(const fs::path & root, const CorpusManifest & manifest,
                            const AnalyzeParams & params) {
    if (manifest.entries.empty()) {
        throw EmptyCorpus("corpus manifest has no entries");
    }
    if (params.bins < 1) {
        throw InvalidArgument("histogram bin count must be >= 1");
    }
    if (params.candidates.empty()) {
        throw InvalidArgument("candidate factor list must not be empty");
    }

    CorpusReport report;
    report.params = params;
    report.reference_factor = *std::min_element(params.candidates.begin(), params.candidates.end());

    const std::size_t n = manifest.entries.size();
    std::vector<std::optional<MapRecord>> records(n);
    std::vector<std::optional<Diagnostic>> failures(n);

    // per-map work is independent; slot writes keep the merge order-free
    const bool parallel = params.exec == Exec::parallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (long long ii = 0; ii < static_cast<long long>(n); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        const ManifestEntry & entry = manifest.entries[i];
        try {
            const FeatureMap map = read_map(root / entry.path, params.read_options);
            MapRecord record;
            record.id = entry.id;
            for (int s : params.candidates) {
                const MetricReport metric =
                    mean_sigma(map, s, params.mode, params.aggregation, Exec::serial);
                record.sigma_by_factor.emplace_back(s, metric.mean_sigma);
            }
            for (double tau : params.thresholds) {
                const CompressionPolicy policy = CompressionPolicy::dynamic_with(
                    tau, params.candidates, params.mode, params.aggregation);
                const CompressionDecision d = select_factor(map, policy, i, Exec::serial);
                TauDecision td;
                td.tau = tau;
                td.chosen_factor = d.chosen_factor;
                td.final_sigma = d.sigma_trace.back().second;
                td.tokens_out = d.tokens_out;
                td.stop_reason = d.stop_reason;
                record.decisions.push_back(td);
            }
            records[i] = std::move(record);
        } catch (const Error & e) {
            failures[i] = Diagnostic{entry.path, e.what()};
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (records[i]) {
            report.per_map.push_back(std::move(*records[i]));
        } else if (failures[i]) {
            report.diagnostics.push_back(std::move(*failures[i]));
        }
    }
    for (const auto & d : manifest.diagnostics) {
        report.diagnostics.push_back(d);
    }
    if (report.per_map.empty()) {
        throw EmptyCorpus("no readable maps in corpus");
    }

    const std::size_t valid = report.per_map.size();

    // fixed-factor series
    for (std::size_t ci = 0; ci < params.candidates.size(); ++ci) {
        std::vector<double> values;
        values.reserve(valid);
        for (const auto & r : report.per_map) {
            values.push_back(r.sigma_by_factor[ci].second);
        }
        report.histograms.push_back(build_histogram(
            "s=" + std::to_string(params.candidates[ci]), values, params.bins));
    }
    // per-threshold series: metric at the selected factor
    for (std::size_t ti = 0; ti < params.thresholds.size(); ++ti) {
        std::vector<double> values;
        values.reserve(valid);
        for (const auto & r : report.per_map) {
            values.push_back(r.decisions[ti].final_sigma);
        }
        report.histograms.push_back(build_histogram(
            "tau=" + format_label_value(params.thresholds[ti]), values, params.bins));
    }

    // rankings by sigma at the reference (smallest) factor, ties by id
    std::size_t ref_index = 0;
    for (std::size_t ci = 0; ci < params.candidates.size(); ++ci) {
        if (params.candidates[ci] == report.reference_factor) {
            ref_index = ci;
        }
    }
    std::vector<std::pair<double, std::string>> ranked;
    ranked.reserve(valid);
    for (const auto & r : report.per_map) {
        ranked.emplace_back(r.sigma_by_factor[ref_index].second, r.id);
    }
    std::sort(ranked.begin(), ranked.end());
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(std::max(params.k, 0)), valid);
    for (std::size_t i = 0; i < k; ++i) {
        report.bottom_ids.push_back(ranked[i].second);
    }
    // top-k ordered by sigma descending, ties by id ascending
    std::sort(ranked.begin(), ranked.end(), [](const auto & a, const auto & b) {
        if (a.first != b.first) {
            return a.first > b.first;
        }
        return a.second < b.second;
    });
    for (std::size_t i = 0; i < k; ++i) {
        report.top_ids.push_back(ranked[i].second);
    }

    // compression-ratio summary per threshold
    for (std::size_t ti = 0; ti < params.thresholds.size(); ++ti) {
        RatioSummary summary;
        summary.tau = params.thresholds[ti];
        std::vector<long> counts(params.candidates.size(), 0);
        long long token_sum = 0;
        for (const auto & r : report.per_map) {
            const TauDecision & d = r.decisions[ti];
            for (std::size_t ci = 0; ci < params.candidates.size(); ++ci) {
                if (params.candidates[ci] == d.chosen_factor) {
                    ++counts[ci];
                }
            }
            token_sum += d.tokens_out;
        }
        for (std::size_t ci = 0; ci < params.candidates.size(); ++ci) {
            summary.factor_fractions.emplace_back(params.candidates[ci],
                                                  static_cast<double>(counts[ci]) / valid);
        }
        summary.mean_tokens = static_cast<double>(token_sum) / static_cast<double>(valid);
        report.ratio_summary.push_back(std::move(summary));
    }

    return report;
}

std::string report_to_json(const CorpusReport & report) {
    json per_map = json::array();
    for (const auto & r : report.per_map) {
        json sigmas = json::array();
        for (const auto & [s, sigma] : r.sigma_by_factor) {
            sigmas.push_back({s, sigma});
        }
        json decisions = json::array();
        for (const auto & d : r.decisions) {
            decisions.push_back({{"tau", d.tau},
                                 {"factor", d.chosen_factor},
                                 {"sigma", d.final_sigma},
                                 {"tokens_out", d.tokens_out},
                                 {"stop_reason", stop_reason_name(d.stop_reason)}});
        }
        per_map.push_back({{"id", r.id}, {"sigma_by_factor", sigmas}, {"decisions", decisions}});
    }

    json histograms = json::array();
    for (const auto & series : report.histograms) {
        histograms.push_back(histogram_to_json(series));
    }

    json ratio = json::array();
    for (const auto & summary : report.ratio_summary) {
        json fractions = json::array();
        for (const auto & [s, f] : summary.factor_fractions) {
            fractions.push_back({s, f});
        }
        ratio.push_back({{"tau", summary.tau},
                         {"fractions", fractions},
                         {"mean_tokens", summary.mean_tokens}});
    }

    json diagnostics = json::array();
    for (const auto & d : report.diagnostics) {
        diagnostics.push_back({{"path", d.path}, {"error", d.error}});
    }

    json doc = {{"params",
                 {{"candidates", report.params.candidates},
                  {"thresholds", report.params.thresholds},
                  {"bins", report.params.bins},
                  {"k", report.params.k},
                  {"mode", window_mode_name(report.params.mode)},
                  {"aggregation", channel_aggregation_name(report.params.aggregation)}}},
                {"reference_factor", report.reference_factor},
                {"per_map", per_map},
                {"histograms", histograms},
                {"rankings", {{"bottom", report.bottom_ids}, {"top", report.top_ids}}},
                {"ratio_summary", ratio},
                {"diagnostics", diagnostics}};
    return doc.dump(2) + "\n";
}

void export_report(const CorpusReport & report, ReportFormat format, const fs::path & path) {
    if (format == ReportFormat::json) {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoFailure("cannot open for writing: " + path.string());
        }
        out << report_to_json(report);
        if (!out) {
            throw IoFailure("write failed: " + path.string());
        }
        return;
    }

    std::error_code ec;
    fs::create_directories(path, ec);
    if (!fs::is_directory(path)) {
        throw IoFailure("cannot create report directory: " + path.string());
    }

    for (const auto & series : report.histograms) {
        std::string name = "hist_" + series.label + ".csv";
        std::replace(name.begin(), name.end(), '=', '_');
        std::ofstream out(path / name, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoFailure("cannot open for writing: " + (path / name).string());
        }
        out << "bin_lo,bin_hi,count\n";
        for (const auto & b : series.bins) {
            out << format_value(b.lo) << ',' << format_value(b.hi) << ',' << b.count << '\n';
        }
    }

    // ranking files: k rows each, metric taken at the reference factor
    std::map<std::string, double> sigma_ref;
    std::size_t ref_index = 0;
    for (std::size_t ci = 0; ci < report.params.candidates.size(); ++ci) {
        if (report.params.candidates[ci] == report.reference_factor) {
            ref_index = ci;
        }
    }
    for (const auto & r : report.per_map) {
        sigma_ref[r.id] = r.sigma_by_factor[ref_index].second;
    }
    const std::pair<const char *, const std::vector<std::string> *> rankings[] = {
        {"ranking_bottom.csv", &report.bottom_ids},
        {"ranking_top.csv", &report.top_ids},
    };
    for (const auto & [name, ids] : rankings) {
        std::ofstream out(path / name, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoFailure("cannot open for writing: " + (path / name).string());
        }
        out << "rank,id,sigma\n";
        for (std::size_t i = 0; i < ids->size(); ++i) {
            out << (i + 1) << ',' << (*ids)[i] << ',' << format_value(sigma_ref.at((*ids)[i]))
                << '\n';
        }
    }

    std::ofstream out(path / "per_map.csv", std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoFailure("cannot open for writing: " + (path / "per_map.csv").string());
    }
    out << "id";
    for (const auto & [s, sigma] : report.per_map.front().sigma_by_factor) {
        (void) sigma;
        out << ",sigma_s" << s;
    }
    for (const auto & d : report.per_map.front().decisions) {
        out << ",factor_tau_" << format_label_value(d.tau)
            << ",tokens_tau_" << format_label_value(d.tau);
    }
    out << '\n';
    for (const auto & r : report.per_map) {
        out << r.id;
        for (const auto & [s, sigma] : r.sigma_by_factor) {
            (void) s;
            out << ',' << format_value(sigma);
        }
        for (const auto & d : r.decisions) {
            out << ',' << d.chosen_factor << ',' << d.tokens_out;
        }
        out << '\n';
    }
}

} // namespace dfmr
