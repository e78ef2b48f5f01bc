#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dfmr/corpus.hpp"
#include "dfmr/metric.hpp"
#include "dfmr/parallel.hpp"
#include "dfmr/reducer.hpp"

namespace dfmr {

struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    long count = 0;
};

// Equal-width histogram of one value series over its observed [min, max].
struct HistogramSeries {
    std::string label; // "s=1", "tau=0.05", ...
    std::vector<HistogramBin> bins;
};

struct TauDecision {
    double tau = 0.0;
    int chosen_factor = 1;
    double final_sigma = 0.0; // mean sigma at the chosen factor
    long long tokens_out = 0;
    StopReason stop_reason = StopReason::reached_max;
};

struct MapRecord {
    std::string id;
    std::vector<std::pair<int, double>> sigma_by_factor; // (s, mean sigma at fixed s)
    std::vector<TauDecision> decisions;                  // one per threshold
};

struct RatioSummary {
    double tau = 0.0;
    std::vector<std::pair<int, double>> factor_fractions; // (s, fraction of corpus)
    double mean_tokens = 0.0;
};

struct AnalyzeParams {
    std::vector<int> candidates = {1, 2, 3};
    std::vector<double> thresholds = {5e-2, 7e-2, 9e-2};
    int bins = 50;
    int k = 10;
    WindowMode mode = WindowMode::coarse;
    ChannelAggregation aggregation = ChannelAggregation::pooled_scalars;
    Exec exec = Exec::parallel;
    ReadOptions read_options;
};

struct CorpusReport {
    std::vector<MapRecord> per_map;          // sorted by id
    std::vector<HistogramSeries> histograms; // fixed-s series, then per-tau series
    std::vector<std::string> bottom_ids;     // k smallest sigma at reference factor
    std::vector<std::string> top_ids;        // k largest, descending
    std::vector<RatioSummary> ratio_summary; // per threshold
    std::vector<Diagnostic> diagnostics;     // unreadable maps, excluded from aggregates
    AnalyzeParams params;
    int reference_factor = 1; // smallest candidate; ranking key
};

// Runs the per-map metric at every fixed candidate factor and the dynamic
// selection at every threshold, then aggregates histograms, top/bottom-k
// rankings (ties broken by id ascending) and per-threshold compression-ratio
// summaries. Per-map work is parallel; aggregation is a sequential merge, so
// parallel and serial runs produce identical reports.
CorpusReport analyze_corpus(const std::filesystem::path & root, const CorpusManifest & manifest,
                            const AnalyzeParams & params = {});

enum class ReportFormat { json, csv };

std::string report_to_json(const CorpusReport & report);

// json: writes one file at `path`. csv: treats `path` as a directory and
// writes one file per histogram series plus a per-map table.
void export_report(const CorpusReport & report, ReportFormat format,
                   const std::filesystem::path & path);

} // namespace dfmr
