#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "dfmr/analyzer.hpp"
#include "dfmr/npy.hpp"
#include "helpers.hpp"

using namespace dfmr;
using testutil::slurp;
using testutil::TempDir;

namespace {

// writes `count` maps of one synth kind under root/<prefix>NN.npy
void write_population(const std::filesystem::path & root, const std::string & prefix,
                      SynthKind kind, int count, std::uint64_t seed_base, float amplitude) {
    for (int i = 0; i < count; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "%s%02d.npy", prefix.c_str(), i);
        write_map(synth_map(kind, 24, 24, 4, seed_base + i, amplitude), root / name);
    }
}

long total_count(const HistogramSeries & series) {
    long sum = 0;
    for (const auto & b : series.bins) {
        sum += b.count;
    }
    return sum;
}

} // namespace

TEST_CASE("analyzer separates flat from noisy populations") {
    TempDir dir("analyzer_sep");
    write_population(dir.path(), "flat_", SynthKind::constant, 10, 0, 1.0f);
    write_population(dir.path(), "noise_", SynthKind::white_noise, 10, 100, 1.0f);

    const CorpusManifest manifest = scan_corpus(dir.path());
    AnalyzeParams params;
    params.thresholds = {5e-2};
    params.bins = 8;
    params.k = 5;
    const CorpusReport report = analyze_corpus(dir.path(), manifest, params);

    REQUIRE(report.per_map.size() == 20);
    REQUIRE(report.ratio_summary.size() == 1);

    SUBCASE("ratio summary: half at max compression, half untouched") {
        const RatioSummary & summary = report.ratio_summary[0];
        for (const auto & [s, fraction] : summary.factor_fractions) {
            if (s == 1 || s == 3) {
                CHECK(fraction == doctest::Approx(0.5).epsilon(1e-12));
            } else {
                CHECK(fraction == 0.0);
            }
        }
        CHECK(summary.mean_tokens == doctest::Approx((576 + 64) / 2.0).epsilon(1e-12));

        double fraction_sum = 0.0;
        for (const auto & [s, fraction] : summary.factor_fractions) {
            (void) s;
            fraction_sum += fraction;
        }
        CHECK(fraction_sum == doctest::Approx(1.0).epsilon(1e-9));
    }

    SUBCASE("rankings draw from the expected populations") {
        REQUIRE(report.bottom_ids.size() == 5);
        REQUIRE(report.top_ids.size() == 5);
        for (const auto & id : report.bottom_ids) {
            CHECK(id.rfind("flat_", 0) == 0);
        }
        for (const auto & id : report.top_ids) {
            CHECK(id.rfind("noise_", 0) == 0);
        }
        // all flat maps tie at sigma 0 -> bottom ranking is id-ascending
        std::vector<std::string> sorted_bottom = report.bottom_ids;
        std::sort(sorted_bottom.begin(), sorted_bottom.end());
        CHECK(sorted_bottom == report.bottom_ids);
        CHECK(report.bottom_ids[0] == "flat_00");
    }

    SUBCASE("histogram counts sum to the corpus size in every series") {
        REQUIRE(report.histograms.size() == 3 + 1); // fixed s=1,2,3 plus tau=0.05
        for (const auto & series : report.histograms) {
            CHECK(total_count(series) == 20);
        }
    }

    SUBCASE("rankings are consistent with per-map values") {
        std::vector<std::pair<double, std::string>> resorted;
        for (const auto & r : report.per_map) {
            resorted.emplace_back(r.sigma_by_factor[0].second, r.id);
        }
        std::sort(resorted.begin(), resorted.end());
        for (std::size_t i = 0; i < report.bottom_ids.size(); ++i) {
            CHECK(report.bottom_ids[i] == resorted[i].second);
        }
    }
}

TEST_CASE("single-map corpus degenerates cleanly") {
    TempDir dir("analyzer_single");
    write_map(synth_map(SynthKind::gradient, 12, 12, 2, 0, 2.0f), dir.path() / "only.npy");

    const CorpusManifest manifest = scan_corpus(dir.path());
    AnalyzeParams params;
    params.bins = 10;
    const CorpusReport report = analyze_corpus(dir.path(), manifest, params);

    CHECK(report.per_map.size() == 1);
    for (const auto & series : report.histograms) {
        long nonzero = 0;
        for (const auto & b : series.bins) {
            if (b.count > 0) {
                ++nonzero;
            }
        }
        CHECK(nonzero == 1);
        CHECK(total_count(series) == 1);
    }
    // k clamps to the corpus size
    REQUIRE(report.top_ids.size() == 1);
    REQUIRE(report.bottom_ids.size() == 1);
    CHECK(report.top_ids[0] == "only");
    CHECK(report.bottom_ids[0] == "only");
}

TEST_CASE("duplicating one map bumps exactly one bin per series") {
    TempDir dir("analyzer_dup");
    write_population(dir.path(), "m_", SynthKind::white_noise, 8, 40, 1.0f);

    AnalyzeParams params;
    params.bins = 6;
    params.k = 3;
    const CorpusReport before =
        analyze_corpus(dir.path(), scan_corpus(dir.path()), params);

    // duplicate an interior map under a new id: same values, same bin
    write_map(read_map(dir.path() / "m_03.npy"), dir.path() / "m_99.npy");
    const CorpusReport after =
        analyze_corpus(dir.path(), scan_corpus(dir.path()), params);

    REQUIRE(before.histograms.size() == after.histograms.size());
    for (std::size_t h = 0; h < before.histograms.size(); ++h) {
        const auto & old_bins = before.histograms[h].bins;
        const auto & new_bins = after.histograms[h].bins;
        REQUIRE(old_bins.size() == new_bins.size());
        int bumped = 0;
        for (std::size_t i = 0; i < old_bins.size(); ++i) {
            const long delta = new_bins[i].count - old_bins[i].count;
            CHECK(delta >= 0);
            CHECK(delta <= 1);
            bumped += static_cast<int>(delta);
        }
        CHECK(bumped == 1);
    }
}

TEST_CASE("mean tokens per map shrinks as the threshold grows") {
    TempDir dir("analyzer_mono");
    // mixed-amplitude noise spreads the metric values
    for (int i = 0; i < 12; ++i) {
        char name[16];
        std::snprintf(name, sizeof(name), "m_%02d.npy", i);
        write_map(synth_map(SynthKind::white_noise, 12, 12, 2, 7 * i + 1,
                            0.01f + 0.05f * static_cast<float>(i)),
                  dir.path() / name);
    }
    AnalyzeParams params;
    params.thresholds = {1e-3, 1e-2, 5e-2, 2e-1};
    const CorpusReport report = analyze_corpus(dir.path(), scan_corpus(dir.path()), params);
    REQUIRE(report.ratio_summary.size() == 4);
    for (std::size_t i = 1; i < report.ratio_summary.size(); ++i) {
        CHECK(report.ratio_summary[i].mean_tokens <= report.ratio_summary[i - 1].mean_tokens);
    }
}

TEST_CASE("unreadable maps degrade to diagnostics") {
    TempDir dir("analyzer_diag");
    write_population(dir.path(), "ok_", SynthKind::white_noise, 3, 9, 1.0f);
    {
        std::ofstream bad(dir.path() / "broken.npy", std::ios::binary);
        bad << "garbage";
    }
    const CorpusReport report = analyze_corpus(dir.path(), scan_corpus(dir.path()), {});
    CHECK(report.per_map.size() == 3);
    REQUIRE(report.diagnostics.size() == 1);
    CHECK(report.diagnostics[0].path == "broken.npy");
    for (const auto & series : report.histograms) {
        CHECK(total_count(series) == 3);
    }
}

TEST_CASE("empty corpus is fatal") {
    TempDir dir("analyzer_empty");
    CHECK_THROWS_AS(analyze_corpus(dir.path(), scan_corpus(dir.path()), {}), EmptyCorpus);
}

TEST_CASE("parallel and serial analysis agree exactly") {
    TempDir dir("analyzer_par");
    write_population(dir.path(), "m_", SynthKind::white_noise, 16, 3, 1.0f);
    const CorpusManifest manifest = scan_corpus(dir.path());

    AnalyzeParams serial_params;
    serial_params.exec = Exec::serial;
    AnalyzeParams parallel_params;
    parallel_params.exec = Exec::parallel;

    const std::string a = report_to_json(analyze_corpus(dir.path(), manifest, serial_params));
    const std::string b = report_to_json(analyze_corpus(dir.path(), manifest, parallel_params));
    CHECK(a == b);
}

TEST_CASE("report export") {
    TempDir dir("analyzer_export");
    write_population(dir.path(), "m_", SynthKind::white_noise, 4, 21, 1.0f);
    AnalyzeParams params;
    params.bins = 5;
    const CorpusReport report = analyze_corpus(dir.path(), scan_corpus(dir.path()), params);

    SUBCASE("json bytes are deterministic for equal reports") {
        TempDir out("analyzer_json");
        export_report(report, ReportFormat::json, out.path() / "r1.json");
        export_report(report, ReportFormat::json, out.path() / "r2.json");
        const auto b1 = slurp(out.path() / "r1.json");
        CHECK_FALSE(b1.empty());
        CHECK(b1 == slurp(out.path() / "r2.json"));
    }

    SUBCASE("csv: one file per histogram series, bins rows each, plus per-map table") {
        TempDir out("analyzer_csv");
        export_report(report, ReportFormat::csv, out.path());

        std::set<std::string> files;
        for (const auto & e : std::filesystem::directory_iterator(out.path())) {
            files.insert(e.path().filename().string());
        }
        CHECK(files.count("hist_s_1.csv") == 1);
        CHECK(files.count("hist_s_2.csv") == 1);
        CHECK(files.count("hist_s_3.csv") == 1);
        CHECK(files.count("hist_tau_0.05.csv") == 1);
        CHECK(files.count("per_map.csv") == 1);
        CHECK(files.count("ranking_top.csv") == 1);
        CHECK(files.count("ranking_bottom.csv") == 1);

        std::ifstream top(out.path() / "ranking_top.csv");
        std::string header_line;
        std::getline(top, header_line);
        CHECK(header_line == "rank,id,sigma");
        int ranked_rows = 0;
        while (std::getline(top, header_line)) {
            ++ranked_rows;
        }
        CHECK(ranked_rows == 4); // k=10 clamps to the corpus size

        std::ifstream in(out.path() / "hist_s_1.csv");
        std::string line;
        int rows = 0;
        std::getline(in, line);
        CHECK(line == "bin_lo,bin_hi,count");
        while (std::getline(in, line)) {
            ++rows;
        }
        CHECK(rows == params.bins);

        std::ifstream pm(out.path() / "per_map.csv");
        rows = 0;
        while (std::getline(pm, line)) {
            ++rows;
        }
        CHECK(rows == 1 + 4); // header + one row per map
    }
}
