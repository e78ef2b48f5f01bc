#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dfmr/analyzer.hpp"
#include "dfmr/bench.hpp"
#include "dfmr/budget.hpp"
#include "dfmr/corpus.hpp"
#include "dfmr/reducer.hpp"

namespace dfmr::cli {

// Tool-wide knobs. Precedence: command-line flag > config file > these defaults.
struct ToolConfig {
    double threshold = 5e-2;
    std::vector<int> candidates = {1, 2, 3};
    WindowMode mode = WindowMode::coarse;
    ChannelAggregation aggregation = ChannelAggregation::pooled_scalars;
    std::uint64_t seed = 0;
    int bins = 50;
    int k = 10;
    std::vector<double> thresholds = {5e-2, 7e-2, 9e-2};
    std::optional<ThresholdSchedule> schedule;
    int threads = 0;    // 0 = library default
    int flat_side = 0;  // accept (N, D) files folded to side x side when > 0
    bool timestamp = true;
    bool json_errors = false;
};

// Parses a JSON config file; unknown keys are rejected.
ToolConfig load_config(const std::filesystem::path & path);

// Validates against downstream preconditions (tau >= 0, ascending candidates, ...).
void validate_config(const ToolConfig & config);

// "fixed:<s>" | "random" | "dynamic"
CompressionPolicy parse_policy(const std::string & spec, const ToolConfig & config);

struct CompressOptions {
    std::filesystem::path in_root;
    std::filesystem::path out_root;
    std::string policy = "dynamic";
    // With a schedule in the config, evaluates the threshold at this step
    // instead of using the static value.
    std::optional<long> schedule_step;
    ToolConfig config;
};

// Compresses every map under in_root into out_root (mirroring the tree) and
// writes decisions.json. Exit 0 = full success, 2 = partial (diagnostics
// emitted), 1 = fatal.
int cmd_compress(const CompressOptions & options);

struct AnalyzeOptions {
    std::filesystem::path in_root;
    std::filesystem::path out_dir;
    ToolConfig config;
};

// Writes report.json plus per-series histogram CSVs and a per-map table.
int cmd_analyze(const AnalyzeOptions & options);

struct BudgetOptions {
    std::vector<GridSize> grids;     // one per image; or replicated by `frames`
    std::vector<int> factors;        // aligned with grids (or single value replicated)
    int frames = 0;                  // > 0 switches to video mode over grids[0]
    long long text_tokens = 0;
    long long context_limit = 4096;
    long long per_image_overhead = 0;
    bool query_max_images = false;   // print capacity instead of feasibility
    std::optional<std::filesystem::path> spec_file; // JSON prompt spec
    std::optional<std::filesystem::path> out_path;
    ToolConfig config;
};

int cmd_budget(const BudgetOptions & options);

struct BenchOptions {
    std::vector<BenchCase> cases;    // empty = built-in ladder
    long iterations = 50;
    long warmup = 10;
    bool compare_exec = true;        // run serial and parallel rows
    int corpus_count = 0;            // > 0 adds the corpus-throughput mode
    std::optional<std::filesystem::path> out_path;
    ToolConfig config;
};

int cmd_bench(const BenchOptions & options);

struct SynthOptions {
    std::filesystem::path out_root;
    SynthKind kind = SynthKind::white_noise;
    int height = 24;
    int width = 24;
    int channels = 4;
    int count = 1;
    float amplitude = 1.0f;
    ToolConfig config;
};

// Writes a deterministic synthetic corpus plus its manifest.
int cmd_synth(const SynthOptions & options);

} // namespace dfmr::cli
