#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dfmr/cli.hpp"

namespace {

using dfmr::cli::ToolConfig;

std::vector<int> parse_int_list(const std::string & text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        out.push_back(std::stoi(tok));
    }
    return out;
}

std::vector<double> parse_double_list(const std::string & text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        out.push_back(std::stod(tok));
    }
    return out;
}

dfmr::GridSize parse_grid(const std::string & text) {
    const auto x = text.find('x');
    if (x == std::string::npos) {
        throw CLI::ValidationError("--grid expects HxW, e.g. 24x24");
    }
    return dfmr::GridSize{std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
}

// Shared flag bundle; config-file values fill anything the command line left
// untouched, built-in defaults fill the rest.
struct CommonFlags {
    std::string config_file;
    double threshold = 5e-2;
    std::string candidates;
    std::string mode;
    std::string aggregation;
    std::uint64_t seed = 0;
    int bins = 50;
    int k = 10;
    std::string thresholds;
    int threads = 0;
    int flat_side = 0;
    bool no_timestamp = false;
    bool json_errors = false;

    void attach(CLI::App * app) {
        app->add_option("--config", config_file, "JSON config file");
        app->add_option("--tau,--threshold", threshold, "selection threshold");
        app->add_option("--candidates", candidates, "ascending factor list, e.g. 1,2,3");
        app->add_option("--mode", mode, "metric window mode: coarse|pool");
        app->add_option("--agg", aggregation,
                        "channel aggregation: pooled-scalars|per-channel-mean");
        app->add_option("--seed", seed, "seed for random draws and synthetic data");
        app->add_option("--bins", bins, "histogram bin count");
        app->add_option("--k", k, "ranking depth");
        app->add_option("--thresholds", thresholds, "analysis threshold list, e.g. 0.05,0.07");
        app->add_option("--threads", threads, "worker threads (0 = library default)");
        app->add_option("--flat-side", flat_side,
                        "fold rank-2 (N,D) files into side x side grids");
        app->add_flag("--no-timestamp", no_timestamp, "omit timestamps from artifacts");
        app->add_flag("--json-errors", json_errors, "emit diagnostics as JSON lines");
    }

    ToolConfig resolve(const CLI::App * app) const {
        ToolConfig config;
        if (!config_file.empty()) {
            config = dfmr::cli::load_config(config_file);
        }
        if (app->count("--tau") > 0) config.threshold = threshold;
        if (app->count("--candidates") > 0) config.candidates = parse_int_list(candidates);
        if (app->count("--mode") > 0) config.mode = dfmr::parse_window_mode(mode);
        if (app->count("--agg") > 0) {
            config.aggregation = dfmr::parse_channel_aggregation(aggregation);
        }
        if (app->count("--seed") > 0) config.seed = seed;
        if (app->count("--bins") > 0) config.bins = bins;
        if (app->count("--k") > 0) config.k = k;
        if (app->count("--thresholds") > 0) config.thresholds = parse_double_list(thresholds);
        if (app->count("--threads") > 0) config.threads = threads;
        if (app->count("--flat-side") > 0) config.flat_side = flat_side;
        if (no_timestamp) config.timestamp = false;
        if (json_errors) config.json_errors = true;
        dfmr::cli::validate_config(config);
        return config;
    }
};

} // namespace

int main(int argc, char ** argv) {
    CLI::App app{"feature-map reduction toolkit"};
    app.require_subcommand(1);
    int exit_code = 0;

    // compress
    auto * compress = app.add_subcommand("compress", "compress a corpus of feature maps");
    CommonFlags compress_flags;
    std::string compress_in, compress_out, compress_policy = "dynamic";
    long compress_step = 0;
    compress->add_option("in_root", compress_in, "input corpus root")->required();
    compress->add_option("out_root", compress_out, "output root")->required();
    compress->add_option("--policy", compress_policy, "dynamic|random|fixed:<s>");
    compress->add_option("--step", compress_step,
                         "derive the threshold from the configured schedule at this step");
    compress_flags.attach(compress);
    compress->callback([&] {
        dfmr::cli::CompressOptions options;
        options.in_root = compress_in;
        options.out_root = compress_out;
        options.policy = compress_policy;
        if (compress->count("--step") > 0) {
            options.schedule_step = compress_step;
        }
        options.config = compress_flags.resolve(compress);
        exit_code = dfmr::cli::cmd_compress(options);
    });

    // analyze
    auto * analyze = app.add_subcommand("analyze", "corpus metric distributions and rankings");
    CommonFlags analyze_flags;
    std::string analyze_in, analyze_out = "report";
    analyze->add_option("in_root", analyze_in, "input corpus root")->required();
    analyze->add_option("--out", analyze_out, "report output directory");
    analyze_flags.attach(analyze);
    analyze->callback([&] {
        dfmr::cli::AnalyzeOptions options;
        options.in_root = analyze_in;
        options.out_dir = analyze_out;
        options.config = analyze_flags.resolve(analyze);
        exit_code = dfmr::cli::cmd_analyze(options);
    });

    // budget
    auto * budget = app.add_subcommand("budget", "token budget arithmetic");
    CommonFlags budget_flags;
    std::vector<std::string> budget_grids;
    std::string budget_factors;
    int budget_frames = 0;
    long long budget_text = 0, budget_limit = 4096, budget_overhead = 0;
    bool budget_max_images = false;
    std::string budget_spec, budget_out;
    budget->add_option("--grid", budget_grids, "image grid HxW (repeatable)");
    budget->add_option("--factor,-s", budget_factors, "compression factor list, e.g. 1,2,3");
    budget->add_option("--frames", budget_frames, "video mode: frame count over the first grid");
    budget->add_option("--text", budget_text, "text token count");
    budget->add_option("--limit", budget_limit, "context limit");
    budget->add_option("--overhead", budget_overhead, "extra tokens per image");
    budget->add_flag("--max-images", budget_max_images, "print how many images fit");
    budget->add_option("--spec", budget_spec, "JSON prompt spec file");
    budget->add_option("--out", budget_out, "write the report as JSON");
    budget_flags.attach(budget);
    budget->callback([&] {
        dfmr::cli::BudgetOptions options;
        for (const auto & g : budget_grids) {
            options.grids.push_back(parse_grid(g));
        }
        if (budget->count("--factor") > 0) {
            options.factors = parse_int_list(budget_factors);
        }
        options.frames = budget_frames;
        options.text_tokens = budget_text;
        options.context_limit = budget_limit;
        options.per_image_overhead = budget_overhead;
        options.query_max_images = budget_max_images;
        if (!budget_spec.empty()) options.spec_file = budget_spec;
        if (!budget_out.empty()) options.out_path = budget_out;
        options.config = budget_flags.resolve(budget);
        exit_code = dfmr::cli::cmd_budget(options);
    });

    // bench
    auto * bench = app.add_subcommand("bench", "kernel cost over a size ladder");
    CommonFlags bench_flags;
    long bench_iterations = 50, bench_warmup = 10;
    bool bench_serial_only = false;
    int bench_corpus = 0;
    std::string bench_out;
    std::vector<std::string> bench_cases;
    bench->add_option("--iterations", bench_iterations, "measured runs per case");
    bench->add_option("--warmup", bench_warmup, "unmeasured runs per case");
    bench->add_flag("--serial-only", bench_serial_only, "skip the parallel kernel rows");
    bench->add_option("--corpus", bench_corpus, "also measure corpus throughput over N maps");
    bench->add_option("--case", bench_cases, "explicit case HxWxC (repeatable)");
    bench->add_option("--out", bench_out, "write results as JSON");
    bench_flags.attach(bench);
    bench->callback([&] {
        dfmr::cli::BenchOptions options;
        options.iterations = bench_iterations;
        options.warmup = bench_warmup;
        options.compare_exec = !bench_serial_only;
        options.corpus_count = bench_corpus;
        if (!bench_out.empty()) options.out_path = bench_out;
        options.config = bench_flags.resolve(bench);
        const dfmr::CompressionPolicy policy = dfmr::CompressionPolicy::dynamic_with(
            options.config.threshold, options.config.candidates, options.config.mode,
            options.config.aggregation);
        for (const auto & text : bench_cases) {
            const auto x1 = text.find('x');
            const auto x2 = text.find('x', x1 + 1);
            if (x1 == std::string::npos || x2 == std::string::npos) {
                throw CLI::ValidationError("--case expects HxWxC, e.g. 24x24x1024");
            }
            dfmr::BenchCase c;
            c.height = std::stoi(text.substr(0, x1));
            c.width = std::stoi(text.substr(x1 + 1, x2 - x1 - 1));
            c.channels = std::stoi(text.substr(x2 + 1));
            c.policy = policy;
            for (dfmr::Exec exec : options.compare_exec
                                       ? std::vector<dfmr::Exec>{dfmr::Exec::serial,
                                                                 dfmr::Exec::parallel}
                                       : std::vector<dfmr::Exec>{dfmr::Exec::serial}) {
                c.exec = exec;
                options.cases.push_back(c);
            }
        }
        exit_code = dfmr::cli::cmd_bench(options);
    });

    // synth
    auto * synth = app.add_subcommand("synth", "generate a synthetic corpus");
    CommonFlags synth_flags;
    std::string synth_kind = "white-noise", synth_out;
    int synth_height = 24, synth_width = 24, synth_channels = 4, synth_count = 1;
    float synth_amplitude = 1.0f;
    synth->add_option("out_root", synth_out, "output corpus root")->required();
    synth->add_option("--kind", synth_kind, "constant|checkerboard|white-noise|gradient");
    synth->add_option("--height", synth_height, "grid rows");
    synth->add_option("--width", synth_width, "grid cols");
    synth->add_option("--channels", synth_channels, "embedding channels");
    synth->add_option("--count", synth_count, "number of maps");
    synth->add_option("--amplitude", synth_amplitude, "value scale");
    synth_flags.attach(synth);
    synth->callback([&] {
        dfmr::cli::SynthOptions options;
        options.out_root = synth_out;
        options.kind = dfmr::parse_synth_kind(synth_kind);
        options.height = synth_height;
        options.width = synth_width;
        options.channels = synth_channels;
        options.count = synth_count;
        options.amplitude = synth_amplitude;
        options.config = synth_flags.resolve(synth);
        exit_code = dfmr::cli::cmd_synth(options);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError & e) {
        return app.exit(e);
    } catch (const std::exception & e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return exit_code;
}
