#include "dfmr/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <set>

#include <json.hpp>

#include "dfmr/npy.hpp"
#include "dfmr/parallel.hpp"
#include "dfmr/rng.hpp"

namespace dfmr::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string iso_timestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

// Semantic config only: execution knobs (threads, timestamp, error format)
// never change outputs and are excluded so serial and parallel runs stay
// byte-identical.
json config_to_json(const ToolConfig & config) {
    json doc = {{"threshold", config.threshold},
                {"candidates", config.candidates},
                {"mode", window_mode_name(config.mode)},
                {"aggregation", channel_aggregation_name(config.aggregation)},
                {"seed", config.seed},
                {"bins", config.bins},
                {"k", config.k},
                {"thresholds", config.thresholds},
                {"flat_side", config.flat_side}};
    if (config.schedule) {
        doc["schedule"] = {{"base_tau", config.schedule->base_tau},
                           {"base_lr", config.schedule->base_lr},
                           {"peak_lr", config.schedule->lr_curve.peak_lr},
                           {"min_lr", config.schedule->lr_curve.min_lr},
                           {"total_steps", config.schedule->lr_curve.total_steps}};
    }
    return doc;
}

void emit_diagnostics(const std::vector<Diagnostic> & diagnostics, bool json_lines) {
    for (const auto & d : diagnostics) {
        if (json_lines) {
            json line = {{"path", d.path}, {"error", d.error}};
            std::cerr << line.dump() << "\n";
        } else {
            std::cerr << "warn: " << d.path << ": " << d.error << "\n";
        }
    }
}

void write_text(const fs::path & path, const std::string & text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoFailure("cannot open for writing: " + path.string());
    }
    out << text;
    if (!out) {
        throw IoFailure("write failed: " + path.string());
    }
}

int report_fatal(const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
}

} // namespace

ToolConfig load_config(const fs::path & path) {
    std::ifstream in(path);
    if (!in) {
        throw IoFailure("cannot open config: " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception & e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }

    static const std::set<std::string> known = {
        "threshold", "candidates", "mode", "aggregation", "seed",
        "bins", "k", "thresholds", "schedule", "threads", "flat_side"};
    for (const auto & [key, value] : doc.items()) {
        (void) value;
        if (!known.count(key)) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }

    ToolConfig config;
    try {
        if (doc.contains("threshold")) config.threshold = doc["threshold"].get<double>();
        if (doc.contains("candidates")) config.candidates = doc["candidates"].get<std::vector<int>>();
        if (doc.contains("mode")) config.mode = parse_window_mode(doc["mode"].get<std::string>());
        if (doc.contains("aggregation")) {
            config.aggregation = parse_channel_aggregation(doc["aggregation"].get<std::string>());
        }
        if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();
        if (doc.contains("bins")) config.bins = doc["bins"].get<int>();
        if (doc.contains("k")) config.k = doc["k"].get<int>();
        if (doc.contains("thresholds")) {
            config.thresholds = doc["thresholds"].get<std::vector<double>>();
        }
        if (doc.contains("threads")) config.threads = doc["threads"].get<int>();
        if (doc.contains("flat_side")) config.flat_side = doc["flat_side"].get<int>();
        if (doc.contains("schedule")) {
            const json & s = doc["schedule"];
            static const std::set<std::string> sched_known = {"base_tau", "base_lr", "peak_lr",
                                                              "min_lr", "total_steps"};
            for (const auto & [key, value] : s.items()) {
                (void) value;
                if (!sched_known.count(key)) {
                    throw ConfigError("unknown schedule key '" + key + "'");
                }
            }
            ThresholdSchedule schedule;
            if (s.contains("base_tau")) schedule.base_tau = s["base_tau"].get<double>();
            if (s.contains("base_lr")) schedule.base_lr = s["base_lr"].get<double>();
            if (s.contains("peak_lr")) schedule.lr_curve.peak_lr = s["peak_lr"].get<double>();
            if (s.contains("min_lr")) schedule.lr_curve.min_lr = s["min_lr"].get<double>();
            if (s.contains("total_steps")) {
                schedule.lr_curve.total_steps = s["total_steps"].get<long>();
            }
            config.schedule = schedule;
        }
    } catch (const json::exception & e) {
        throw ConfigError(std::string("config value error: ") + e.what());
    }

    validate_config(config);
    return config;
}

void validate_config(const ToolConfig & config) {
    if (config.threshold < 0.0) {
        throw ConfigError("threshold must be >= 0");
    }
    if (config.candidates.empty()) {
        throw ConfigError("candidates must not be empty");
    }
    for (std::size_t i = 0; i < config.candidates.size(); ++i) {
        if (config.candidates[i] < 1) {
            throw ConfigError("candidates must all be >= 1");
        }
        if (i > 0 && config.candidates[i] <= config.candidates[i - 1]) {
            throw ConfigError("candidates must be strictly ascending");
        }
    }
    if (config.bins < 1) {
        throw ConfigError("bins must be >= 1");
    }
    if (config.k < 1) {
        throw ConfigError("k must be >= 1");
    }
    for (double tau : config.thresholds) {
        if (tau < 0.0) {
            throw ConfigError("analysis thresholds must all be >= 0");
        }
    }
    if (config.flat_side < 0) {
        throw ConfigError("flat_side must be >= 0");
    }
    if (config.schedule) {
        if (config.schedule->base_lr <= 0.0) {
            throw ConfigError("schedule base_lr must be > 0");
        }
        if (config.schedule->lr_curve.total_steps < 1) {
            throw ConfigError("schedule total_steps must be >= 1");
        }
    }
}

CompressionPolicy parse_policy(const std::string & spec, const ToolConfig & config) {
    if (spec == "dynamic") {
        return CompressionPolicy::dynamic_with(config.threshold, config.candidates, config.mode,
                                               config.aggregation);
    }
    if (spec == "random") {
        return CompressionPolicy::random_over(config.candidates, config.seed);
    }
    if (spec.rfind("fixed:", 0) == 0) {
        int factor = 0;
        try {
            factor = std::stoi(spec.substr(6));
        } catch (const std::exception &) {
            throw InvalidArgument("bad fixed policy '" + spec + "' (expected fixed:<s>)");
        }
        return CompressionPolicy::fixed_at(factor);
    }
    throw InvalidArgument("unknown policy '" + spec + "' (expected dynamic|random|fixed:<s>)");
}

int cmd_compress(const CompressOptions & options) {
    try {
        ToolConfig config = options.config;
        validate_config(config);
        set_threads(config.threads);
        if (options.schedule_step) {
            if (!config.schedule) {
                throw ConfigError("--step needs schedule parameters in the config");
            }
            config.threshold = tau_at(*config.schedule, *options.schedule_step);
        }
        const CompressionPolicy policy = parse_policy(options.policy, config);
        const ReadOptions read_options{config.flat_side};

        const CorpusManifest manifest = scan_corpus(options.in_root, read_options);

        std::error_code ec;
        fs::create_directories(options.out_root, ec);
        if (!fs::is_directory(options.out_root)) {
            throw IoFailure("cannot create output root: " + options.out_root.string());
        }
        // pre-create subdirectories so the parallel loop never races on mkdir
        for (const auto & entry : manifest.entries) {
            const fs::path parent = (options.out_root / entry.path).parent_path();
            fs::create_directories(parent, ec);
        }

        const std::size_t n = manifest.entries.size();
        std::vector<json> decisions(n);
        std::vector<std::optional<Diagnostic>> failures(n);

#pragma omp parallel for schedule(dynamic)
        for (long long ii = 0; ii < static_cast<long long>(n); ++ii) {
            const std::size_t i = static_cast<std::size_t>(ii);
            const ManifestEntry & entry = manifest.entries[i];
            try {
                const FeatureMap map = read_map(options.in_root / entry.path, read_options);
                const CompressResult result = compress(map, policy, i, Exec::serial);
                write_map(result.map, options.out_root / entry.path);

                json trace = json::array();
                for (const auto & [s, sigma] : result.decision.sigma_trace) {
                    trace.push_back({s, sigma});
                }
                decisions[i] = {{"factor", result.decision.chosen_factor},
                                {"trace", trace},
                                {"tokens_out", result.decision.tokens_out},
                                {"stop_reason", stop_reason_name(result.decision.stop_reason)}};
            } catch (const Error & e) {
                failures[i] = Diagnostic{entry.path, e.what()};
            }
        }

        json decision_map = json::object();
        std::vector<Diagnostic> diagnostics = manifest.diagnostics;
        for (std::size_t i = 0; i < n; ++i) {
            if (failures[i]) {
                diagnostics.push_back(*failures[i]);
            } else {
                decision_map[manifest.entries[i].id] = decisions[i];
            }
        }
        std::sort(diagnostics.begin(), diagnostics.end(),
                  [](const Diagnostic & a, const Diagnostic & b) { return a.path < b.path; });

        json diag_json = json::array();
        for (const auto & d : diagnostics) {
            diag_json.push_back({{"path", d.path}, {"error", d.error}});
        }
        json doc = {{"config", config_to_json(config)},
                    {"policy", options.policy},
                    {"decisions", decision_map},
                    {"diagnostics", diag_json}};
        if (config.timestamp) {
            doc["generated_at"] = iso_timestamp();
        }
        write_text(options.out_root / "decisions.json", doc.dump(2) + "\n");

        emit_diagnostics(diagnostics, config.json_errors);
        return diagnostics.empty() ? 0 : 2;
    } catch (const std::exception & e) {
        return report_fatal(e);
    }
}

int cmd_analyze(const AnalyzeOptions & options) {
    try {
        validate_config(options.config);
        set_threads(options.config.threads);

        AnalyzeParams params;
        params.candidates = options.config.candidates;
        params.thresholds = options.config.thresholds;
        params.bins = options.config.bins;
        params.k = options.config.k;
        params.mode = options.config.mode;
        params.aggregation = options.config.aggregation;
        params.read_options.flat_side = options.config.flat_side;

        const CorpusManifest manifest =
            scan_corpus(options.in_root, params.read_options);
        const CorpusReport report = analyze_corpus(options.in_root, manifest, params);

        std::error_code ec;
        fs::create_directories(options.out_dir, ec);
        if (!fs::is_directory(options.out_dir)) {
            throw IoFailure("cannot create report directory: " + options.out_dir.string());
        }

        json doc = json::parse(report_to_json(report));
        doc["config"] = config_to_json(options.config);
        if (options.config.timestamp) {
            doc["generated_at"] = iso_timestamp();
        }
        write_text(options.out_dir / "report.json", doc.dump(2) + "\n");
        export_report(report, ReportFormat::csv, options.out_dir);

        emit_diagnostics(report.diagnostics, options.config.json_errors);
        return report.diagnostics.empty() ? 0 : 2;
    } catch (const std::exception & e) {
        return report_fatal(e);
    }
}

int cmd_budget(const BudgetOptions & options) {
    try {
        BudgetOptions opt = options;
        if (opt.spec_file) {
            std::ifstream in(*opt.spec_file);
            if (!in) {
                throw IoFailure("cannot open spec: " + opt.spec_file->string());
            }
            json doc;
            try {
                doc = json::parse(in);
            } catch (const json::exception & e) {
                throw ConfigError(std::string("spec parse error: ") + e.what());
            }
            try {
                if (doc.contains("images")) {
                    opt.grids.clear();
                    for (const auto & g : doc["images"]) {
                        opt.grids.push_back(
                            GridSize{g.at("height").get<int>(), g.at("width").get<int>()});
                    }
                }
                if (doc.contains("grid")) {
                    opt.grids = {GridSize{doc["grid"].at("height").get<int>(),
                                          doc["grid"].at("width").get<int>()}};
                }
                if (doc.contains("frames")) opt.frames = doc["frames"].get<int>();
                if (doc.contains("factors")) opt.factors = doc["factors"].get<std::vector<int>>();
                if (doc.contains("text_tokens")) opt.text_tokens = doc["text_tokens"].get<long long>();
                if (doc.contains("context_limit")) {
                    opt.context_limit = doc["context_limit"].get<long long>();
                }
                if (doc.contains("per_image_overhead")) {
                    opt.per_image_overhead = doc["per_image_overhead"].get<long long>();
                }
            } catch (const json::exception & e) {
                throw ConfigError(std::string("spec value error: ") + e.what());
            }
        }
        if (opt.factors.empty() && (!opt.grids.empty() || opt.query_max_images)) {
            opt.factors.push_back(1);
        }

        json result;
        std::string human;
        if (opt.query_max_images) {
            if (opt.grids.empty()) {
                throw InvalidArgument("--max-images needs a grid");
            }
            const long long capacity =
                max_images(opt.grids.front(), opt.factors.front(), opt.text_tokens,
                           opt.context_limit, opt.per_image_overhead);
            result = {{"max_images", capacity},
                      {"factor", opt.factors.front()},
                      {"text_tokens", opt.text_tokens},
                      {"context_limit", opt.context_limit}};
            human = std::to_string(capacity);
        } else {
            std::vector<GridSize> grids = opt.grids;
            std::vector<int> factors = opt.factors;
            if (opt.frames > 0) {
                if (grids.empty()) {
                    throw InvalidArgument("video mode needs a grid");
                }
                grids.assign(static_cast<std::size_t>(opt.frames), opt.grids.front());
            }
            if (factors.size() == 1 && grids.size() > 1) {
                factors.assign(grids.size(), factors.front());
            }
            PromptSpec spec;
            spec.image_grids = grids;
            spec.text_tokens = opt.text_tokens;
            spec.context_limit = opt.context_limit;
            spec.per_image_overhead = opt.per_image_overhead;
            const long long total = sequence_length(spec, factors);
            const bool fits = total <= opt.context_limit;
            const long long overflow = fits ? 0 : total - opt.context_limit;
            result = {{"total", total},
                      {"fits", fits},
                      {"overflow", overflow},
                      {"images", grids.size()},
                      {"text_tokens", opt.text_tokens},
                      {"context_limit", opt.context_limit}};
            human = "total " + std::to_string(total) + " / limit " +
                    std::to_string(opt.context_limit) + (fits ? " -> fits" : " -> overflow by " +
                    std::to_string(overflow));
        }

        std::cout << human << "\n";
        if (opt.out_path) {
            result["config"] = config_to_json(opt.config);
            if (opt.config.timestamp) {
                result["generated_at"] = iso_timestamp();
            }
            write_text(*opt.out_path, result.dump(2) + "\n");
        }
        return 0;
    } catch (const std::exception & e) {
        return report_fatal(e);
    }
}

int cmd_bench(const BenchOptions & options) {
    try {
        validate_config(options.config);
        set_threads(options.config.threads);

        const CompressionPolicy policy = CompressionPolicy::dynamic_with(
            options.config.threshold, options.config.candidates, options.config.mode,
            options.config.aggregation);

        std::vector<BenchCase> cases = options.cases;
        if (cases.empty()) {
            const std::vector<Exec> execs = options.compare_exec
                                                ? std::vector<Exec>{Exec::serial, Exec::parallel}
                                                : std::vector<Exec>{Exec::serial};
            cases = ladder_cases(policy, execs);
        }

        const std::vector<BenchResult> results =
            run_bench(cases, options.iterations, options.warmup, options.config.seed);
        std::cout << bench_table(results);

        json rows = json::array();
        for (const auto & r : results) {
            rows.push_back({{"height", r.config.height},
                            {"width", r.config.width},
                            {"channels", r.config.channels},
                            {"policy", policy_kind_name(r.config.policy.kind)},
                            {"exec", exec_name(r.config.exec)},
                            {"iterations", r.iterations},
                            {"min_s", r.min_s},
                            {"median_s", r.median_s},
                            {"p95_s", r.p95_s},
                            {"throughput", r.throughput},
                            {"bytes_processed", r.bytes_processed}});
        }
        json doc = {{"config", config_to_json(options.config)}, {"results", rows}};

        if (options.corpus_count > 0) {
            BenchCase corpus_case;
            corpus_case.policy = policy;
            const double serial_rate =
                run_corpus_bench(corpus_case, options.corpus_count, options.config.seed, Exec::serial);
            const double parallel_rate = run_corpus_bench(corpus_case, options.corpus_count,
                                                          options.config.seed, Exec::parallel);
            std::printf("corpus (%d maps 24x24x1024): serial %.1f maps/s, parallel %.1f maps/s\n",
                        options.corpus_count, serial_rate, parallel_rate);
            doc["corpus"] = {{"count", options.corpus_count},
                             {"serial_maps_per_s", serial_rate},
                             {"parallel_maps_per_s", parallel_rate}};
        }

        if (options.out_path) {
            if (options.config.timestamp) {
                doc["generated_at"] = iso_timestamp();
            }
            write_text(*options.out_path, doc.dump(2) + "\n");
        }
        return 0;
    } catch (const std::exception & e) {
        return report_fatal(e);
    }
}

int cmd_synth(const SynthOptions & options) {
    try {
        validate_config(options.config);
        if (options.count < 0) {
            throw InvalidArgument("count must be >= 0");
        }

        std::error_code ec;
        fs::create_directories(options.out_root, ec);
        if (!fs::is_directory(options.out_root)) {
            throw IoFailure("cannot create output root: " + options.out_root.string());
        }

        for (int i = 0; i < options.count; ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "map_%05d.npy", i);
            const FeatureMap map =
                synth_map(options.kind, options.height, options.width, options.channels,
                          mix64(options.config.seed, static_cast<std::uint64_t>(i)),
                          options.amplitude);
            write_map(map, options.out_root / name);
        }

        const CorpusManifest manifest = scan_corpus(options.out_root);
        json doc = json::parse(manifest_to_json(manifest));
        doc["config"] = config_to_json(options.config);
        doc["kind"] = synth_kind_name(options.kind);
        if (options.config.timestamp) {
            doc["generated_at"] = iso_timestamp();
        }
        write_text(options.out_root / "manifest.json", doc.dump(2) + "\n");
        return 0;
    } catch (const std::exception & e) {
        return report_fatal(e);
    }
}

} // namespace dfmr::cli
