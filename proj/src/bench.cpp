#include "dfmr/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "dfmr/corpus.hpp"
#include "dfmr/rng.hpp"

namespace dfmr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double percentile(std::vector<double> sorted, double q) {
    const std::size_t idx = static_cast<std::size_t>(q * (sorted.size() - 1));
    return sorted[idx];
}

} // namespace

std::vector<BenchResult> run_bench(const std::vector<BenchCase> & cases, long iterations,
                                   long warmup, std::uint64_t seed) {
    if (iterations < 1) {
        throw InvalidArgument("bench iterations must be >= 1");
    }
    if (warmup < 0) {
        throw InvalidArgument("bench warmup must be >= 0");
    }

    std::vector<BenchResult> results;
    results.reserve(cases.size());

    for (std::size_t ci = 0; ci < cases.size(); ++ci) {
        const BenchCase & config = cases[ci];
        const FeatureMap input = synth_map(SynthKind::white_noise, config.height, config.width,
                                           config.channels, mix64(seed, ci), 1.0f);

        volatile double sink = 0.0; // keep the compressed output alive
        for (long i = 0; i < warmup; ++i) {
            const CompressResult r = compress(input, config.policy, 0, config.exec);
            sink = sink + r.map.values().front();
        }

        std::vector<double> latencies;
        latencies.reserve(static_cast<std::size_t>(iterations));
        const Clock::time_point loop_start = Clock::now();
        for (long i = 0; i < iterations; ++i) {
            const Clock::time_point t0 = Clock::now();
            const CompressResult r = compress(input, config.policy, 0, config.exec);
            latencies.push_back(seconds_since(t0));
            sink = sink + r.map.values().front();
        }
        const double elapsed = seconds_since(loop_start);
        (void) sink;

        std::sort(latencies.begin(), latencies.end());
        BenchResult result;
        result.config = config;
        result.iterations = iterations;
        result.min_s = latencies.front();
        result.median_s = percentile(latencies, 0.5);
        result.p95_s = percentile(latencies, 0.95);
        result.throughput = static_cast<double>(iterations) / elapsed;
        result.bytes_processed =
            static_cast<std::uint64_t>(config.elements()) * sizeof(float) * iterations;
        results.push_back(result);
    }

    std::stable_sort(results.begin(), results.end(), [](const BenchResult & a, const BenchResult & b) {
        if (a.config.elements() != b.config.elements()) {
            return a.config.elements() < b.config.elements();
        }
        return a.config.exec < b.config.exec;
    });
    return results;
}

double run_corpus_bench(const BenchCase & config, int count, std::uint64_t seed, Exec exec) {
    if (count < 1) {
        throw InvalidArgument("corpus bench map count must be >= 1");
    }
    std::vector<FeatureMap> maps;
    maps.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        maps.push_back(synth_map(SynthKind::white_noise, config.height, config.width,
                                 config.channels, mix64(seed, static_cast<std::uint64_t>(i)),
                                 1.0f));
    }

    std::vector<long long> tokens(static_cast<std::size_t>(count), 0);
    const Clock::time_point t0 = Clock::now();
    const bool parallel = exec == Exec::parallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int i = 0; i < count; ++i) {
        const CompressResult r =
            compress(maps[static_cast<std::size_t>(i)], config.policy,
                     static_cast<std::uint64_t>(i), Exec::serial);
        tokens[static_cast<std::size_t>(i)] = r.decision.tokens_out;
    }
    const double elapsed = seconds_since(t0);

    long long checksum = 0;
    for (long long t : tokens) {
        checksum += t;
    }
    if (checksum < count) {
        throw Error("corpus bench produced impossible token counts");
    }
    return static_cast<double>(count) / elapsed;
}

std::vector<BenchCase> ladder_cases(const CompressionPolicy & policy,
                                    const std::vector<Exec> & execs) {
    std::vector<BenchCase> cases;
    for (int side : {6, 12, 24, 48}) {
        for (int channels : {64, 256, 1024}) {
            for (Exec exec : execs) {
                BenchCase c;
                c.height = side;
                c.width = side;
                c.channels = channels;
                c.policy = policy;
                c.exec = exec;
                cases.push_back(c);
            }
        }
    }
    return cases;
}

std::string bench_table(const std::vector<BenchResult> & results) {
    std::string out;
    char line[192];
    std::snprintf(line, sizeof(line), "%-14s %-8s %-8s %10s %12s %12s %12s %14s\n",
                  "case", "policy", "exec", "iters", "min_ms", "median_ms", "p95_ms", "maps_per_s");
    out += line;
    for (const auto & r : results) {
        char name[32];
        std::snprintf(name, sizeof(name), "%dx%dx%d", r.config.height, r.config.width,
                      r.config.channels);
        std::snprintf(line, sizeof(line), "%-14s %-8s %-8s %10ld %12.4f %12.4f %12.4f %14.1f\n",
                      name, policy_kind_name(r.config.policy.kind), exec_name(r.config.exec),
                      r.iterations, r.min_s * 1e3, r.median_s * 1e3, r.p95_s * 1e3,
                      r.throughput);
        out += line;
    }
    return out;
}

} // namespace dfmr
