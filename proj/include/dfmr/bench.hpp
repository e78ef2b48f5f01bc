#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dfmr/parallel.hpp"
#include "dfmr/reducer.hpp"

namespace dfmr {

struct BenchCase {
    int height = 24;
    int width = 24;
    int channels = 1024;
    CompressionPolicy policy = CompressionPolicy::dynamic_with(5e-2);
    Exec exec = Exec::serial; // kernel path under test

    long long elements() const {
        return static_cast<long long>(height) * width * channels;
    }
};

struct BenchResult {
    BenchCase config;
    long iterations = 0;
    double min_s = 0.0;    // per-map latency, seconds
    double median_s = 0.0;
    double p95_s = 0.0;
    double throughput = 0.0; // maps per second over the measured loop
    std::uint64_t bytes_processed = 0;
};

// Measures the full per-map pipeline (metric + selection + pooling) on a
// seeded white-noise input. Input generation is deterministic; timing is
// wall-clock after `warmup` unmeasured runs. Results are sorted by element
// count, then exec path.
std::vector<BenchResult> run_bench(const std::vector<BenchCase> & cases, long iterations,
                                   long warmup, std::uint64_t seed);

// Aggregate maps/second compressing `count` independent maps, either one at a
// time or with an OpenMP loop across maps.
double run_corpus_bench(const BenchCase & config, int count, std::uint64_t seed, Exec exec);

// Default size ladder covering grid sides {6,12,24,48} x channels {64,256,1024},
// each in the requested exec modes.
std::vector<BenchCase> ladder_cases(const CompressionPolicy & policy,
                                    const std::vector<Exec> & execs);

std::string bench_table(const std::vector<BenchResult> & results);

} // namespace dfmr
