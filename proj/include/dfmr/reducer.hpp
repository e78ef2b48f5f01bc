#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dfmr/feature_map.hpp"
#include "dfmr/metric.hpp"
#include "dfmr/parallel.hpp"

namespace dfmr {

enum class PolicyKind { fixed, random, dynamic };

const char * policy_kind_name(PolicyKind kind);

// Rule producing a compression factor per map. `candidates` is the ascending
// factor list shared by the random and dynamic kinds; its first element is the
// minimum allowed factor and its last the maximum.
struct CompressionPolicy {
    PolicyKind kind = PolicyKind::dynamic;

    int fixed_factor = 1;                       // fixed
    std::uint64_t seed = 0;                     // random
    std::vector<int> candidates = {1, 2, 3};    // random + dynamic
    double threshold = 5e-2;                    // dynamic: tau
    WindowMode mode = WindowMode::coarse;
    ChannelAggregation aggregation = ChannelAggregation::pooled_scalars;

    static CompressionPolicy fixed_at(int factor);
    static CompressionPolicy random_over(std::vector<int> candidates, std::uint64_t seed);
    static CompressionPolicy dynamic_with(double tau, std::vector<int> candidates = {1, 2, 3},
                                          WindowMode mode = WindowMode::coarse,
                                          ChannelAggregation agg = ChannelAggregation::pooled_scalars);

    // Structural checks: candidates nonempty, ascending, all >= 1.
    void validate() const;
};

enum class StopReason { exceeded_threshold, reached_max, fixed, random };

const char * stop_reason_name(StopReason reason);

struct CompressionDecision {
    int chosen_factor = 1;
    // (candidate factor, mean sigma) pairs in evaluation order; nonempty for
    // dynamic policies, empty for fixed/random.
    std::vector<std::pair<int, double>> sigma_trace;
    StopReason stop_reason = StopReason::fixed;
    long long tokens_out = 0; // (H/s) * (W/s)
};

// Picks the compression factor for one map. Dynamic policies walk the
// candidates in ascending order, recomputing the metric at each factor, and
// stop at the first factor whose mean sigma exceeds the threshold (or at the
// last candidate). Divisibility is checked for every candidate up front, so a
// map that cannot take some candidate fails fast. `map_index` seeds the
// counter-based draw of the random kind; order-independent across a corpus.
CompressionDecision select_factor(const FeatureMap & map, const CompressionPolicy & policy,
                                  std::uint64_t map_index = 0, Exec exec = Exec::parallel);

// s x s average pooling: output (H/s, W/s, channels), each output cell the
// mean of its window, channels pooled independently. factor 1 copies bit-exactly.
FeatureMap average_pool(const FeatureMap & map, int factor, Exec exec = Exec::parallel);

struct CompressResult {
    FeatureMap map;
    CompressionDecision decision;
};

CompressResult compress(const FeatureMap & map, const CompressionPolicy & policy,
                        std::uint64_t map_index = 0, Exec exec = Exec::parallel);

// Half-cosine decay from peak_lr to min_lr over total_steps.
struct CosineCurve {
    double peak_lr = 1e-3;
    double min_lr = 0.0;
    long total_steps = 1;
};

double lr_at(const CosineCurve & curve, long step);

// Threshold proportional to the learning rate: tau(step) = base_tau * lr(step)/base_lr.
struct ThresholdSchedule {
    double base_tau = 5e-2;
    double base_lr = 1e-3;
    CosineCurve lr_curve;
};

double tau_at(const ThresholdSchedule & schedule, long step);

} // namespace dfmr
