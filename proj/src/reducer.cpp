#include "dfmr/reducer.hpp"

#include <cmath>
#include <cstring>

#include "dfmr/rng.hpp"

namespace dfmr {

const char * policy_kind_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::fixed:  return "fixed";
        case PolicyKind::random: return "random";
        default:                 return "dynamic";
    }
}

const char * stop_reason_name(StopReason reason) {
    switch (reason) {
        case StopReason::exceeded_threshold: return "exceeded-threshold";
        case StopReason::reached_max:        return "reached-max";
        case StopReason::fixed:              return "fixed";
        default:                             return "random";
    }
}

CompressionPolicy CompressionPolicy::fixed_at(int factor) {
    CompressionPolicy p;
    p.kind = PolicyKind::fixed;
    p.fixed_factor = factor;
    return p;
}

CompressionPolicy CompressionPolicy::random_over(std::vector<int> candidates, std::uint64_t seed) {
    CompressionPolicy p;
    p.kind = PolicyKind::random;
    p.candidates = std::move(candidates);
    p.seed = seed;
    p.validate();
    return p;
}

CompressionPolicy CompressionPolicy::dynamic_with(double tau, std::vector<int> candidates,
                                                  WindowMode mode, ChannelAggregation agg) {
    CompressionPolicy p;
    p.kind = PolicyKind::dynamic;
    p.threshold = tau;
    p.candidates = std::move(candidates);
    p.mode = mode;
    p.aggregation = agg;
    p.validate();
    return p;
}

void CompressionPolicy::validate() const {
    if (kind == PolicyKind::fixed) {
        if (fixed_factor < 1) {
            throw InvalidArgument("fixed factor must be >= 1");
        }
        return;
    }
    if (candidates.empty()) {
        throw InvalidArgument("candidate factor list must not be empty");
    }
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (candidates[i] < 1) {
            throw InvalidArgument("candidate factors must all be >= 1");
        }
        if (i > 0 && candidates[i] <= candidates[i - 1]) {
            throw InvalidArgument("candidate factors must be strictly ascending");
        }
    }
}

namespace {

long long tokens_at(const FeatureMap & map, int factor) {
    return static_cast<long long>(map.height() / factor) * (map.width() / factor);
}

void check_divisible(const FeatureMap & map, int factor) {
    if (map.height() % factor != 0) {
        throw IndivisibleGrid("height", map.height(), factor);
    }
    if (map.width() % factor != 0) {
        throw IndivisibleGrid("width", map.width(), factor);
    }
}

} // namespace

CompressionDecision select_factor(const FeatureMap & map, const CompressionPolicy & policy,
                                  std::uint64_t map_index, Exec exec) {
    policy.validate();
    CompressionDecision decision;

    if (policy.kind == PolicyKind::fixed) {
        check_divisible(map, policy.fixed_factor);
        decision.chosen_factor = policy.fixed_factor;
        decision.stop_reason = StopReason::fixed;
        decision.tokens_out = tokens_at(map, policy.fixed_factor);
        return decision;
    }

    // fail fast on any candidate the grid cannot take
    for (int s : policy.candidates) {
        check_divisible(map, s);
    }

    if (policy.kind == PolicyKind::random) {
        const std::uint64_t draw = mix64(policy.seed, map_index);
        decision.chosen_factor = policy.candidates[draw % policy.candidates.size()];
        decision.stop_reason = StopReason::random;
        decision.tokens_out = tokens_at(map, decision.chosen_factor);
        return decision;
    }

    decision.stop_reason = StopReason::reached_max;
    for (std::size_t i = 0; i < policy.candidates.size(); ++i) {
        const int s = policy.candidates[i];
        const MetricReport report = mean_sigma(map, s, policy.mode, policy.aggregation, exec);
        decision.sigma_trace.emplace_back(s, report.mean_sigma);
        decision.chosen_factor = s;
        if (report.mean_sigma > policy.threshold) {
            decision.stop_reason = StopReason::exceeded_threshold;
            break;
        }
    }
    decision.tokens_out = tokens_at(map, decision.chosen_factor);
    return decision;
}

FeatureMap average_pool(const FeatureMap & map, int factor, Exec exec) {
    if (factor < 1) {
        throw InvalidArgument("pooling factor must be >= 1");
    }
    check_divisible(map, factor);

    if (factor == 1) {
        return FeatureMap(map.height(), map.width(), map.channels(),
                          std::vector<float>(map.values().begin(), map.values().end()));
    }

    const int out_h = map.height() / factor;
    const int out_w = map.width() / factor;
    const int channels = map.channels();
    std::vector<float> out(static_cast<std::size_t>(out_h) * out_w * channels);
    const double inv = 1.0 / (static_cast<double>(factor) * factor);
    const float * in = map.values().data();

    auto pool_cell = [&](int i, int j) {
        float * dst = out.data() + (static_cast<std::size_t>(i) * out_w + j) * channels;
        for (int ch = 0; ch < channels; ++ch) {
            double acc = 0.0;
            for (int u = 0; u < factor; ++u) {
                const std::size_t row_base =
                    (static_cast<std::size_t>(factor * i + u) * map.width() + factor * j) * channels;
                for (int v = 0; v < factor; ++v) {
                    acc += in[row_base + static_cast<std::size_t>(v) * channels + ch];
                }
            }
            dst[ch] = static_cast<float>(acc * inv);
        }
    };

    if (exec == Exec::parallel) {
#pragma omp parallel for collapse(2) schedule(static)
        for (int i = 0; i < out_h; ++i) {
            for (int j = 0; j < out_w; ++j) {
                pool_cell(i, j);
            }
        }
    } else {
        for (int i = 0; i < out_h; ++i) {
            for (int j = 0; j < out_w; ++j) {
                pool_cell(i, j);
            }
        }
    }

    return FeatureMap(out_h, out_w, channels, std::move(out));
}

CompressResult compress(const FeatureMap & map, const CompressionPolicy & policy,
                        std::uint64_t map_index, Exec exec) {
    CompressionDecision decision = select_factor(map, policy, map_index, exec);
    FeatureMap pooled = average_pool(map, decision.chosen_factor, exec);
    return CompressResult{std::move(pooled), std::move(decision)};
}

double lr_at(const CosineCurve & curve, long step) {
    if (curve.total_steps < 1) {
        throw InvalidArgument("schedule must span at least one step");
    }
    if (step < 0 || step > curve.total_steps) {
        throw StepOutOfRange(step, curve.total_steps);
    }
    constexpr double pi = 3.14159265358979323846;
    const double phase = static_cast<double>(step) / static_cast<double>(curve.total_steps);
    return curve.min_lr + 0.5 * (curve.peak_lr - curve.min_lr) * (1.0 + std::cos(phase * pi));
}

double tau_at(const ThresholdSchedule & schedule, long step) {
    if (schedule.base_lr <= 0.0) {
        throw InvalidArgument("base learning rate must be positive");
    }
    return schedule.base_tau * lr_at(schedule.lr_curve, step) / schedule.base_lr;
}

} // namespace dfmr
