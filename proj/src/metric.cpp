#include "dfmr/metric.hpp"

#include <cmath>

namespace dfmr {

namespace {

void check_window(const FeatureMap & map, const Window & win) {
    if (win.rows < 1 || win.cols < 1) {
        throw InvalidArgument("window must span at least one cell");
    }
    if (win.row0 < 0 || win.col0 < 0 ||
        win.row0 + win.rows > map.height() ||
        win.col0 + win.cols > map.width()) {
        throw OutOfBounds("window [" + std::to_string(win.row0) + "," +
                          std::to_string(win.col0) + " " + std::to_string(win.rows) + "x" +
                          std::to_string(win.cols) + "] outside " +
                          std::to_string(map.height()) + "x" + std::to_string(map.width()) +
                          " map");
    }
}

// mean over every scalar of the window (channels included)
double window_mean_impl(const FeatureMap & map, const Window & win) {
    const int channels = map.channels();
    double sum = 0.0;
    for (int r = win.row0; r < win.row0 + win.rows; ++r) {
        for (int c = win.col0; c < win.col0 + win.cols; ++c) {
            const float * cell = map.values().data() + map.flat_index(r, c, 0);
            for (int ch = 0; ch < channels; ++ch) {
                sum += cell[ch];
            }
        }
    }
    const double n = static_cast<double>(win.rows) * win.cols * channels;
    return sum / n;
}

// two-pass population std over every scalar of the window
double sigma_pooled(const FeatureMap & map, const Window & win) {
    const int channels = map.channels();
    const double mean = window_mean_impl(map, win);
    double acc = 0.0;
    for (int r = win.row0; r < win.row0 + win.rows; ++r) {
        for (int c = win.col0; c < win.col0 + win.cols; ++c) {
            const float * cell = map.values().data() + map.flat_index(r, c, 0);
            for (int ch = 0; ch < channels; ++ch) {
                const double d = cell[ch] - mean;
                acc += d * d;
            }
        }
    }
    const double n = static_cast<double>(win.rows) * win.cols * channels;
    return std::sqrt(acc / n);
}

// population std per channel, then mean over channels
double sigma_per_channel(const FeatureMap & map, const Window & win) {
    const int channels = map.channels();
    const double n = static_cast<double>(win.rows) * win.cols;
    double sigma_sum = 0.0;
    for (int ch = 0; ch < channels; ++ch) {
        double sum = 0.0;
        for (int r = win.row0; r < win.row0 + win.rows; ++r) {
            for (int c = win.col0; c < win.col0 + win.cols; ++c) {
                sum += map.at(r, c, ch);
            }
        }
        const double mean = sum / n;
        double acc = 0.0;
        for (int r = win.row0; r < win.row0 + win.rows; ++r) {
            for (int c = win.col0; c < win.col0 + win.cols; ++c) {
                const double d = map.at(r, c, ch) - mean;
                acc += d * d;
            }
        }
        sigma_sum += std::sqrt(acc / n);
    }
    return sigma_sum / channels;
}

} // namespace

const char * channel_aggregation_name(ChannelAggregation agg) {
    return agg == ChannelAggregation::pooled_scalars ? "pooled-scalars" : "per-channel-mean";
}

ChannelAggregation parse_channel_aggregation(const std::string & name) {
    if (name == "pooled-scalars") {
        return ChannelAggregation::pooled_scalars;
    }
    if (name == "per-channel-mean") {
        return ChannelAggregation::per_channel_mean;
    }
    throw InvalidArgument("unknown channel aggregation '" + name +
                          "' (expected pooled-scalars|per-channel-mean)");
}

double window_mean(const FeatureMap & map, const Window & win, ChannelAggregation) {
    check_window(map, win);
    return window_mean_impl(map, win);
}

double window_sigma(const FeatureMap & map, const Window & win, ChannelAggregation agg) {
    check_window(map, win);
    return agg == ChannelAggregation::pooled_scalars ? sigma_pooled(map, win)
                                                     : sigma_per_channel(map, win);
}

MetricReport mean_sigma(const FeatureMap & map, int factor, WindowMode mode,
                        ChannelAggregation agg, Exec exec) {
    const GridPartition part = partition(map, factor, mode);
    const int total = part.window_count();

    MetricReport report;
    report.factor = factor;
    report.mode = mode;
    report.aggregation = agg;
    report.window_sigmas.resize(total);
    report.window_means.resize(total);

    auto compute_one = [&](int k) {
        const int wy = k / part.windows_x;
        const int wx = k % part.windows_x;
        const Window win{wy * part.window_rows, wx * part.window_cols,
                         part.window_rows, part.window_cols};
        report.window_means[k] = window_mean_impl(map, win);
        report.window_sigmas[k] = agg == ChannelAggregation::pooled_scalars
                                      ? sigma_pooled(map, win)
                                      : sigma_per_channel(map, win);
    };

    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (int k = 0; k < total; ++k) {
            compute_one(k);
        }
    } else {
        for (int k = 0; k < total; ++k) {
            compute_one(k);
        }
    }

    // serial reduce keeps serial/parallel byte-identical
    double sum = 0.0;
    for (double s : report.window_sigmas) {
        sum += s;
    }
    report.mean_sigma = sum / total;
    return report;
}

} // namespace dfmr
