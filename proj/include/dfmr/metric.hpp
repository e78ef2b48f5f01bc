#pragma once

#include <string>
#include <vector>

#include "dfmr/feature_map.hpp"
#include "dfmr/parallel.hpp"

namespace dfmr {

// How the channel dimension enters a window statistic:
//   pooled_scalars   — all rows*cols*channels scalars of the window form one
//                      sample set (default).
//   per_channel_mean — std per channel, then the arithmetic mean over channels.
enum class ChannelAggregation { pooled_scalars, per_channel_mean };

const char * channel_aggregation_name(ChannelAggregation agg);
ChannelAggregation parse_channel_aggregation(const std::string & name);

// Rectangular window: rows [row0, row0+rows) x cols [col0, col0+cols),
// all channels.
struct Window {
    int row0;
    int col0;
    int rows;
    int cols;
};

// Mean of the window's values. Identical under both aggregations.
double window_mean(const FeatureMap & map, const Window & win, ChannelAggregation agg);

// Population standard deviation of the window's values (divisor = sample count).
double window_sigma(const FeatureMap & map, const Window & win, ChannelAggregation agg);

// Per-window statistics for one (factor, mode) partition of a map.
struct MetricReport {
    int factor;
    WindowMode mode;
    ChannelAggregation aggregation;
    std::vector<double> window_sigmas; // sigma per window, row-major window order
    std::vector<double> window_means;  // mean per window, same order
    double mean_sigma;                 // arithmetic mean of window_sigmas
};

// Computes sigma per window and their mean for the partition of `map` induced
// by (factor, mode). All accumulation is in 64-bit floats. Window loops are
// independent, so serial and parallel paths give bit-identical reports.
MetricReport mean_sigma(const FeatureMap & map, int factor, WindowMode mode,
                        ChannelAggregation agg = ChannelAggregation::pooled_scalars,
                        Exec exec = Exec::parallel);

} // namespace dfmr
