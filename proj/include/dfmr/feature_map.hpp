#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dfmr/error.hpp"

namespace dfmr {

// Dense rows x cols x channels grid of 32-bit float features, row-major
// (row, col, channel). Immutable after construction; construction rejects
// non-finite values, so every downstream kernel can assume finite input.
class FeatureMap {
public:
    FeatureMap(int height, int width, int channels, std::vector<float> values);

    int height() const { return height_; }
    int width() const { return width_; }
    int channels() const { return channels_; }

    // Token count of the grid (one token per spatial cell).
    int tokens() const { return height_ * width_; }

    std::size_t cell_count() const { return values_.size(); }

    std::size_t flat_index(int row, int col, int channel) const {
        return (static_cast<std::size_t>(row) * width_ + col) * channels_ + channel;
    }

    float at(int row, int col, int channel) const {
        return values_[flat_index(row, col, channel)];
    }

    std::span<const float> values() const { return values_; }

private:
    int height_;
    int width_;
    int channels_;
    std::vector<float> values_;
};

// How the grid is cut into non-overlapping metric windows for a factor s:
//   coarse — windows of side H/s x W/s, s*s windows in total.
//   pool   — windows of side s x s, matching the pooling unit.
enum class WindowMode { coarse, pool };

const char * window_mode_name(WindowMode mode);
WindowMode parse_window_mode(const std::string & name);

// Non-overlapping tiling of a height x width grid.
struct GridPartition {
    int window_rows; // cells per window, vertical
    int window_cols; // cells per window, horizontal
    int windows_y;   // window count, vertical
    int windows_x;   // window count, horizontal

    int window_count() const { return windows_y * windows_x; }
    std::size_t cells_per_window() const {
        return static_cast<std::size_t>(window_rows) * window_cols;
    }
};

// Pure geometry; depends only on (height, width, factor, mode).
// Throws IndivisibleGrid when the factor does not evenly divide a dimension.
GridPartition partition(int height, int width, int factor, WindowMode mode);
GridPartition partition(const FeatureMap & map, int factor, WindowMode mode);

} // namespace dfmr
