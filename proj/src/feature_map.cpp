#include "dfmr/feature_map.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace dfmr {

FeatureMap::FeatureMap(int height, int width, int channels, std::vector<float> values)
    : height_(height), width_(width), channels_(channels), values_(std::move(values)) {
    if (height_ < 1 || width_ < 1 || channels_ < 1) {
        throw InvalidArgument("feature map dimensions must all be >= 1, got " +
                              std::to_string(height_) + "x" + std::to_string(width_) +
                              "x" + std::to_string(channels_));
    }
    const std::size_t expected = static_cast<std::size_t>(height_) * width_ * channels_;
    if (values_.size() != expected) {
        throw LengthMismatch(expected, values_.size());
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw NonFiniteValue(i);
        }
    }
}

const char * window_mode_name(WindowMode mode) {
    return mode == WindowMode::coarse ? "coarse" : "pool";
}

WindowMode parse_window_mode(const std::string & name) {
    if (name == "coarse") {
        return WindowMode::coarse;
    }
    if (name == "pool") {
        return WindowMode::pool;
    }
    throw InvalidArgument("unknown window mode '" + name + "' (expected coarse|pool)");
}

GridPartition partition(int height, int width, int factor, WindowMode mode) {
    if (factor < 1) {
        throw InvalidArgument("partition factor must be >= 1, got " + std::to_string(factor));
    }
    if (height % factor != 0) {
        throw IndivisibleGrid("height", height, factor);
    }
    if (width % factor != 0) {
        throw IndivisibleGrid("width", width, factor);
    }
    if (mode == WindowMode::coarse) {
        return GridPartition{height / factor, width / factor, factor, factor};
    }
    return GridPartition{factor, factor, height / factor, width / factor};
}

GridPartition partition(const FeatureMap & map, int factor, WindowMode mode) {
    return partition(map.height(), map.width(), factor, mode);
}

} // namespace dfmr
