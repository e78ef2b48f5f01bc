#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "dfmr/feature_map.hpp"
#include "dfmr/rng.hpp"

namespace testutil {

inline dfmr::FeatureMap random_map(std::uint64_t seed, int h, int w, int c,
                                   double amplitude = 1.0, double center = 0.0) {
    dfmr::SplitMix64 rng(seed);
    std::vector<float> values(static_cast<std::size_t>(h) * w * c);
    for (auto & v : values) {
        v = static_cast<float>(center + rng.next_in(-amplitude, amplitude));
    }
    return dfmr::FeatureMap(h, w, c, std::move(values));
}

inline double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale == 0.0) {
        return 0.0;
    }
    return std::abs(a - b) / scale;
}

// Unique scratch directory under the build tree, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string & tag) {
        static std::uint64_t counter = 0;
        root_ = std::filesystem::temp_directory_path() /
                ("dfmr_test_" + tag + "_" + std::to_string(++counter) + "_" +
                 std::to_string(static_cast<unsigned long>(::getpid())));
        std::filesystem::create_directories(root_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(root_, ec);
    }
    TempDir(const TempDir &) = delete;
    TempDir & operator=(const TempDir &) = delete;

    const std::filesystem::path & path() const { return root_; }

private:
    std::filesystem::path root_;
};

inline std::vector<char> slurp(const std::filesystem::path & path) {
    std::ifstream in(path, std::ios::binary);
    return std::vector<char>((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
}

} // namespace testutil
