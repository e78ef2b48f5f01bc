#pragma once

#include <filesystem>
#include <vector>

#include "dfmr/feature_map.hpp"

namespace dfmr {

struct ReadOptions {
    // Rank-2 (N, D) files are rejected unless flat_side > 0, in which case a
    // file with N == flat_side^2 rows is folded into (flat_side, flat_side, D).
    int flat_side = 0;
};

// Header fields of an array file, read without touching the payload.
struct ArrayFileInfo {
    std::vector<long long> shape;
    int word_size = 0; // 4 or 8
};

ArrayFileInfo peek_array_file(const std::filesystem::path & path);

// Reads a version 1.0 (or 2.0/3.0) array file: little-endian f4/f8 payload,
// C-contiguous, shape (rows, cols, channels). f8 values are narrowed to the
// 32-bit storage precision with round-to-nearest.
FeatureMap read_map(const std::filesystem::path & path, const ReadOptions & options = {});

// Writes version 1.0, dtype <f4, C order, shape (rows, cols, channels).
// Byte output is deterministic for identical inputs.
void write_map(const FeatureMap & map, const std::filesystem::path & path);

} // namespace dfmr
