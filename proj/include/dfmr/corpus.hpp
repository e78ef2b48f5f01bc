#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dfmr/feature_map.hpp"
#include "dfmr/npy.hpp"

namespace dfmr {

struct ManifestEntry {
    std::string id;   // relative path without extension, '/' separated
    std::string path; // relative path with extension
    int height = 0;
    int width = 0;
    int channels = 0;
};

struct Diagnostic {
    std::string path;
    std::string error;
};

struct CorpusManifest {
    int version = 1;
    std::vector<ManifestEntry> entries;     // sorted by id
    std::vector<Diagnostic> diagnostics;    // per-file failures, sorted by path
};

// Recursively lists array files under `root`, reading headers only. Corrupt
// entries become diagnostics instead of aborting the scan. Output is sorted
// by id, independent of filesystem enumeration order.
CorpusManifest scan_corpus(const std::filesystem::path & root, const ReadOptions & options = {});

std::string manifest_to_json(const CorpusManifest & manifest);
CorpusManifest manifest_from_json(const std::string & text);

enum class SynthKind { constant, checkerboard, white_noise, gradient };

const char * synth_kind_name(SynthKind kind);
SynthKind parse_synth_kind(const std::string & name);

// Deterministic synthetic fixtures:
//   constant     — every cell = amplitude
//   checkerboard — amplitude * (-1)^(row+col), constant across channels
//   white_noise  — seeded i.i.d. uniform in [-amplitude, amplitude]
//   gradient     — amplitude * (row+col) / (rows+cols)
FeatureMap synth_map(SynthKind kind, int height, int width, int channels,
                     std::uint64_t seed, float amplitude);

} // namespace dfmr
