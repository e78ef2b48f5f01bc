#include "dfmr/corpus.hpp"

#include <algorithm>

#include <json.hpp>

#include "dfmr/rng.hpp"

namespace dfmr {

namespace fs = std::filesystem;
using nlohmann::json;

CorpusManifest scan_corpus(const fs::path & root, const ReadOptions & options) {
    if (!fs::is_directory(root)) {
        throw IoFailure("corpus root is not a directory: " + root.string());
    }

    CorpusManifest manifest;
    for (const auto & dirent : fs::recursive_directory_iterator(root)) {
        if (!dirent.is_regular_file() || dirent.path().extension() != ".npy") {
            continue;
        }
        const std::string rel = fs::relative(dirent.path(), root).generic_string();
        try {
            const ArrayFileInfo info = peek_array_file(dirent.path());
            ManifestEntry entry;
            entry.path = rel;
            entry.id = rel.substr(0, rel.size() - 4); // strip ".npy"
            if (info.shape.size() == 3) {
                entry.height = static_cast<int>(info.shape[0]);
                entry.width = static_cast<int>(info.shape[1]);
                entry.channels = static_cast<int>(info.shape[2]);
            } else if (info.shape.size() == 2 && options.flat_side > 0 &&
                       info.shape[0] == static_cast<long long>(options.flat_side) * options.flat_side) {
                entry.height = options.flat_side;
                entry.width = options.flat_side;
                entry.channels = static_cast<int>(info.shape[1]);
            } else {
                throw ShapeRank(rel, info.shape.size());
            }
            manifest.entries.push_back(std::move(entry));
        } catch (const Error & e) {
            manifest.diagnostics.push_back(Diagnostic{rel, e.what()});
        }
    }

    std::sort(manifest.entries.begin(), manifest.entries.end(),
              [](const ManifestEntry & a, const ManifestEntry & b) { return a.id < b.id; });
    std::sort(manifest.diagnostics.begin(), manifest.diagnostics.end(),
              [](const Diagnostic & a, const Diagnostic & b) { return a.path < b.path; });
    return manifest;
}

std::string manifest_to_json(const CorpusManifest & manifest) {
    json entries = json::array();
    for (const auto & e : manifest.entries) {
        entries.push_back({{"id", e.id},
                           {"path", e.path},
                           {"height", e.height},
                           {"width", e.width},
                           {"channels", e.channels}});
    }
    json diagnostics = json::array();
    for (const auto & d : manifest.diagnostics) {
        diagnostics.push_back({{"path", d.path}, {"error", d.error}});
    }
    json doc = {{"version", manifest.version},
                {"entries", entries},
                {"diagnostics", diagnostics}};
    return doc.dump(2) + "\n";
}

CorpusManifest manifest_from_json(const std::string & text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception & e) {
        throw IoFailure(std::string("manifest parse error: ") + e.what());
    }
    CorpusManifest manifest;
    manifest.version = doc.at("version").get<int>();
    for (const auto & e : doc.at("entries")) {
        manifest.entries.push_back(ManifestEntry{e.at("id").get<std::string>(),
                                                 e.at("path").get<std::string>(),
                                                 e.at("height").get<int>(),
                                                 e.at("width").get<int>(),
                                                 e.at("channels").get<int>()});
    }
    if (doc.contains("diagnostics")) {
        for (const auto & d : doc.at("diagnostics")) {
            manifest.diagnostics.push_back(
                Diagnostic{d.at("path").get<std::string>(), d.at("error").get<std::string>()});
        }
    }
    return manifest;
}

const char * synth_kind_name(SynthKind kind) {
    switch (kind) {
        case SynthKind::constant:     return "constant";
        case SynthKind::checkerboard: return "checkerboard";
        case SynthKind::white_noise:  return "white-noise";
        default:                      return "gradient";
    }
}

SynthKind parse_synth_kind(const std::string & name) {
    if (name == "constant") {
        return SynthKind::constant;
    }
    if (name == "checkerboard") {
        return SynthKind::checkerboard;
    }
    if (name == "white-noise") {
        return SynthKind::white_noise;
    }
    if (name == "gradient") {
        return SynthKind::gradient;
    }
    throw InvalidArgument("unknown synth kind '" + name +
                          "' (expected constant|checkerboard|white-noise|gradient)");
}

FeatureMap synth_map(SynthKind kind, int height, int width, int channels,
                     std::uint64_t seed, float amplitude) {
    if (height < 1 || width < 1 || channels < 1) {
        throw InvalidArgument("synth dimensions must all be >= 1");
    }
    const std::size_t count = static_cast<std::size_t>(height) * width * channels;
    std::vector<float> values(count);

    switch (kind) {
        case SynthKind::constant:
            std::fill(values.begin(), values.end(), amplitude);
            break;
        case SynthKind::checkerboard:
            for (int r = 0; r < height; ++r) {
                for (int c = 0; c < width; ++c) {
                    const float v = ((r + c) % 2 == 0) ? amplitude : -amplitude;
                    float * cell = values.data() + (static_cast<std::size_t>(r) * width + c) * channels;
                    std::fill(cell, cell + channels, v);
                }
            }
            break;
        case SynthKind::white_noise:
            for (std::size_t i = 0; i < count; ++i) {
                const double u = unit_double(mix64(seed, i));
                values[i] = static_cast<float>(amplitude * (2.0 * u - 1.0));
            }
            break;
        case SynthKind::gradient:
            for (int r = 0; r < height; ++r) {
                for (int c = 0; c < width; ++c) {
                    const float v = static_cast<float>(
                        static_cast<double>(amplitude) * (r + c) / (height + width));
                    float * cell = values.data() + (static_cast<std::size_t>(r) * width + c) * channels;
                    std::fill(cell, cell + channels, v);
                }
            }
            break;
    }

    return FeatureMap(height, width, channels, std::move(values));
}

} // namespace dfmr
