#include "dfmr/npy.hpp"

#include <array>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

// Array-file format, version 1.0: 6 magic bytes "\x93NUMPY", 2 version bytes,
// a little-endian header length (2 bytes for v1, 4 for v2/v3), then an ASCII
// dict literal padded with spaces and terminated by '\n' so that the whole
// header is a multiple of 64 bytes, followed by the raw C-order payload.
// Reader and writer both assume a little-endian host.

namespace dfmr {

namespace {

constexpr char kMagic[6] = {'\x93', 'N', 'U', 'M', 'P', 'Y'};
constexpr std::size_t kHeaderAlign = 64;

struct ParsedHeader {
    std::string descr;
    bool fortran_order = false;
    std::vector<long long> shape;
};

// Extracts the value substring following "'key':" in the dict literal.
std::string dict_value(const std::string & dict, const std::string & key,
                       const std::string & path) {
    const std::string quoted = "'" + key + "'";
    std::size_t pos = dict.find(quoted);
    if (pos == std::string::npos) {
        throw IoFailure("header missing key '" + key + "': " + path);
    }
    pos = dict.find(':', pos + quoted.size());
    if (pos == std::string::npos) {
        throw IoFailure("malformed header dict: " + path);
    }
    ++pos;
    while (pos < dict.size() && std::isspace(static_cast<unsigned char>(dict[pos]))) {
        ++pos;
    }
    return dict.substr(pos);
}

ParsedHeader parse_header_dict(const std::string & dict, const std::string & path) {
    ParsedHeader h;

    std::string v = dict_value(dict, "descr", path);
    if (v.empty() || (v[0] != '\'' && v[0] != '"')) {
        throw IoFailure("malformed descr value: " + path);
    }
    const char quote = v[0];
    const std::size_t end = v.find(quote, 1);
    if (end == std::string::npos) {
        throw IoFailure("malformed descr value: " + path);
    }
    h.descr = v.substr(1, end - 1);

    v = dict_value(dict, "fortran_order", path);
    if (v.rfind("True", 0) == 0) {
        h.fortran_order = true;
    } else if (v.rfind("False", 0) == 0) {
        h.fortran_order = false;
    } else {
        throw IoFailure("malformed fortran_order value: " + path);
    }

    v = dict_value(dict, "shape", path);
    if (v.empty() || v[0] != '(') {
        throw IoFailure("malformed shape value: " + path);
    }
    const std::size_t close = v.find(')');
    if (close == std::string::npos) {
        throw IoFailure("malformed shape value: " + path);
    }
    std::string inner = v.substr(1, close - 1);
    std::stringstream ss(inner);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t a = tok.find_first_not_of(" \t");
        if (a == std::string::npos) {
            continue; // trailing comma of a 1-tuple
        }
        std::size_t b = tok.find_last_not_of(" \t");
        h.shape.push_back(std::stoll(tok.substr(a, b - a + 1)));
    }
    return h;
}

// Reads magic, version, length field and the dict. Leaves the stream at the
// start of the payload.
ParsedHeader read_header(std::ifstream & in, const std::string & path, int & word_size) {
    char magic[6];
    if (!in.read(magic, 6) || std::memcmp(magic, kMagic, 6) != 0) {
        throw BadMagic(path);
    }
    unsigned char version[2];
    if (!in.read(reinterpret_cast<char *>(version), 2)) {
        throw IoFailure("truncated header: " + path);
    }
    std::size_t header_len = 0;
    if (version[0] == 1) {
        unsigned char len[2];
        if (!in.read(reinterpret_cast<char *>(len), 2)) {
            throw IoFailure("truncated header: " + path);
        }
        header_len = static_cast<std::size_t>(len[0]) | (static_cast<std::size_t>(len[1]) << 8);
    } else if (version[0] == 2 || version[0] == 3) {
        unsigned char len[4];
        if (!in.read(reinterpret_cast<char *>(len), 4)) {
            throw IoFailure("truncated header: " + path);
        }
        header_len = static_cast<std::size_t>(len[0]) | (static_cast<std::size_t>(len[1]) << 8) |
                     (static_cast<std::size_t>(len[2]) << 16) |
                     (static_cast<std::size_t>(len[3]) << 24);
    } else {
        throw IoFailure("unsupported format version " + std::to_string(version[0]) + "." +
                        std::to_string(version[1]) + ": " + path);
    }

    std::string dict(header_len, '\0');
    if (!in.read(dict.data(), static_cast<std::streamsize>(header_len))) {
        throw IoFailure("truncated header: " + path);
    }

    const ParsedHeader h = parse_header_dict(dict, path);
    if (h.descr == "<f4") {
        word_size = 4;
    } else if (h.descr == "<f8") {
        word_size = 8;
    } else {
        throw UnsupportedDtype(path, h.descr);
    }
    if (h.fortran_order) {
        throw FortranOrder(path);
    }
    return h;
}

// Folds the header shape into (rows, cols, channels), applying the flat-side
// opt-in for rank-2 files.
void resolve_dims(const ParsedHeader & h, const ReadOptions & options, const std::string & path,
                  int & rows, int & cols, int & channels) {
    if (h.shape.size() == 3) {
        rows = static_cast<int>(h.shape[0]);
        cols = static_cast<int>(h.shape[1]);
        channels = static_cast<int>(h.shape[2]);
        return;
    }
    if (h.shape.size() == 2 && options.flat_side > 0) {
        const long long side = options.flat_side;
        if (h.shape[0] != side * side) {
            throw ShapeRank(path, h.shape.size());
        }
        rows = options.flat_side;
        cols = options.flat_side;
        channels = static_cast<int>(h.shape[1]);
        return;
    }
    throw ShapeRank(path, h.shape.size());
}

} // namespace

ArrayFileInfo peek_array_file(const std::filesystem::path & path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoFailure("cannot open " + path.string());
    }
    int word_size = 0;
    const ParsedHeader h = read_header(in, path.string(), word_size);
    return ArrayFileInfo{h.shape, word_size};
}

FeatureMap read_map(const std::filesystem::path & path, const ReadOptions & options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoFailure("cannot open " + path.string());
    }
    int word_size = 0;
    const ParsedHeader h = read_header(in, path.string(), word_size);

    int rows = 0, cols = 0, channels = 0;
    resolve_dims(h, options, path.string(), rows, cols, channels);
    if (rows < 1 || cols < 1 || channels < 1) {
        throw IoFailure("degenerate shape in " + path.string());
    }

    const std::size_t count = static_cast<std::size_t>(rows) * cols * channels;
    std::vector<float> values(count);
    if (word_size == 4) {
        if (!in.read(reinterpret_cast<char *>(values.data()),
                     static_cast<std::streamsize>(count * 4))) {
            throw IoFailure("truncated payload: " + path.string());
        }
    } else {
        std::vector<double> wide(count);
        if (!in.read(reinterpret_cast<char *>(wide.data()),
                     static_cast<std::streamsize>(count * 8))) {
            throw IoFailure("truncated payload: " + path.string());
        }
        for (std::size_t i = 0; i < count; ++i) {
            values[i] = static_cast<float>(wide[i]);
        }
    }
    // no trailing garbage
    char extra;
    if (in.read(&extra, 1)) {
        throw IoFailure("unexpected trailing bytes: " + path.string());
    }

    return FeatureMap(rows, cols, channels, std::move(values));
}

void write_map(const FeatureMap & map, const std::filesystem::path & path) {
    if (path.empty()) {
        throw IoFailure("empty output path");
    }

    std::string dict = "{'descr': '<f4', 'fortran_order': False, 'shape': (" +
                       std::to_string(map.height()) + ", " + std::to_string(map.width()) + ", " +
                       std::to_string(map.channels()) + "), }";
    const std::size_t prefix = 6 + 2 + 2; // magic + version + length field
    const std::size_t unpadded = prefix + dict.size() + 1;
    const std::size_t padding = (kHeaderAlign - unpadded % kHeaderAlign) % kHeaderAlign;
    dict.append(padding, ' ');
    dict.push_back('\n');

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoFailure("cannot open for writing: " + path.string());
    }
    out.write(kMagic, 6);
    const unsigned char version[2] = {1, 0};
    out.write(reinterpret_cast<const char *>(version), 2);
    const std::uint16_t len = static_cast<std::uint16_t>(dict.size());
    const unsigned char len_bytes[2] = {static_cast<unsigned char>(len & 0xFF),
                                        static_cast<unsigned char>(len >> 8)};
    out.write(reinterpret_cast<const char *>(len_bytes), 2);
    out.write(dict.data(), static_cast<std::streamsize>(dict.size()));
    out.write(reinterpret_cast<const char *>(map.values().data()),
              static_cast<std::streamsize>(map.values().size() * sizeof(float)));
    if (!out) {
        throw IoFailure("write failed: " + path.string());
    }
}

} // namespace dfmr
