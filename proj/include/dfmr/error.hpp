#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dfmr {

// Base class for everything the toolkit throws.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string & msg) : std::runtime_error(msg) {}
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string & msg) : Error(msg) {}
};

class LengthMismatch : public Error {
public:
    LengthMismatch(std::size_t expected, std::size_t got)
        : Error("length mismatch: expected " + std::to_string(expected) +
                " values, got " + std::to_string(got)),
          expected(expected), got(got) {}

    std::size_t expected;
    std::size_t got;
};

class NonFiniteValue : public Error {
public:
    explicit NonFiniteValue(std::size_t flat_index)
        : Error("non-finite value at flat index " + std::to_string(flat_index)),
          index(flat_index) {}

    std::size_t index;
};

class IndivisibleGrid : public Error {
public:
    IndivisibleGrid(std::string dim_name, int extent, int factor)
        : Error(dim_name + " extent " + std::to_string(extent) +
                " is not divisible by factor " + std::to_string(factor)),
          dim(std::move(dim_name)), extent(extent), factor(factor) {}

    std::string dim;
    int extent;
    int factor;
};

class OutOfBounds : public Error {
public:
    explicit OutOfBounds(const std::string & msg) : Error(msg) {}
};

class StepOutOfRange : public Error {
public:
    StepOutOfRange(long step, long total)
        : Error("step " + std::to_string(step) + " past end of schedule (" +
                std::to_string(total) + " steps)"),
          step(step), total(total) {}

    long step;
    long total;
};

// File format errors (array files on disk).
class BadMagic : public Error {
public:
    explicit BadMagic(const std::string & path) : Error("bad magic bytes: " + path) {}
};

class UnsupportedDtype : public Error {
public:
    UnsupportedDtype(const std::string & path, const std::string & descr)
        : Error("unsupported dtype '" + descr + "' in " + path), descr(descr) {}

    std::string descr;
};

class FortranOrder : public Error {
public:
    explicit FortranOrder(const std::string & path)
        : Error("fortran-ordered array not supported: " + path) {}
};

class ShapeRank : public Error {
public:
    ShapeRank(const std::string & path, std::size_t rank)
        : Error("expected rank-3 (rows, cols, channels) array, got rank " +
                std::to_string(rank) + ": " + path),
          rank(rank) {}

    std::size_t rank;
};

class IoFailure : public Error {
public:
    explicit IoFailure(const std::string & msg) : Error(msg) {}
};

class EmptyCorpus : public Error {
public:
    explicit EmptyCorpus(const std::string & msg) : Error(msg) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string & msg) : Error(msg) {}
};

} // namespace dfmr
