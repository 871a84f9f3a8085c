#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tsc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidArgumentError : Error {
    using Error::Error;
};

struct NonFiniteError : Error {
    std::size_t index;
    explicit NonFiniteError(std::size_t at)
        : Error("non-finite sample at index " + std::to_string(at)), index(at) {}
};

struct TooShortError : Error {
    explicit TooShortError(std::size_t n)
        : Error("series too short: length " + std::to_string(n) + " < 2") {}
};

struct OutOfSupportError : Error {
    using Error::Error;
};

struct NoValidScaleError : Error {
    explicit NoValidScaleError(std::size_t n)
        : Error("no scale fits a series of length " + std::to_string(n)) {}
};

struct KTooLargeError : Error {
    KTooLargeError(int k, std::size_t n)
        : Error("segment count " + std::to_string(k) + " exceeds series length " +
                std::to_string(n)) {}
};

struct EmptyTrainingSetError : Error {
    EmptyTrainingSetError() : Error("training set is empty") {}
};

struct SegmentTooLongError : Error {
    SegmentTooLongError(std::size_t len, std::size_t padded)
        : Error("segment of length " + std::to_string(len) + " exceeds padded length " +
                std::to_string(padded)) {}
};

struct IndexOutOfRangeError : Error {
    using Error::Error;
};

struct DimensionMismatchError : Error {
    using Error::Error;
};

struct LabelOutOfRangeError : Error {
    LabelOutOfRangeError(int label, std::size_t classes)
        : Error("label " + std::to_string(label) + " out of range for " +
                std::to_string(classes) + " classes") {}
};

struct NonFiniteGradientError : Error {
    using Error::Error;
};

struct PartitionMismatchError : Error {
    using Error::Error;
};

struct LengthMismatchError : Error {
    using Error::Error;
};

struct EmptyInputError : Error {
    using Error::Error;
};

struct TooFewSeriesError : Error {
    using Error::Error;
};

struct ParseError : Error {
    std::size_t line;
    std::size_t column;
    ParseError(std::size_t line_no, std::size_t col, const std::string& reason)
        : Error("parse error at line " + std::to_string(line_no) + ", field " +
                std::to_string(col) + ": " + reason),
          line(line_no), column(col) {}
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace tsc
