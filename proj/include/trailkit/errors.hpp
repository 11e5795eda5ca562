#pragma once

#include <stdexcept>
#include <string>

namespace trailkit {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct FilterError : Error {
    using Error::Error;
};

struct TrainError : Error {
    using Error::Error;
};

/// Chat backend transport failure (after retries were exhausted).
struct BackendError : Error {
    using Error::Error;
};

/// The labeler returned something other than "1"/"0".
struct LabelParseError : Error {
    std::string raw;
    LabelParseError(const std::string& msg, std::string raw_text)
        : Error(msg), raw(std::move(raw_text)) {}
};

/// A tutorial object violated the schema.
struct SchemaError : Error {
    using Error::Error;
};

struct ActionParseError : Error {
    size_t position;
    ActionParseError(const std::string& msg, size_t pos)
        : Error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

struct FixtureError : Error {
    using Error::Error;
};

struct MappingError : Error {
    using Error::Error;
};

/// The evaluator response carried no Status line.
struct VerdictParseError : Error {
    std::string raw;
    VerdictParseError(const std::string& msg, std::string raw_text)
        : Error(msg), raw(std::move(raw_text)) {}
};

struct StoreError : Error {
    using Error::Error;
};

struct CostError : Error {
    using Error::Error;
};

}  // namespace trailkit
