#pragma once

#include <stdexcept>
#include <string>

namespace cte {

// Structural problems: bad magic, unsorted records, malformed layout.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Payload shorter than the header promises.
class LengthError : public FormatError {
public:
    explicit LengthError(const std::string& msg) : FormatError(msg) {}
};

// Well-formed container, out-of-range values inside.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape mismatch between operands.
class DimensionError : public std::invalid_argument {
public:
    explicit DimensionError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Bad configuration value or unknown key.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite loss during training; carries diagnostics.
class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cte
