#pragma once

#include <stdexcept>
#include <string>

namespace contrast {

// Malformed input data or model files (CLI exit code 3).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid configuration: bad flags, incompatible measure/mode (CLI exit code 2).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace contrast
