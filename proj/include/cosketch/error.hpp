#pragma once

#include <stdexcept>
#include <string>

namespace cosketch {

// Shapes of operands do not agree.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Iterative kernel failed to converge, non-finite data, or a retry cap was hit.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or unreadable input data (Matrix Market files, infeasible generators).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid experiment configuration or CLI arguments.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require_dims(bool ok, const std::string& what) {
    if (!ok) throw DimensionError(what);
}

}  // namespace cosketch
