#pragma once
/// @file errors.hpp
/// @brief Error categories shared across the lcflow library.

#include <stdexcept>
#include <string>

namespace lcflow {

/// Raised when a config file, CLI flag, or environment override cannot be
/// interpreted. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when a solver detects a degenerate or diverging state (nonpositive
/// density, NaN samples, blowup past the safety bound, Picard stall).
/// The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace lcflow
