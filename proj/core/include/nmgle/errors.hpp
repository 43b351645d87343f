#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nmgle {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration value or file (bad key, bad type, violated invariant).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

/// State vector does not match the lattice it is evaluated against.
class StateShapeError : public Error {
public:
    explicit StateShapeError(const std::string& what) : Error(what) {}
};

/// Polarization basis requested for a zero wave vector.
class DegenerateDirectionError : public Error {
public:
    explicit DegenerateDirectionError(const std::string& what) : Error(what) {}
};

/// Non-finite state encountered during integration; carries the step index.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, std::size_t step)
        : Error(what + " at step " + std::to_string(step)), step_(step) {}
    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

/// Incremental convolution accumulator is out of sync with its signal.
class HistorySyncError : public Error {
public:
    explicit HistorySyncError(const std::string& what) : Error(what) {}
};

/// Mismatched or invalid time grids between series.
class GridError : public Error {
public:
    explicit GridError(const std::string& what) : Error(what) {}
};

/// An operation over an ensemble received no trajectories.
class EmptyInputError : public Error {
public:
    explicit EmptyInputError(const std::string& what) : Error(what) {}
};

/// Filesystem or serialization failure.
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace nmgle
