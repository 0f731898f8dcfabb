#pragma once

#include <stdexcept>
#include <string>

namespace fanopol {

/// Base of every error raised by the library. `module()` names the
/// component that detected the problem so the CLI can report it.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

/// Invalid input parameter or violated precondition.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Cavity cutoff at or above the intersubband transition.
class NoResonanceError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

/// Root bracketing or refinement failed in an eigensolver.
class SolverError : public Error {
public:
    using Error::Error;
};

/// Dense path refuses matrices above its dimension cap.
class DimensionRefusedError : public Error {
public:
    using Error::Error;
};

/// Inputs computed for different parameter sets were combined.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// A quantity is mathematically undefined for the given state
/// (emission distribution of a dark state, efficiency with no decay).
class UndefinedResultError : public Error {
public:
    using Error::Error;
};

}  // namespace fanopol
