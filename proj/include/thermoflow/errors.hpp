#pragma once

#include <stdexcept>
#include <string>

namespace thermoflow {

/// Input model is outside the supported class (e.g. not irreducible, π₁ ≅ ℤ).
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Weak specification cannot hold for the given shift.
class SpecificationError : public ModelError {
public:
    SpecificationError() : ModelError("weak specification fails") {}
};

/// An iterative numerical kernel failed to converge.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Caller asked for something the current parameters cannot resolve.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace thermoflow
