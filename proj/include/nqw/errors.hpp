#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nqw {

/// Base class for every error raised by the simulator.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters outside the domain where a formula is defined (cos Θ = 0, ω ≥ mc², |v| ≥ c, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A state that cannot carry observables: zero charge, wrong length, bad lattice.
class InvalidState : public Error {
public:
    using Error::Error;
};

/// NaN or Inf appeared in the amplitudes.
class NumericFailure : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Charge reached (or would leave) the edge of the finite lattice.
class BoundaryViolation : public Error {
public:
    BoundaryViolation(std::size_t step, double edge_fraction)
        : Error("boundary guard violated at step " + std::to_string(step) +
                " (edge charge fraction " + std::to_string(edge_fraction) + ")"),
          step_(step), edge_fraction_(edge_fraction) {}

    std::size_t step() const noexcept { return step_; }
    double edge_fraction() const noexcept { return edge_fraction_; }

private:
    std::size_t step_;
    double edge_fraction_;
};

}  // namespace nqw
