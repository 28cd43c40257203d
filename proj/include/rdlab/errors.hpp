#pragma once

#include <stdexcept>
#include <string>

namespace rdlab {

// Invalid user-supplied configuration (grid sizes, scenario parameters, ...).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Field values outside the mathematical domain of an operation (e.g. logs of
// nonpositive concentrations).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structure parameters that violate the feasibility inequalities.
struct StructureParamError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Time integration failure; carries the simulation time at which it occurred.
struct IntegrationError : std::runtime_error {
    double time;
    IntegrationError(const std::string& msg, double t)
        : std::runtime_error(msg + " at t=" + std::to_string(t)), time(t) {}
};

// Positivity lost beyond tolerance. Positivity is a property of the exact
// flow; a violation means the step size or the scheme is wrong, so this is
// never clipped away.
struct PositivityError : IntegrationError {
    using IntegrationError::IntegrationError;
};

// Failure while serializing or writing run artifacts.
struct ReportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace rdlab
