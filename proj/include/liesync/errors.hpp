#pragma once

#include <stdexcept>
#include <string>

namespace liesync {

/// Base class for all liesync errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite entries, shape mismatches, singular matrices where invertible
/// ones are required.
struct InvalidInput : Error {
    explicit InvalidInput(const std::string& what) : Error(what) {}
};

/// A group element left the exponential chart: the principal logarithm does
/// not exist, or its norm reached the chart radius. Logarithm coordinates of
/// the offending element are not to be trusted.
struct ChartViolation : Error {
    explicit ChartViolation(const std::string& what) : Error(what) {}
};

/// Unsupported group/dimension combinations, bad scenario files, bad flags.
struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(what) {}
};

/// Newton iteration did not converge; carries the best residual reached.
struct SolverFailure : Error {
    SolverFailure(const std::string& what, double best_residual)
        : Error(what), best_residual(best_residual) {}
    double best_residual;
};

/// Drift beyond tolerance under the abort policy, or an RHS evaluation
/// failure inside the integrator.
struct IntegrationError : Error {
    explicit IntegrationError(const std::string& what) : Error(what) {}
};

/// Decay-rate fit on a window containing nonpositive values or too few
/// samples.
struct FitError : Error {
    explicit FitError(const std::string& what) : Error(what) {}
};

}  // namespace liesync
