#pragma once

#include <stdexcept>
#include <string>

namespace bsde {

/**
 * @brief Base class for all library errors.
 *
 * Every error carries a short category tag that front ends map to process
 * exit codes and to the "error[category]: message" diagnostic format.
 */
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& message)
        : std::runtime_error(message), category_(std::move(category)) {}

    /// Category tag: "config", "validation" or "numerical".
    const std::string& category() const { return category_; }

private:
    std::string category_;
};

/// Malformed or incompatible configuration (bad file, unknown key,
/// scheme/problem mismatch).  Front ends exit with code 2.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error("config", message) {}
};

/// A precondition on the discretization or the inputs fails (step-size
/// conditions under --strict, out-of-range parameters).  Exit code 3.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& message) : Error("validation", message) {}
};

/// A computation fails at run time (divergent fixed point, quadrature that
/// does not converge, overflow).  Exit code 4.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& message) : Error("numerical", message) {}
};

/// Evaluating an expression left its mathematical domain (log of a
/// non-positive value, division by zero, ...).  A refinement of
/// NumericalError so callers may treat it uniformly.
class DomainError : public NumericalError {
public:
    explicit DomainError(const std::string& message) : NumericalError(message) {}
};

} // namespace bsde
