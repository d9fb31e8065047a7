#pragma once

#include <stdexcept>
#include <string>

namespace disktomo {

// Failure taxonomy shared by the solvers. Bad arguments (wrong sizes, out of
// range parameters) are reported with std::invalid_argument; the types below
// cover genuinely numerical outcomes.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A mathematical precondition of an algorithm does not hold (e.g. the
// Theodorsen delta-condition, or the interface Neumann-series contraction).
class precondition_error : public numerical_error {
public:
    using numerical_error::numerical_error;
};

// An iteration ran out of its budget; carries the last residual seen.
class divergence_error : public numerical_error {
public:
    divergence_error(const std::string& what, double residual)
        : numerical_error(what), residual(residual) {}
    double residual;
};

class unsupported_geometry : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class solver_failure : public numerical_error {
public:
    using numerical_error::numerical_error;
};

class optimization_failure : public numerical_error {
public:
    optimization_failure(const std::string& what, std::string trace)
        : numerical_error(what), trace(std::move(trace)) {}
    std::string trace;
};

} // namespace disktomo
