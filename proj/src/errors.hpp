#ifndef ROTVEC_ERRORS_HPP
#define ROTVEC_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace rotvec {

// Invalid argument / configuration. Maps to exit code 2 at the CLI.
struct argument_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Base for runtime computation failures. Maps to exit code 1 at the CLI.
struct compute_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct integration_failure : compute_error {
    double t_reached;
    explicit integration_failure(const std::string& msg, double t)
        : compute_error(msg), t_reached(t) {}
};

// Exponential kernel exceeded the overflow guard.
struct kernel_overflow : compute_error {
    int index;
    double time;
    kernel_overflow(const std::string& msg, int i, double t)
        : compute_error(msg), index(i), time(t) {}
};

struct iteration_failure : compute_error {
    std::vector<double> residual_history;
    iteration_failure(const std::string& msg, std::vector<double> history)
        : compute_error(msg), residual_history(std::move(history)) {}
};

// Fixed-point iterate left the admissible set.
struct cone_violation : compute_error {
    using compute_error::compute_error;
};

struct degenerate_denominator : compute_error {
    using compute_error::compute_error;
};

} // namespace rotvec

#endif
