#ifndef ROTVEC_INTEGRATE_HPP
#define ROTVEC_INTEGRATE_HPP

#include <functional>
#include <string>
#include <vector>

namespace rotvec {

// Right-hand side of y' = f(t, y); dy has the same dimension as y.
using Rhs = std::function<void(double t, const double* y, double* dy)>;

struct IntegratorStats {
    long steps = 0;
    long accepted = 0;
    long rejected = 0;
    double tol = 0.0;
};

struct OdeOptions {
    double tol = 1e-10;       // local error target per step (abs and rel)
    double safety = 0.02;     // internal factor so dense output also meets tol
    long max_steps = 80000000;
    double escape_norm = 0.0; // abort when ||y||_inf exceeds this (0 = off)
};

// Called after every accepted step. dense(theta, out) evaluates the
// order-4 continuous extension at t_old + theta * h, theta in [0, 1].
using StepCallback =
    std::function<void(double t_old, double t_new, const double* y_new, const double* f_new,
                       const std::function<void(double, double*)>& dense)>;

struct OdeOutcome {
    bool complete = false;
    std::string error;
    double t_reached = 0.0;
    IntegratorStats stats;
};

// Adaptive Dormand-Prince 5(4). Integrates from t0 to t1 (either direction);
// y0 is overwritten with the final state reached.
OdeOutcome integrate_adaptive(const Rhs& rhs, int dim, std::vector<double>& y0, double t0, double t1,
                              const OdeOptions& opts, const StepCallback& on_step);

} // namespace rotvec

#endif
