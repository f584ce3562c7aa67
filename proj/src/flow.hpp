#ifndef ROTVEC_FLOW_HPP
#define ROTVEC_FLOW_HPP

#include <string>
#include <vector>

#include "field.hpp"
#include "integrate.hpp"

namespace rotvec {

/// Time-stamped samples of a flow. Times are strictly increasing and always
/// include t = 0 (trajectories start at x0). For spans containing both signs
/// the negative branch is integrated backward from 0 and merged.
struct Trajectory {
    int dim = 0;
    std::vector<double> t;
    std::vector<std::vector<double>> x;  // states per sample
    std::vector<std::vector<double>> fx; // field values per sample (for interpolation)
    IntegratorStats stats;
    bool complete = true;
    std::string failure;

    size_t size() const { return t.size(); }
    // Cubic Hermite interpolation between bracketing samples.
    std::vector<double> state_at(double time) const;
    double forward_horizon() const { return t.empty() ? 0.0 : t.back(); }
    double backward_horizon() const { return t.empty() ? 0.0 : t.front(); }
};

struct SampleSpec {
    bool per_step = false; // store every accepted step
    int count = 4097;      // uniform dense-output samples per branch otherwise
};

// Flow of x' = f(x) from x(0) = x0 over [ta, tb] with 0 inside.
// Throws integration_failure carrying nothing; on step-size underflow the
// partial trajectory is returned with complete = false and failure set.
Trajectory integrate(const Field& f, const std::vector<double>& x0, double ta, double tb, double tol,
                     const SampleSpec& spec = {});

// Same machinery for an arbitrary RHS (used by the Riccati module).
Trajectory integrate_rhs(const Rhs& rhs, int dim, const std::vector<double>& y0, double ta, double tb,
                         double tol, const SampleSpec& spec = {}, double escape_norm = 0.0);

// --- dyadic-window slope test -------------------------------------------
//
// Operational proxy for "sup over R is finite": split (0, T] into dyadic
// windows (T/2^{m+1}, T/2^m], take the sup of the residual per window, and
// regress the sups against the window index ordered from small to large
// time scale. Bounded residuals give slope ~ 0; drift grows geometrically.

enum class WindowMode {
    AbsSup,  // sup of |r| must stay bounded
    RawSup,  // sup of r must stay bounded above (one-sided hypotheses)
};

struct WindowTest {
    std::vector<double> window_sup; // ordered small -> large time scale
    double slope = 0.0;             // least-squares slope per doubling
    double slope_tol = 1e-3;
    double sup = 0.0;               // global sup (the empirical D)
    bool pass = false;
    bool two_sided = false;
};

// Windows with fewer than min_count samples (and everything earlier) are
// folded into the initial chunk: they enter the sup but not the slope fit.
WindowTest dyadic_window_test(const std::vector<double>& times, const std::vector<double>& values,
                              double slope_tol = 1e-3, WindowMode mode = WindowMode::AbsSup,
                              bool two_sided = false, int max_windows = 6, int min_count = 16);

// Least-squares slope of values against times (drift-rate diagnostic).
double linear_drift_rate(const std::vector<double>& times, const std::vector<double>& values);

// --- rotation vector ------------------------------------------------------

struct RotationEstimate {
    std::vector<double> lambda;
    double residual_sup = 0.0;
    std::vector<double> window_sups;
    double horizon = 0.0;
};

// Tail secant (x(T) - x(T/2)) / (T/2); discards the transient half.
// Requires |horizon| >= 100; uses the longer side of two-sided trajectories.
RotationEstimate rotation_estimate(const Trajectory& traj);

// Dyadic-window verdict on ||x(t) - x(0) - lambda t||.
WindowTest boundedness_test(const Trajectory& traj, const std::vector<double>& lambda,
                            double slope_tol = 1e-3);

} // namespace rotvec

#endif
