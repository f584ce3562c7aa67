#ifndef ROTVEC_RICCATI_HPP
#define ROTVEC_RICCATI_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "field.hpp"
#include "flow.hpp"
#include "psi.hpp"

namespace rotvec {

/// y' = A(t) + B(t) y + y^T H(t) y with y(0) = 0. The quadratic term is the
/// vector whose i-th entry is y^T H_i(t) y with H_i the i-th slice of the
/// q x q x q tensor (slice-major layout).
struct RiccatiSystem {
    int q = 0;
    double gamma = 0.0; // declared bound: max{||H||, ||B||} <= gamma < 1
    std::string name;
    std::function<void(double t, double* a)> A; // q values
    std::function<void(double t, double* b)> B; // q*q row-major
    std::function<void(double t, double* h)> H; // q*q*q slice-major

    void rhs(double t, const double* y, double* dy) const;
};

// Spot-checks the declared gamma bound on sampled t; throws on violation.
void validate_riccati(const RiccatiSystem& sys, int samples = 64, double t_range = 100.0);

RiccatiSystem riccati_zero(int q);
RiccatiSystem riccati_constant(int q, std::vector<double> a, std::vector<double> b,
                               std::vector<double> h, double gamma);

// Quasi-periodic trigonometric family with rationally independent frequency
// sets for A and B, zero means, ||B||, ||H|| scaled to gamma. Deterministic
// in the seed and built to satisfy the boundedness hypotheses.
RiccatiSystem riccati_trig(int q, double gamma, uint64_t seed);

// The drifting counterexample: every entry of B identically 0.1.
RiccatiSystem riccati_counterexample_b(int q);

// Simulation with blow-up detection (escape norm 1e6); y(0) = 0.
Trajectory riccati_simulate(const RiccatiSystem& sys, double ta, double tb, double tol = 1e-10,
                            const SampleSpec& spec = {});

struct HypothesisPart {
    WindowTest window;
    int tau = -1;
    double sup = 0.0;
    bool pass = false;
};

struct HypothesisReport {
    HypothesisPart h1_trace;             // |int sigma(B)| bounded, two-sided
    std::vector<HypothesisPart> h1_conj; // per i, one-sided with tau_i
    std::vector<HypothesisPart> h2;      // per i, |psi_0 - psi_i| bounded
    bool h1_pass = false;
    bool h2_pass = false;
    bool pass = false;
};

struct HypothesisOptions {
    double quad_h = 1e-2;
    double ode_tol = 1e-10;
    double slope_tol = 1e-3;
    int samples = 2049;
};

HypothesisReport hypothesis_check(const RiccatiSystem& sys, double T,
                                  const HypothesisOptions& opts = {});

struct BoundednessVerdict {
    bool pass = false;
    bool blow_up = false;
    double sup = 0.0;
    WindowTest window;
};

BoundednessVerdict boundedness_verdict(const RiccatiSystem& sys, double T, double tol = 1e-10,
                                       double slope_tol = 1e-3);

// Riccati system of the flow linearized around mu, scaled so the declared
// gamma is below the smallness threshold:
//   A(t) = eps^3 [mu'(eps t) - f(mu(eps t))],  B(t) = eps^2 df(mu(eps t)),
//   H a constant tensor with ||H|| = eps ||d^2 f||.
RiccatiSystem linearize(const Field& f, const Path& mu, double threshold = 0.1);

} // namespace rotvec

#endif
