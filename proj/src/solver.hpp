#ifndef ROTVEC_SOLVER_HPP
#define ROTVEC_SOLVER_HPP

#include <string>
#include <vector>

#include "field.hpp"
#include "psi.hpp"

namespace rotvec {

/// Autonomous suspension of the normalization change of variables: a field on
/// R^{q}, q = n+1, with components
///   g_i(z, w) = c + gamma * f_i(z + x0 - w 1),   i = 1..n,
///   g_q(z, w) = c,
/// 1-periodic in every coordinate, all components bounded below by c - gamma ||f||.
struct NormalizedField {
    Field g;
    int n = 0; // original dimension; g.dim == n + 1
    double c = 0.0;
    double gamma = 0.0;
    double beta = 0.0;
    std::vector<double> x0;
    double g_sup = 0.0;   // bound for ||g||_inf
    double g_inf = 0.0;   // lower bound for min_i inf g_i
    double dg_bound = 0.0; // bound for ||dg||_inf
};

NormalizedField normalize(const Field& f, const std::vector<double>& x0, double c, double gamma,
                          double beta);

// z_i > 1 for all i and ||z||_inf <= (L-1) ||g||_inf.
bool in_VL(const NormalizedField& nf, const std::vector<double>& z, double L);

struct ThetaPair {
    double theta0 = 0.0;      // theta_0^i(z, k, s)
    double theta_i = 0.0;     // theta_i(z, k, s)
    double theta_under = 0.0; // theta0 - theta_i
    int tau = -1;
};

// Exponential kernels of the finite-horizon map, 0 <= s <= k.
ThetaPair theta_kernels(const NormalizedField& nf, const std::vector<double>& z, double k, double s,
                        int i, double h = 0.05);

struct GammaState {
    std::vector<double> z;
    int k = 0;
    std::vector<double> image;  // Gamma_k(z)
    std::vector<double> zeta;   // integral-mean zeta_i diagnostics
    std::vector<double> lambda; // forward kernel averages used for tau
    std::vector<int> tau;
    bool in_VL = false;
};

GammaState gamma_map(const NormalizedField& nf, const std::vector<double>& z, int k, double h = 0.05,
                     double L = 2.0);

struct SolveOptions {
    double gamma = 0.05;
    double c = 0.0; // <= 0 selects the default 2 + beta + gamma ||f||
    double beta = 0.5;
    double L = 2.0;
    std::vector<int> k_schedule; // empty selects {25, 50, 100, 200, 400, 800}
    double tol = 1e-9;           // fixed-point residual target per k
    double alpha = 0.5;          // damping
    int max_iters = 80;
    double quad_h = 0.05;
    double smallness = 0.1; // require gamma * ||df|| <= smallness
    bool with_certificate = true;
    double certificate_T = 200.0;
    int certificate_samples = 32;
    double certificate_h = 1e-3;
    double certificate_tol = 1e-3;
};

struct FixedPointResult {
    std::vector<double> rho_star;          // fixed point at the final horizon
    std::vector<int> ks;                   // the schedule
    std::vector<std::vector<double>> rho_k; // per-k fixed points
    std::vector<double> residuals;          // final residual per k
    std::vector<double> residual_history;   // all iteration residuals
    std::vector<int> iterations;            // per k
    GammaState last_state;
};

FixedPointResult fixed_point(const NormalizedField& nf, const SolveOptions& opts);

struct SolveResult {
    std::vector<double> rho;
    double c = 0.0;
    double gamma = 0.0;
    double suspension_residual = 0.0; // |rho*_{n+1} - c|
    FixedPointResult fp;
    ResidualReport certificate;
    bool certificate_ok = true;
    std::vector<std::string> warnings;
};

SolveResult solve_rotation_formula(const Field& f, const std::vector<double>& x0, SolveOptions opts);

// Both admissibility inequalities for L at this gamma; violations reported
// as warning strings (empty = admissible).
std::vector<std::string> check_L_inequalities(const NormalizedField& nf, double L);

} // namespace rotvec

#endif
