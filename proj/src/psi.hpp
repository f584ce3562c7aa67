#ifndef ROTVEC_PSI_HPP
#define ROTVEC_PSI_HPP

#include <functional>
#include <string>
#include <vector>

#include "field.hpp"

namespace rotvec {

/// A curve t -> mu(t) with its derivative available in closed form.
struct Path {
    int dim = 0;
    std::function<void(double t, double* out)> mu;
    std::function<void(double t, double* out)> mu_dot;
};

// mu(t) = x0 + z t
Path affine_path(std::vector<double> z, std::vector<double> x0);

/// One family of scalar weighted-integral problems indexed by i = 0..q:
///
///   Psi_i(t) = int_0^t A_i(s) exp( int_s^t K_i(nu) dnu ) ds,
///
/// equivalently the solution of psi' = A_i(t) + K_i(t) psi, psi(0) = 0.
/// The batched evaluators fill all q+1 values at once so that one field or
/// Jacobian evaluation is shared across the family.
struct PsiSystem {
    int q = 0;
    std::function<void(double s, double* a)> sources;  // A_i(s), i = 0..q
    std::function<void(double nu, double* k)> kernels; // K_i(nu) = (1/q) sigma(I_i ... I_i)
};

// Kernels sigma(I_i df(nu rho + x0) I_i)/n, sources sigma(I_i (rho - f(s rho + x0))).
PsiSystem main_result_system(const Field& f, std::vector<double> x0, std::vector<double> rho);

// I_z-conjugated kernels along the ray nu z for a field on R^q; z in V_+^q.
PsiSystem normalized_ray_system(const Field& g, std::vector<double> z);

// Sources sigma(I_i zeta(s)); kernels as in main_result_system.
using ZetaFn = std::function<void(double t, double* out)>;
PsiSystem perturbation_system(const Field& f, std::vector<double> x0, std::vector<double> rho,
                              ZetaFn zeta);

// Sources sigma(I_i (mu'(t) - g(mu(t)))), kernels sigma(I_i dg(mu(t)) I_i)/q.
PsiSystem path_system(const Field& g, const Path& mu);

// A_i(rho, s) of the rotation vector formula (single value).
double coefficient_A(const Field& f, const std::vector<double>& x0, const std::vector<double>& rho,
                     int i, double s);

struct PsiCurve {
    int index = 0;
    std::string method; // "quadrature" | "ode"
    std::vector<double> times;
    std::vector<double> values;
};

// Composite-Simpson evaluation via the cumulative inner integral G, so the
// kernel is exp(G(t) - G(s)). Throws kernel_overflow when |G_i| > 700.
// times must be sorted ascending and may span both signs of zero.
std::vector<PsiCurve> psi_quadrature_curves(const PsiSystem& sys, const std::vector<double>& times,
                                            double h);
PsiCurve psi_quadrature_curve(const PsiSystem& sys, int i, const std::vector<double>& times, double h);
double psi_quadrature(const PsiSystem& sys, int i, double t, double h);

// Same curves by integrating the scalar linear ODEs with the shared
// adaptive integrator (all components propagated jointly).
std::vector<PsiCurve> psi_ode_curves(const PsiSystem& sys, const std::vector<double>& times,
                                     double tol);
PsiCurve psi_ode_curve(const PsiSystem& sys, int i, const std::vector<double>& times, double tol);

// Cumulative kernel integrals C_i(t) = int_0^t K_i(nu) dnu at the requested
// times (>= 0). With reflect the returned value is int_0^{-t} K_i(nu) dnu,
// the cumulative continued to negative times.
std::vector<std::vector<double>> kernel_cumulative_curves(const PsiSystem& sys,
                                                          const std::vector<double>& times, double h,
                                                          bool reflect = false);

// --- tau signs (Sign(0) = +1 convention) -----------------------------------

struct SignProfile {
    std::vector<int> tau;       // i = 1..q; -1 when the averaged kernel is >= 0
    std::vector<double> lambda; // raw sigma averages (without the 1/q factor)
    double horizon = 0.0;
};

SignProfile tau_signs_from_kernels(const PsiSystem& sys, double T, double h);
SignProfile tau_signs(const Field& g, const std::vector<double>& z, double T, double h = 1e-2);

// --- residuals of the rotation vector formula ------------------------------

struct ResidualReport {
    std::vector<double> rho;
    std::vector<double> times;           // log-spaced, <= T
    std::vector<std::vector<double>> R;  // R[i-1][k] = (Psi_0 - Psi_i)(t_k) / t_k
    std::vector<double> limit;           // constant fit over the last decade
    std::vector<double> limit_stderr;
    double horizon = 0.0;
};

ResidualReport residual_report(const Field& f, const std::vector<double>& x0,
                               const std::vector<double>& rho, double T, int samples = 40,
                               double h = 1e-3);

} // namespace rotvec

#endif
