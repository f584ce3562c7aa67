#ifndef ROTVEC_FIELD_HPP
#define ROTVEC_FIELD_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "algebra.hpp"

namespace rotvec {

/// A C^2 vector field on R^n, 1-periodic in every coordinate for the shipped
/// models. Evaluators take raw pointers so integrator hot loops stay
/// allocation-free. jac fills a row-major n x n matrix; when absent, callers
/// fall back to fd_jacobian.
struct Field {
    int dim = 0;
    std::string name;
    std::vector<double> params;

    std::function<void(const double* x, double* fx)> eval;
    std::function<void(const double* x, double* jac)> jac; // may be empty

    double sup_norm = 0.0;  // bound for ||f||_inf over the unit cell
    double jac_norm = 0.0;  // bound for ||df||_inf
    double hess_norm = 0.0; // bound for ||d^2 f||_inf

    bool has_analytic_jacobian() const { return static_cast<bool>(jac); }
    void jacobian(const double* x, double* out) const; // analytic or central differences
};

struct ModelSpec {
    std::string model; // constant | circle | torus-product | winfree-type
    int dim = 0;
    std::vector<double> omega; // constant, winfree-type
    std::vector<double> c;     // circle (size 1), torus-product
    std::vector<double> eps;   // circle (size 1), torus-product
    double kappa = 0.0;        // winfree-type
};

Field make_constant(std::vector<double> omega);
Field make_circle(double c, double eps);
Field make_torus_product(std::vector<double> c, std::vector<double> eps);
Field make_winfree(std::vector<double> omega, double kappa);
Field make_model(const ModelSpec& spec);

// Central-difference Jacobian, step h_i = cbrt(eps_machine) * (1 + |x_i|).
void fd_jacobian(const Field& f, const double* x, double* out);

struct CheckReport {
    double max_deviation = 0.0;
    double tolerance = 0.0;
    int samples = 0;
    bool pass = false;
};

// max over random x and coordinates j of ||f(x+e_j) - f(x)||_inf; tol 1e-10.
CheckReport periodicity_check(const Field& f, int sample_count, uint64_t seed = 20240901);

// analytic Jacobian vs central differences with step 1e-6; tol 1e-5.
CheckReport jacobian_check(const Field& f, int sample_count, uint64_t seed = 20240902);

} // namespace rotvec

#endif
