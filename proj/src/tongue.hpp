#ifndef ROTVEC_TONGUE_HPP
#define ROTVEC_TONGUE_HPP

#include <functional>
#include <string>
#include <vector>

#include "field.hpp"
#include "flow.hpp"
#include "psi.hpp"

namespace rotvec {

// --- perturbation locking criterion ----------------------------------------

struct PerturbationVerdict {
    bool locked = false;
    std::vector<WindowTest> per_index; // |Psi_0[zeta] - Psi_i[zeta]| over [-T, T]
    double sup = 0.0;
};

struct PerturbationOptions {
    double quad_h = 1e-3;
    double slope_tol = 1e-3;
    int samples = 1025; // per side
};

// LOCKED iff sup |Psi_0[zeta](t) - Psi_i[zeta](t)| stays bounded for every i.
PerturbationVerdict perturbation_criterion(const Field& f, const std::vector<double>& x0,
                                           const std::vector<double>& rho, const ZetaFn& zeta,
                                           double T, const PerturbationOptions& opts = {});

// --- parameter-plane scan ---------------------------------------------------

struct TongueCell {
    double p1 = 0.0, p2 = 0.0;
    std::vector<double> rho;
    bool ok = false; // integration succeeded
    bool locked = false;
    double target = 0.0; // matched plateau value (valid when locked)
    std::string error;
};

struct TongueOptions {
    double horizon = 400.0;
    double tol = 1e-8;
    double lock_tol = 1e-3;
    std::vector<double> targets; // empty: rationals p/q, q <= 8, inside the observed range
    std::vector<double> x0;      // empty: origin
    int threads = 0;             // 0: ROTVEC_THREADS or hardware
};

struct TongueGrid {
    std::vector<double> axis1, axis2;
    std::vector<TongueCell> cells; // index = i2 * axis1.size() + i1
    TongueOptions opts;

    const TongueCell& at(size_t i1, size_t i2) const { return cells[i2 * axis1.size() + i1]; }
};

using FamilyFn = std::function<Field(double p1, double p2)>;

TongueGrid tongue_scan(const FamilyFn& family, const std::vector<double>& axis1,
                       const std::vector<double>& axis2, const TongueOptions& opts = {});

// Farey targets p/q with q <= qmax covering [lo, hi].
std::vector<double> rational_targets(double lo, double hi, int qmax = 8);

} // namespace rotvec

#endif
