#include "tongue.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "errors.hpp"
#include "threads.hpp"

namespace rotvec {

PerturbationVerdict perturbation_criterion(const Field& f, const std::vector<double>& x0,
                                           const std::vector<double>& rho, const ZetaFn& zeta,
                                           double T, const PerturbationOptions& opts) {
    if (!(T >= 100.0)) throw argument_error("perturbation_criterion: horizon must be >= 100");
    PsiSystem sys = perturbation_system(f, x0, rho, zeta);
    std::vector<double> times;
    times.reserve(2 * opts.samples + 1);
    for (int k = opts.samples; k >= 1; --k) times.push_back(-T * k / opts.samples);
    times.push_back(0.0);
    for (int k = 1; k <= opts.samples; ++k) times.push_back(T * k / opts.samples);

    auto curves = psi_quadrature_curves(sys, times, opts.quad_h);
    PerturbationVerdict v;
    v.locked = true;
    const int n = f.dim;
    v.per_index.resize(n);
    for (int i = 1; i <= n; ++i) {
        std::vector<double> diff(times.size());
        for (size_t k = 0; k < times.size(); ++k)
            diff[k] = curves[0].values[k] - curves[i].values[k];
        v.per_index[i - 1] =
            dyadic_window_test(times, diff, opts.slope_tol, WindowMode::AbsSup, true);
        v.locked = v.locked && v.per_index[i - 1].pass;
        v.sup = std::max(v.sup, v.per_index[i - 1].sup);
    }
    return v;
}

std::vector<double> rational_targets(double lo, double hi, int qmax) {
    std::vector<double> out;
    for (int q = 1; q <= qmax; ++q) {
        const long pmin = static_cast<long>(std::ceil(lo * q - 1e-12));
        const long pmax = static_cast<long>(std::floor(hi * q + 1e-12));
        for (long p = pmin; p <= pmax; ++p) {
            if (q > 1 && std::gcd(std::abs(p), static_cast<long>(q)) != 1) continue;
            out.push_back(static_cast<double>(p) / q);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

TongueGrid tongue_scan(const FamilyFn& family, const std::vector<double>& axis1,
                       const std::vector<double>& axis2, const TongueOptions& opts) {
    if (axis1.empty() || axis2.empty()) throw argument_error("tongue_scan: empty axis");
    TongueGrid grid;
    grid.axis1 = axis1;
    grid.axis2 = axis2;
    grid.opts = opts;
    grid.cells.resize(axis1.size() * axis2.size());

    const long total = static_cast<long>(grid.cells.size());
    const int threads = thread_budget(opts.threads);

    parallel_for(total, threads, [&](long idx) {
        const size_t i1 = static_cast<size_t>(idx) % axis1.size();
        const size_t i2 = static_cast<size_t>(idx) / axis1.size();
        TongueCell& cell = grid.cells[idx];
        cell.p1 = axis1[i1];
        cell.p2 = axis2[i2];
        try {
            Field f = family(cell.p1, cell.p2);
            std::vector<double> x0 = opts.x0;
            if (x0.empty()) x0.assign(f.dim, 0.0);
            Trajectory traj = integrate(f, x0, 0.0, opts.horizon, opts.tol);
            if (!traj.complete) {
                cell.error = traj.failure;
                return;
            }
            RotationEstimate est = rotation_estimate(traj);
            cell.rho = est.lambda;
            cell.ok = true;
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
    });

    // lock classification (scalar rho families use the plateau targets)
    std::vector<double> targets = opts.targets;
    if (targets.empty()) {
        double lo = 0.0, hi = 0.0;
        bool any = false;
        for (const auto& cell : grid.cells)
            if (cell.ok && cell.rho.size() == 1) {
                lo = any ? std::min(lo, cell.rho[0]) : cell.rho[0];
                hi = any ? std::max(hi, cell.rho[0]) : cell.rho[0];
                any = true;
            }
        if (any) targets = rational_targets(lo - 1e-9, hi + 1e-9);
    }
    for (auto& cell : grid.cells) {
        if (!cell.ok || cell.rho.size() != 1) continue;
        for (double tgt : targets)
            if (std::abs(cell.rho[0] - tgt) <= opts.lock_tol) {
                cell.locked = true;
                cell.target = tgt;
                break;
            }
    }
    return grid;
}

} // namespace rotvec
