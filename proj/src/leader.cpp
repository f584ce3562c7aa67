#include "leader.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace rotvec {

namespace {

std::vector<double> sample_times(double T, int count) {
    std::vector<double> t(count);
    for (int i = 0; i < count; ++i) t[i] = T * (i + 1) / static_cast<double>(count);
    return t;
}

double tail_drift(const std::vector<double>& times, const std::vector<double>& values) {
    // slope over the second half, where transients are gone
    std::vector<double> ts, vs;
    const double tmax = *std::max_element(times.begin(), times.end());
    for (size_t k = 0; k < times.size(); ++k)
        if (times[k] >= tmax / 2.0) {
            ts.push_back(times[k]);
            vs.push_back(values[k]);
        }
    return linear_drift_rate(ts, vs);
}

} // namespace

LeaderReport leader_check(const Field& g, const Path& mu, double T, const LeaderOptions& opts) {
    if (mu.dim != g.dim) throw argument_error("leader_check: path dimension mismatch");
    if (!(T >= 100.0)) throw argument_error("leader_check: horizon must be >= 100");
    const int q = g.dim;
    PsiSystem sys = path_system(g, mu);
    const std::vector<double> tpos = sample_times(T, opts.samples);

    LeaderReport rep;
    rep.note = "bullet 2 sup is one-sided in the tau_i orientation; bullets 1 and 3 are two-sided";

    // bullet 1: int_0^t sigma(dg(mu(nu))) dnu over both signs of t
    {
        auto Gf = kernel_cumulative_curves(sys, tpos, opts.quad_h, false);
        auto Gb = kernel_cumulative_curves(sys, tpos, opts.quad_h, true);
        std::vector<double> times, vals;
        for (size_t k = tpos.size(); k-- > 0;) {
            times.push_back(-tpos[k]);
            vals.push_back(q * Gb[0][k]); // reflected sweep yields int_0^{-t} directly
        }
        for (size_t k = 0; k < tpos.size(); ++k) {
            times.push_back(tpos[k]);
            vals.push_back(q * Gf[0][k]);
        }
        rep.bullet1.window = dyadic_window_test(times, vals, opts.slope_tol, WindowMode::AbsSup, true);
        std::vector<double> abs_vals(vals.size());
        for (size_t k = 0; k < vals.size(); ++k) abs_vals[k] = std::abs(vals[k]);
        rep.bullet1.drift_rate = tail_drift(times, abs_vals);
        rep.bullet1.pass = rep.bullet1.window.pass;
        rep.bullet1.tau = +1;
    }

    // bullet 2: tau_i int_0^t sigma(I_i dg(mu(tau_i nu)) I_i) dnu bounded above, t >= 0
    {
        SignProfile sp = tau_signs_from_kernels(sys, T, opts.quad_h);
        auto Gf = kernel_cumulative_curves(sys, tpos, opts.quad_h, false);
        auto Gb = kernel_cumulative_curves(sys, tpos, opts.quad_h, true);
        rep.bullet2.resize(q);
        for (int i = 1; i <= q; ++i) {
            const int tau = sp.tau[i - 1];
            std::vector<double> vals(tpos.size());
            // tau int_0^t sigma(I dg(mu(tau nu)) I) dnu equals q*Gf for tau=+1
            // and q*Gb for tau=-1 (the reflected sweep already carries the sign)
            for (size_t k = 0; k < tpos.size(); ++k)
                vals[k] = q * (tau == +1 ? Gf[i][k] : Gb[i][k]);
            BulletReport& b = rep.bullet2[i - 1];
            b.tau = tau;
            b.window = dyadic_window_test(tpos, vals, opts.slope_tol, WindowMode::RawSup, false);
            b.drift_rate = tail_drift(tpos, vals);
            b.pass = b.window.pass;
        }
    }

    // bullet 3: |psi_0 - psi_i| bounded over [-T, T]
    {
        std::vector<double> times;
        for (size_t k = tpos.size(); k-- > 0;) times.push_back(-tpos[k]);
        times.push_back(0.0);
        times.insert(times.end(), tpos.begin(), tpos.end());
        auto curves = psi_ode_curves(sys, times, opts.ode_tol);
        rep.bullet3.resize(q);
        for (int i = 1; i <= q; ++i) {
            std::vector<double> diff(times.size());
            for (size_t k = 0; k < times.size(); ++k)
                diff[k] = curves[0].values[k] - curves[i].values[k];
            BulletReport& b = rep.bullet3[i - 1];
            b.tau = rep.bullet2[i - 1].tau;
            b.window = dyadic_window_test(times, diff, opts.slope_tol, WindowMode::AbsSup, true);
            std::vector<double> absdiff;
            std::vector<double> tfwd;
            for (size_t k = 0; k < times.size(); ++k)
                if (times[k] > 0.0) {
                    tfwd.push_back(times[k]);
                    absdiff.push_back(std::abs(diff[k]));
                }
            b.drift_rate = tail_drift(tfwd, absdiff);
            b.pass = b.window.pass;
        }
    }

    rep.pass = rep.bullet1.pass;
    for (const auto& b : rep.bullet2) rep.pass = rep.pass && b.pass;
    for (const auto& b : rep.bullet3) rep.pass = rep.pass && b.pass;
    return rep;
}

DistanceReport leader_distance(const Field& f, const Path& mu, double T, double tol,
                               double slope_tol) {
    if (mu.dim != f.dim) throw argument_error("leader_distance: path dimension mismatch");
    if (!(T >= 100.0)) throw argument_error("leader_distance: horizon must be >= 100");
    std::vector<double> x0(f.dim);
    mu.mu(0.0, x0.data());
    Trajectory traj = integrate(f, x0, -T, T, tol);
    if (!traj.complete) throw integration_failure("leader_distance: " + traj.failure, 0.0);

    std::vector<double> vals(traj.size()), pos(f.dim);
    for (size_t k = 0; k < traj.size(); ++k) {
        mu.mu(traj.t[k], pos.data());
        double m = 0.0;
        for (int i = 0; i < f.dim; ++i) m = std::max(m, std::abs(pos[i] - traj.x[k][i]));
        vals[k] = m;
    }
    DistanceReport rep;
    rep.window = dyadic_window_test(traj.t, vals, slope_tol, WindowMode::AbsSup, true);
    rep.D = rep.window.sup;
    rep.drift_rate = tail_drift(traj.t, vals);
    rep.pass = rep.window.pass;
    return rep;
}

} // namespace rotvec
