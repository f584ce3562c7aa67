#include "flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.hpp"

namespace rotvec {

std::vector<double> Trajectory::state_at(double time) const {
    if (t.empty()) throw compute_error("state_at: empty trajectory");
    if (time <= t.front()) return x.front();
    if (time >= t.back()) return x.back();
    const auto it = std::upper_bound(t.begin(), t.end(), time);
    const size_t hi = static_cast<size_t>(it - t.begin());
    const size_t lo = hi - 1;
    const double h = t[hi] - t[lo];
    const double th = (time - t[lo]) / h;
    const double th2 = th * th, th3 = th2 * th;
    const double h00 = 2 * th3 - 3 * th2 + 1, h10 = th3 - 2 * th2 + th;
    const double h01 = -2 * th3 + 3 * th2, h11 = th3 - th2;
    std::vector<double> out(dim);
    for (int i = 0; i < dim; ++i)
        out[i] = h00 * x[lo][i] + h * h10 * fx[lo][i] + h01 * x[hi][i] + h * h11 * fx[hi][i];
    return out;
}

namespace {

// Integrate one branch (t goes from 0 to tb, either sign) and append samples.
void run_branch(const Rhs& rhs, int dim, const std::vector<double>& y0, double tb, double tol,
                const SampleSpec& spec, double escape_norm, Trajectory& traj) {
    if (tb == 0.0) return;
    std::vector<double> y = y0;
    OdeOptions opts;
    opts.tol = tol;
    opts.escape_norm = escape_norm;

    std::vector<double> targets;
    if (!spec.per_step) {
        const int m = std::max(2, spec.count);
        targets.resize(m);
        for (int i = 0; i < m; ++i) targets[i] = tb * (i + 1) / static_cast<double>(m);
    }
    size_t next = 0;
    std::vector<double> buf(dim), fbuf(dim);

    StepCallback cb = [&](double t_old, double t_new, const double* y_new, const double* f_new,
                          const std::function<void(double, double*)>& dense) {
        if (spec.per_step) {
            traj.t.push_back(t_new);
            traj.x.emplace_back(y_new, y_new + dim);
            traj.fx.emplace_back(f_new, f_new + dim);
            return;
        }
        const double h = t_new - t_old;
        while (next < targets.size()) {
            const double tt = targets[next];
            const bool inside = (h > 0) ? (tt <= t_new + 1e-14 * std::abs(t_new))
                                        : (tt >= t_new - 1e-14 * std::abs(t_new));
            if (!inside) break;
            const double theta = std::clamp((tt - t_old) / h, 0.0, 1.0);
            dense(theta, buf.data());
            rhs(tt, buf.data(), fbuf.data());
            traj.t.push_back(tt);
            traj.x.push_back(buf);
            traj.fx.push_back(fbuf);
            ++next;
        }
    };

    OdeOutcome oc = integrate_adaptive(rhs, dim, y, 0.0, tb, opts, cb);
    traj.stats.steps += oc.stats.steps;
    traj.stats.accepted += oc.stats.accepted;
    traj.stats.rejected += oc.stats.rejected;
    traj.stats.tol = tol;
    if (!oc.complete) {
        traj.complete = false;
        traj.failure = oc.error;
    }
}

Trajectory assemble(const Rhs& rhs, int dim, const std::vector<double>& y0, double ta, double tb,
                    double tol, const SampleSpec& spec, double escape_norm) {
    if (!(ta <= 0.0 && tb >= 0.0)) throw argument_error("integrate: time span must contain 0");
    if (!(tol > 0.0)) throw argument_error("integrate: tolerance must be positive");
    std::vector<double> f0(dim);
    rhs(0.0, y0.data(), f0.data());

    Trajectory traj;
    traj.dim = dim;

    // backward branch first so times come out increasing
    Trajectory back;
    back.dim = dim;
    if (ta < 0.0) run_branch(rhs, dim, y0, ta, tol, spec, escape_norm, back);
    for (size_t i = back.t.size(); i-- > 0;) {
        traj.t.push_back(back.t[i]);
        traj.x.push_back(std::move(back.x[i]));
        traj.fx.push_back(std::move(back.fx[i]));
    }
    traj.t.push_back(0.0);
    traj.x.push_back(y0);
    traj.fx.push_back(f0);
    if (tb > 0.0) run_branch(rhs, dim, y0, tb, tol, spec, escape_norm, traj);

    traj.stats.steps += back.stats.steps;
    traj.stats.accepted += back.stats.accepted;
    traj.stats.rejected += back.stats.rejected;
    traj.stats.tol = tol;
    if (!back.complete) {
        traj.complete = false;
        traj.failure = back.failure;
    }
    return traj;
}

} // namespace

Trajectory integrate(const Field& f, const std::vector<double>& x0, double ta, double tb, double tol,
                     const SampleSpec& spec) {
    if (static_cast<int>(x0.size()) != f.dim) throw argument_error("integrate: x0 dimension mismatch");
    Rhs rhs = [&f](double, const double* y, double* dy) { f.eval(y, dy); };
    return assemble(rhs, f.dim, x0, ta, tb, tol, spec, 0.0);
}

Trajectory integrate_rhs(const Rhs& rhs, int dim, const std::vector<double>& y0, double ta, double tb,
                         double tol, const SampleSpec& spec, double escape_norm) {
    return assemble(rhs, dim, y0, ta, tb, tol, spec, escape_norm);
}

WindowTest dyadic_window_test(const std::vector<double>& times, const std::vector<double>& values,
                              double slope_tol, WindowMode mode, bool two_sided, int max_windows,
                              int min_count) {
    if (times.size() != values.size() || times.empty())
        throw argument_error("dyadic_window_test: mismatched or empty inputs");
    WindowTest wt;
    wt.slope_tol = slope_tol;
    wt.two_sided = two_sided;
    double T = 0.0;
    for (double tt : times) T = std::max(T, two_sided ? std::abs(tt) : tt);
    if (T <= 0.0) throw argument_error("dyadic_window_test: no positive horizon");

    const int J = max_windows;
    std::vector<double> sup(J, -std::numeric_limits<double>::infinity());
    std::vector<int> count(J, 0);
    double global = -std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < times.size(); ++k) {
        const double tt = two_sided ? std::abs(times[k]) : times[k];
        if (tt < 0.0) continue;
        const double v = (mode == WindowMode::AbsSup) ? std::abs(values[k]) : values[k];
        global = std::max(global, v);
        if (tt <= 0.0) continue;
        int m = static_cast<int>(std::floor(std::log2(T / tt))); // window (T/2^{m+1}, T/2^m]
        if (m >= J) continue; // initial chunk: counted in the sup only
        m = std::max(m, 0);
        sup[m] = std::max(sup[m], v);
        ++count[m];
    }
    // keep only a contiguous run of adequately-sampled windows from the
    // largest time scale down; sparse early windows join the initial chunk
    int last = -1;
    for (int m = 0; m < J; ++m) {
        if (count[m] < min_count) break;
        last = m;
    }
    if (last < 1) { // too few samples for dyadic windows; fit over all of them
        for (int m = 0; m < J; ++m)
            if (count[m] > 0) last = m;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int m = last; m >= 0; --m) {
        if (count[m] == 0) continue;
        const double kk = static_cast<double>(last - m);
        const double v = sup[m];
        wt.window_sup.push_back(v);
        sx += kk;
        sy += v;
        sxx += kk * kk;
        sxy += kk * v;
        ++cnt;
    }
    wt.sup = global;
    if (cnt >= 2) {
        const double det = cnt * sxx - sx * sx;
        wt.slope = (det != 0.0) ? (cnt * sxy - sx * sy) / det : 0.0;
    }
    wt.pass = wt.slope <= slope_tol;
    return wt;
}

double linear_drift_rate(const std::vector<double>& times, const std::vector<double>& values) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(times.size());
    for (size_t k = 0; k < times.size(); ++k) {
        sx += times[k];
        sy += values[k];
        sxx += times[k] * times[k];
        sxy += times[k] * values[k];
    }
    const double det = n * sxx - sx * sx;
    return (det != 0.0) ? (n * sxy - sx * sy) / det : 0.0;
}

RotationEstimate rotation_estimate(const Trajectory& traj) {
    const double fwd = traj.forward_horizon();
    const double bwd = traj.backward_horizon();
    const double H = (fwd >= -bwd) ? fwd : bwd; // signed horizon, longer side
    if (std::abs(H) < 100.0)
        throw argument_error("rotation_estimate: horizon must be >= 100");

    const std::vector<double> xT = traj.state_at(H);
    const std::vector<double> xH = traj.state_at(H / 2.0);
    RotationEstimate est;
    est.horizon = H;
    est.lambda.resize(traj.dim);
    for (int i = 0; i < traj.dim; ++i) est.lambda[i] = (xT[i] - xH[i]) / (H - H / 2.0);

    WindowTest wt = boundedness_test(traj, est.lambda);
    est.window_sups = wt.window_sup;
    est.residual_sup = wt.sup;
    return est;
}

WindowTest boundedness_test(const Trajectory& traj, const std::vector<double>& lambda,
                            double slope_tol) {
    if (static_cast<int>(lambda.size()) != traj.dim)
        throw argument_error("boundedness_test: lambda dimension mismatch");
    const size_t i0 = static_cast<size_t>(std::lower_bound(traj.t.begin(), traj.t.end(), 0.0) -
                                          traj.t.begin());
    if (i0 >= traj.size()) throw argument_error("boundedness_test: trajectory has no t >= 0 sample");
    const std::vector<double>& x0 = traj.x[i0];
    std::vector<double> r(traj.size());
    for (size_t k = 0; k < traj.size(); ++k) {
        double m = 0.0;
        for (int i = 0; i < traj.dim; ++i)
            m = std::max(m, std::abs(traj.x[k][i] - x0[i] - lambda[i] * traj.t[k]));
        r[k] = m;
    }
    const bool two_sided = traj.backward_horizon() < 0.0;
    return dyadic_window_test(traj.t, r, slope_tol, WindowMode::AbsSup, two_sided);
}

} // namespace rotvec
