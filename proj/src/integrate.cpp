#include "integrate.hpp"

#include <algorithm>
#include <cmath>

namespace rotvec {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output weights (Hairer, Norsett & Wanner).
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

} // namespace

OdeOutcome integrate_adaptive(const Rhs& rhs, int dim, std::vector<double>& y, double t0, double t1,
                              const OdeOptions& opts, const StepCallback& on_step) {
    OdeOutcome out;
    out.stats.tol = opts.tol;
    out.t_reached = t0;
    if (t1 == t0) {
        out.complete = true;
        return out;
    }
    const double dir = (t1 > t0) ? 1.0 : -1.0;
    const double tol = std::max(opts.tol * opts.safety, 1e-16);
    const int n = dim;

    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), yerr(n);
    std::vector<double> r1(n), r2(n), r3(n), r4(n), r5(n);

    double t = t0;
    rhs(t, y.data(), k1.data());

    // Initial step size: conservative power rule on the first derivative scale.
    double h;
    {
        double dnf = 0.0, dny = 0.0;
        for (int i = 0; i < n; ++i) {
            const double sk = tol + tol * std::abs(y[i]);
            dnf += (k1[i] / sk) * (k1[i] / sk);
            dny += (y[i] / sk) * (y[i] / sk);
        }
        double h0 = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
        h0 = std::min(h0, std::abs(t1 - t0));
        // one explicit Euler probe to estimate the second derivative
        for (int i = 0; i < n; ++i) ytmp[i] = y[i] + dir * h0 * k1[i];
        rhs(t + dir * h0, ytmp.data(), k2.data());
        double der2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double sk = tol + tol * std::abs(y[i]);
            const double d = (k2[i] - k1[i]) / sk;
            der2 += d * d;
        }
        der2 = std::sqrt(der2) / h0;
        const double der12 = std::max(der2, std::sqrt(dnf));
        double h1 = (der12 <= 1e-15) ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / der12, 0.2);
        h = std::min({100.0 * h0, h1, std::abs(t1 - t0)});
    }

    bool last_rejected = false;
    while (dir * (t1 - t) > 0.0) {
        if (out.stats.steps >= opts.max_steps) {
            out.error = "integration failure: maximum step count exceeded";
            return out;
        }
        if (h < 1e-14 * (std::abs(t) + 1.0)) {
            out.error = "integration failure: step size underflow";
            return out;
        }
        if (dir * (t + dir * h - t1) > 0.0) h = dir * (t1 - t);
        const double hs = dir * h;

        for (int i = 0; i < n; ++i) ytmp[i] = y[i] + hs * a21 * k1[i];
        rhs(t + c2 * hs, ytmp.data(), k2.data());
        for (int i = 0; i < n; ++i) ytmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * hs, ytmp.data(), k3.data());
        for (int i = 0; i < n; ++i) ytmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * hs, ytmp.data(), k4.data());
        for (int i = 0; i < n; ++i)
            ytmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * hs, ytmp.data(), k5.data());
        for (int i = 0; i < n; ++i)
            ytmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        rhs(t + hs, ytmp.data(), k6.data());
        for (int i = 0; i < n; ++i)
            ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        rhs(t + hs, ynew.data(), k7.data());
        ++out.stats.steps;

        double err = 0.0;
        for (int i = 0; i < n; ++i) {
            yerr[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sk = tol + tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (yerr[i] / sk) * (yerr[i] / sk);
        }
        err = std::sqrt(err / n);

        if (!std::isfinite(err)) {
            // Blow-up inside the step: shrink hard.
            h *= 0.1;
            last_rejected = true;
            ++out.stats.rejected;
            continue;
        }

        if (err <= 1.0) {
            const double t_old = t;
            const double t_new = t + hs;
            if (on_step) {
                for (int i = 0; i < n; ++i) {
                    const double ydiff = ynew[i] - y[i];
                    const double bspl = hs * k1[i] - ydiff;
                    r1[i] = y[i];
                    r2[i] = ydiff;
                    r3[i] = bspl;
                    r4[i] = ydiff - hs * k7[i] - bspl;
                    r5[i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                                  d7 * k7[i]);
                }
                auto dense = [&](double theta, double* o) {
                    const double th1 = 1.0 - theta;
                    for (int i = 0; i < n; ++i)
                        o[i] = r1[i] + theta * (r2[i] + th1 * (r3[i] + theta * (r4[i] + th1 * r5[i])));
                };
                on_step(t_old, t_new, ynew.data(), k7.data(), dense);
            }
            t = t_new;
            y.swap(ynew);
            k1.swap(k7);
            ++out.stats.accepted;
            out.t_reached = t;
            if (opts.escape_norm > 0.0) {
                double nrm = 0.0;
                for (int i = 0; i < n; ++i) nrm = std::max(nrm, std::abs(y[i]));
                if (nrm > opts.escape_norm) {
                    out.error = "integration failure: solution norm escaped bound";
                    return out;
                }
            }
            double fac = 0.9 * std::pow(err, -0.2);
            fac = std::min(last_rejected ? 1.0 : 5.0, std::max(0.2, fac));
            h *= fac;
            last_rejected = false;
        } else {
            ++out.stats.rejected;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            last_rejected = true;
        }
    }
    out.complete = true;
    return out;
}

} // namespace rotvec
