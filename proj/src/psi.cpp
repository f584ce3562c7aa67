#include "psi.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "integrate.hpp"

namespace rotvec {

namespace {

constexpr double kOverflowGuard = 700.0;

void check_dim(const Field& f, const std::vector<double>& v, const char* what) {
    if (static_cast<int>(v.size()) != f.dim) throw argument_error(std::string(what) + ": dimension mismatch");
}

// sigma(I_i u) for all i at once: out[0] = total, out[i] = total - 2 u_{i-1}.
void signed_sums_all(const std::vector<double>& u, double* out) {
    double total = 0.0;
    for (double v : u) total += v;
    out[0] = total;
    for (size_t i = 0; i < u.size(); ++i) out[i + 1] = total - 2.0 * u[i];
}

} // namespace

Path affine_path(std::vector<double> z, std::vector<double> x0) {
    if (z.size() != x0.size() || z.empty()) throw argument_error("affine_path: inconsistent dimensions");
    Path p;
    const int n = static_cast<int>(z.size());
    p.dim = n;
    p.mu = [z, x0, n](double t, double* out) {
        for (int i = 0; i < n; ++i) out[i] = x0[i] + z[i] * t;
    };
    p.mu_dot = [z, n](double, double* out) {
        for (int i = 0; i < n; ++i) out[i] = z[i];
    };
    return p;
}

PsiSystem main_result_system(const Field& f, std::vector<double> x0, std::vector<double> rho) {
    check_dim(f, x0, "main_result_system x0");
    check_dim(f, rho, "main_result_system rho");
    PsiSystem sys;
    const int n = f.dim;
    sys.q = n;
    sys.sources = [&f, x0, rho, n, arg = std::vector<double>(n), u = std::vector<double>(n)](
                      double s, double* a) mutable {
        for (int i = 0; i < n; ++i) arg[i] = s * rho[i] + x0[i];
        f.eval(arg.data(), u.data());
        for (int i = 0; i < n; ++i) u[i] = rho[i] - u[i];
        signed_sums_all(u, a);
    };
    sys.kernels = [&f, x0, rho, n, arg = std::vector<double>(n),
                   jac = std::vector<double>(static_cast<size_t>(n) * n)](double nu, double* k) mutable {
        for (int i = 0; i < n; ++i) arg[i] = nu * rho[i] + x0[i];
        f.jacobian(arg.data(), jac.data());
        conjugated_sums_all(n, jac, k);
        for (int i = 0; i <= n; ++i) k[i] /= n;
    };
    return sys;
}

PsiSystem normalized_ray_system(const Field& g, std::vector<double> z) {
    check_dim(g, z, "normalized_ray_system z");
    if (!strictly_positive(z)) throw argument_error("normalized_ray_system: z must lie in the open cone");
    PsiSystem sys;
    const int q = g.dim;
    sys.q = q;
    sys.sources = [&g, z, q, arg = std::vector<double>(q), u = std::vector<double>(q)](
                      double s, double* a) mutable {
        for (int i = 0; i < q; ++i) arg[i] = s * z[i];
        g.eval(arg.data(), u.data());
        for (int i = 0; i < q; ++i) u[i] = 1.0 - u[i] / z[i];
        signed_sums_all(u, a);
    };
    sys.kernels = [&g, z, q, arg = std::vector<double>(q),
                   jac = std::vector<double>(static_cast<size_t>(q) * q),
                   w = std::vector<double>(static_cast<size_t>(q) * q)](double nu, double* k) mutable {
        for (int i = 0; i < q; ++i) arg[i] = nu * z[i];
        g.jacobian(arg.data(), jac.data());
        for (int j = 0; j < q; ++j)
            for (int c = 0; c < q; ++c)
                w[static_cast<size_t>(j) * q + c] = jac[static_cast<size_t>(j) * q + c] * z[c] / z[j];
        conjugated_sums_all(q, w, k);
        for (int i = 0; i <= q; ++i) k[i] /= q;
    };
    return sys;
}

PsiSystem perturbation_system(const Field& f, std::vector<double> x0, std::vector<double> rho,
                              ZetaFn zeta) {
    PsiSystem sys = main_result_system(f, std::move(x0), std::move(rho));
    const int n = f.dim;
    sys.sources = [zeta = std::move(zeta), n, u = std::vector<double>(n)](double s, double* a) mutable {
        zeta(s, u.data());
        signed_sums_all(u, a);
    };
    return sys;
}

PsiSystem path_system(const Field& g, const Path& mu) {
    if (mu.dim != g.dim) throw argument_error("path_system: path dimension mismatch");
    PsiSystem sys;
    const int q = g.dim;
    sys.q = q;
    sys.sources = [&g, &mu, q, pos = std::vector<double>(q), vel = std::vector<double>(q),
                   u = std::vector<double>(q)](double t, double* a) mutable {
        mu.mu(t, pos.data());
        mu.mu_dot(t, vel.data());
        g.eval(pos.data(), u.data());
        for (int i = 0; i < q; ++i) u[i] = vel[i] - u[i];
        signed_sums_all(u, a);
    };
    sys.kernels = [&g, &mu, q, pos = std::vector<double>(q),
                   jac = std::vector<double>(static_cast<size_t>(q) * q)](double t, double* k) mutable {
        mu.mu(t, pos.data());
        g.jacobian(pos.data(), jac.data());
        conjugated_sums_all(q, jac, k);
        for (int i = 0; i <= q; ++i) k[i] /= q;
    };
    return sys;
}

double coefficient_A(const Field& f, const std::vector<double>& x0, const std::vector<double>& rho,
                     int i, double s) {
    if (i < 0 || i > f.dim) throw argument_error("coefficient_A: index out of range");
    PsiSystem sys = main_result_system(f, x0, rho);
    std::vector<double> a(static_cast<size_t>(f.dim) + 1);
    sys.sources(s, a.data());
    return a[i];
}

namespace {

// One-sided cumulative Simpson sweep over [0, t_max]. Requested times must be
// pair boundaries; each segment is subdivided into an even count of steps of
// size <= h. Fills per-index values of exp(G_i(t)) * H_i(t) at the requested
// times (with G also exposed for the kernel-cumulative use).
struct SweepOut {
    std::vector<std::vector<double>> psi; // [q+1][times]
    std::vector<std::vector<double>> G;   // [q+1][times]
};

SweepOut quad_sweep(const PsiSystem& sys, const std::vector<double>& times, double h, bool reflect,
                    bool want_psi) {
    const int q = sys.q;
    const int m = q + 1;
    SweepOut out;
    out.psi.assign(m, std::vector<double>(times.size(), 0.0));
    out.G.assign(m, std::vector<double>(times.size(), 0.0));
    if (times.empty()) return out;
    if (!(h > 0.0)) throw argument_error("psi quadrature: step must be positive");

    auto eval_kernels = [&](double s, double* k) {
        sys.kernels(reflect ? -s : s, k);
        if (reflect)
            for (int i = 0; i < m; ++i) k[i] = -k[i];
    };
    auto eval_sources = [&](double s, double* a) { sys.sources(reflect ? -s : s, a); };

    std::vector<double> G(m, 0.0), H(m, 0.0);
    std::vector<double> k0(m), k1(m), k2(m), a0(m), a1(m), a2(m);
    std::vector<double> F0(m), F1(m), F2(m), G1(m);

    double s_cur = 0.0;
    eval_kernels(0.0, k0.data());
    if (want_psi) {
        eval_sources(0.0, a0.data());
        for (int i = 0; i < m; ++i) F0[i] = a0[i]; // e^{-G(0)} = 1
    }

    size_t ti = 0;
    // leading requested time exactly 0
    while (ti < times.size() && times[ti] == 0.0) {
        for (int i = 0; i < m; ++i) {
            out.psi[i][ti] = 0.0;
            out.G[i][ti] = 0.0;
        }
        ++ti;
    }

    for (; ti < times.size(); ++ti) {
        const double t_target = times[ti];
        const double span = t_target - s_cur;
        const long pairs = std::max(1L, static_cast<long>(std::ceil(span / (2.0 * h))));
        const double step = span / (2.0 * pairs);
        for (long p = 0; p < pairs; ++p) {
            const double sa = s_cur + 2.0 * p * step;
            const double sb = sa + step;
            const double sc = (p + 1 == pairs) ? t_target : sa + 2.0 * step;
            eval_kernels(sb, k1.data());
            eval_kernels(sc, k2.data());
            if (want_psi) {
                eval_sources(sb, a1.data());
                eval_sources(sc, a2.data());
            }
            for (int i = 0; i < m; ++i) {
                const double g0 = G[i];
                G1[i] = g0 + (step / 12.0) * (5.0 * k0[i] + 8.0 * k1[i] - k2[i]);
                G[i] = g0 + (step / 3.0) * (k0[i] + 4.0 * k1[i] + k2[i]);
                if (std::abs(G[i]) > kOverflowGuard || std::abs(G1[i]) > kOverflowGuard)
                    throw kernel_overflow("psi kernel overflow (exponent beyond 700) at index " +
                                              std::to_string(i) + ", t = " + std::to_string(sc),
                                          i, sc);
            }
            if (want_psi) {
                for (int i = 0; i < m; ++i) {
                    F1[i] = std::exp(-G1[i]) * a1[i];
                    F2[i] = std::exp(-G[i]) * a2[i];
                    H[i] += (step / 3.0) * (F0[i] + 4.0 * F1[i] + F2[i]);
                    F0[i] = F2[i];
                }
                a0.swap(a2);
            }
            k0.swap(k2);
        }
        s_cur = t_target;
        for (int i = 0; i < m; ++i) {
            out.G[i][ti] = G[i];
            if (want_psi) out.psi[i][ti] = std::exp(G[i]) * H[i];
        }
    }
    return out;
}

// Split sorted times into negative and nonnegative parts, run both sweeps.
std::vector<std::vector<double>> quad_values(const PsiSystem& sys, const std::vector<double>& times,
                                             double h) {
    for (size_t k = 1; k < times.size(); ++k)
        if (times[k] < times[k - 1]) throw argument_error("psi curves: times must be sorted ascending");
    const int m = sys.q + 1;
    std::vector<std::vector<double>> vals(m, std::vector<double>(times.size(), 0.0));

    std::vector<double> pos, neg; // |t| for the negative side, ascending
    for (double tt : times) (tt >= 0.0 ? pos : neg).push_back(tt);
    std::reverse(neg.begin(), neg.end());
    for (double& v : neg) v = -v;

    if (!pos.empty()) {
        SweepOut so = quad_sweep(sys, pos, h, false, true);
        size_t j = 0;
        for (size_t k = 0; k < times.size(); ++k)
            if (times[k] >= 0.0) {
                for (int i = 0; i < m; ++i) vals[i][k] = so.psi[i][j];
                ++j;
            }
    }
    if (!neg.empty()) {
        SweepOut so = quad_sweep(sys, neg, h, true, true);
        // neg holds |t| ascending; map back to original positions (descending in time)
        size_t j = 0;
        for (size_t k = times.size(); k-- > 0;) {
            if (times[k] < 0.0) {
                for (int i = 0; i < m; ++i) vals[i][k] = -so.psi[i][j];
                ++j;
            }
        }
    }
    return vals;
}

} // namespace

std::vector<PsiCurve> psi_quadrature_curves(const PsiSystem& sys, const std::vector<double>& times,
                                            double h) {
    auto vals = quad_values(sys, times, h);
    std::vector<PsiCurve> out(sys.q + 1);
    for (int i = 0; i <= sys.q; ++i) {
        out[i].index = i;
        out[i].method = "quadrature";
        out[i].times = times;
        out[i].values = std::move(vals[i]);
    }
    return out;
}

PsiCurve psi_quadrature_curve(const PsiSystem& sys, int i, const std::vector<double>& times, double h) {
    if (i < 0 || i > sys.q) throw argument_error("psi_quadrature_curve: index out of range");
    return psi_quadrature_curves(sys, times, h)[i];
}

double psi_quadrature(const PsiSystem& sys, int i, double t, double h) {
    return psi_quadrature_curve(sys, i, {t}, h).values[0];
}

std::vector<PsiCurve> psi_ode_curves(const PsiSystem& sys, const std::vector<double>& times,
                                     double tol) {
    for (size_t k = 1; k < times.size(); ++k)
        if (times[k] < times[k - 1]) throw argument_error("psi curves: times must be sorted ascending");
    const int m = sys.q + 1;
    std::vector<PsiCurve> out(m);
    for (int i = 0; i < m; ++i) {
        out[i].index = i;
        out[i].method = "ode";
        out[i].times = times;
        out[i].values.assign(times.size(), 0.0);
    }

    Rhs rhs = [&sys, m, a = std::vector<double>(m), k = std::vector<double>(m)](
                  double t, const double* y, double* dy) mutable {
        sys.sources(t, a.data());
        sys.kernels(t, k.data());
        for (int i = 0; i < m; ++i) dy[i] = a[i] + k[i] * y[i];
    };

    for (int side = 0; side < 2; ++side) {
        std::vector<double> targets;
        std::vector<size_t> where;
        for (size_t kk = 0; kk < times.size(); ++kk) {
            const double tt = times[kk];
            if (side == 0 && tt < 0.0) {
                targets.push_back(tt);
                where.push_back(kk);
            } else if (side == 1 && tt > 0.0) {
                targets.push_back(tt);
                where.push_back(kk);
            }
        }
        if (targets.empty()) continue;
        if (side == 0) {
            std::reverse(targets.begin(), targets.end());
            std::reverse(where.begin(), where.end());
        }
        std::vector<double> y(m, 0.0), buf(m);
        size_t next = 0;
        OdeOptions opts;
        opts.tol = tol;
        StepCallback cb = [&](double t_old, double t_new, const double*, const double*,
                              const std::function<void(double, double*)>& dense) {
            const double hstep = t_new - t_old;
            while (next < targets.size()) {
                const double tt = targets[next];
                const bool inside = (hstep > 0) ? tt <= t_new + 1e-14 * std::abs(t_new)
                                                : tt >= t_new - 1e-14 * std::abs(t_new);
                if (!inside) break;
                dense(std::clamp((tt - t_old) / hstep, 0.0, 1.0), buf.data());
                for (int i = 0; i < m; ++i) out[i].values[where[next]] = buf[i];
                ++next;
            }
        };
        OdeOutcome oc = integrate_adaptive(rhs, m, y, 0.0, targets.back(), opts, cb);
        if (!oc.complete)
            throw integration_failure("psi_ode: " + oc.error, oc.t_reached);
    }
    return out;
}

PsiCurve psi_ode_curve(const PsiSystem& sys, int i, const std::vector<double>& times, double tol) {
    if (i < 0 || i > sys.q) throw argument_error("psi_ode_curve: index out of range");
    return psi_ode_curves(sys, times, tol)[i];
}

std::vector<std::vector<double>> kernel_cumulative_curves(const PsiSystem& sys,
                                                          const std::vector<double>& times, double h,
                                                          bool reflect) {
    for (double tt : times)
        if (tt < 0.0) throw argument_error("kernel_cumulative_curves: times must be >= 0");
    SweepOut so = quad_sweep(sys, times, h, reflect, false);
    return std::move(so.G);
}

SignProfile tau_signs_from_kernels(const PsiSystem& sys, double T, double h) {
    if (!(T >= 100.0)) throw argument_error("tau_signs: horizon must be >= 100");
    auto G = kernel_cumulative_curves(sys, {T}, h, false);
    SignProfile sp;
    sp.horizon = T;
    sp.tau.resize(sys.q);
    sp.lambda.resize(sys.q);
    for (int i = 1; i <= sys.q; ++i) {
        const double lam = sys.q * G[i][0] / T; // raw sigma average
        sp.lambda[i - 1] = lam;
        sp.tau[i - 1] = (lam >= 0.0) ? -1 : +1;
    }
    return sp;
}

SignProfile tau_signs(const Field& g, const std::vector<double>& z, double T, double h) {
    return tau_signs_from_kernels(normalized_ray_system(g, z), T, h);
}

ResidualReport residual_report(const Field& f, const std::vector<double>& x0,
                               const std::vector<double>& rho, double T, int samples, double h) {
    if (!(T >= 100.0)) throw argument_error("residual_report: horizon must be >= 100");
    if (samples < 4) throw argument_error("residual_report: need at least 4 samples");
    ResidualReport rep;
    rep.rho = rho;
    rep.horizon = T;
    const double t_lo = std::max(1.0, T / 1000.0);
    rep.times.resize(samples);
    for (int k = 0; k < samples; ++k)
        rep.times[k] = t_lo * std::pow(T / t_lo, k / static_cast<double>(samples - 1));
    rep.times.back() = T;

    PsiSystem sys = main_result_system(f, x0, rho);
    auto curves = psi_quadrature_curves(sys, rep.times, h);

    const int n = f.dim;
    rep.R.assign(n, std::vector<double>(rep.times.size(), 0.0));
    rep.limit.assign(n, 0.0);
    rep.limit_stderr.assign(n, 0.0);
    for (int i = 1; i <= n; ++i) {
        for (size_t k = 0; k < rep.times.size(); ++k)
            rep.R[i - 1][k] = (curves[0].values[k] - curves[i].values[k]) / rep.times[k];
        // constant fit over the last decade
        double sum = 0.0, sum2 = 0.0;
        int cnt = 0;
        for (size_t k = 0; k < rep.times.size(); ++k)
            if (rep.times[k] >= T / 10.0) {
                sum += rep.R[i - 1][k];
                sum2 += rep.R[i - 1][k] * rep.R[i - 1][k];
                ++cnt;
            }
        const double mean = sum / cnt;
        rep.limit[i - 1] = mean;
        if (cnt > 1) {
            const double var = std::max(0.0, (sum2 - cnt * mean * mean) / (cnt - 1));
            rep.limit_stderr[i - 1] = std::sqrt(var / cnt);
        }
    }
    return rep;
}

} // namespace rotvec
