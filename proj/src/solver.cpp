#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "errors.hpp"

namespace rotvec {

NormalizedField normalize(const Field& f, const std::vector<double>& x0, double c, double gamma,
                          double beta) {
    if (static_cast<int>(x0.size()) != f.dim) throw argument_error("normalize: x0 dimension mismatch");
    if (!(gamma > 0.0 && gamma < 1.0)) throw argument_error("normalize: gamma must lie in (0,1)");
    if (!(beta > 0.0)) throw argument_error("normalize: beta must be positive");
    if (!(c > 1.0 + beta + gamma * f.sup_norm))
        throw argument_error("normalize: need c > 1 + beta + gamma ||f||");

    NormalizedField nf;
    nf.n = f.dim;
    nf.c = c;
    nf.gamma = gamma;
    nf.beta = beta;
    nf.x0 = x0;
    nf.g_sup = c + gamma * f.sup_norm;
    nf.g_inf = c - gamma * f.sup_norm;
    nf.dg_bound = 2.0 * gamma * f.jac_norm;

    const int n = f.dim;
    const int q = n + 1;
    auto base = std::make_shared<Field>(f);

    Field g;
    g.dim = q;
    g.name = "normalized(" + f.name + ")";
    g.params = {c, gamma, beta};
    g.sup_norm = nf.g_sup;
    g.jac_norm = nf.dg_bound;
    g.hess_norm = 4.0 * gamma * f.hess_norm;
    g.eval = [base, x0, c, gamma, n, arg = std::vector<double>(n)](const double* z,
                                                                   double* out) mutable {
        const double w = z[n];
        for (int i = 0; i < n; ++i) arg[i] = z[i] + x0[i] - w;
        base->eval(arg.data(), out);
        for (int i = 0; i < n; ++i) out[i] = c + gamma * out[i];
        out[n] = c;
    };
    g.jac = [base, x0, gamma, n, q, arg = std::vector<double>(n),
             jf = std::vector<double>(static_cast<size_t>(n) * n)](const double* z,
                                                                   double* out) mutable {
        const double w = z[n];
        for (int i = 0; i < n; ++i) arg[i] = z[i] + x0[i] - w;
        base->jacobian(arg.data(), jf.data());
        for (int i = 0; i < q * q; ++i) out[i] = 0.0;
        for (int i = 0; i < n; ++i) {
            double rowsum = 0.0;
            for (int j = 0; j < n; ++j) {
                const double v = gamma * jf[static_cast<size_t>(i) * n + j];
                out[static_cast<size_t>(i) * q + j] = v;
                rowsum += v;
            }
            out[static_cast<size_t>(i) * q + n] = -rowsum;
        }
    };
    nf.g = std::move(g);
    return nf;
}

bool in_VL(const NormalizedField& nf, const std::vector<double>& z, double L) {
    for (double v : z)
        if (!(v > 1.0)) return false;
    // small slack: constant fields land exactly on the boundary
    return max_norm(z) <= (L - 1.0) * nf.g_sup * (1.0 + 1e-9);
}

namespace {

// Conjugated kernel sums (1/q) sigma(I_i I_z^{-1} dg(arg) I_z I_i) for all i
// at the ray point tau * s * z.
struct RayKernels {
    const NormalizedField& nf;
    const std::vector<double>& z;
    int q;
    std::vector<double> arg, jac, w;

    RayKernels(const NormalizedField& nf_, const std::vector<double>& z_)
        : nf(nf_), z(z_), q(nf_.g.dim), arg(q), jac(static_cast<size_t>(q) * q),
          w(static_cast<size_t>(q) * q) {}

    void eval(double s, double tau, double* k) {
        for (int i = 0; i < q; ++i) arg[i] = tau * s * z[i];
        nf.g.jacobian(arg.data(), jac.data());
        for (int j = 0; j < q; ++j)
            for (int c = 0; c < q; ++c)
                w[static_cast<size_t>(j) * q + c] = jac[static_cast<size_t>(j) * q + c] * z[c] / z[j];
        conjugated_sums_all(q, w, k);
        for (int i = 0; i <= q; ++i) k[i] *= tau / q;
    }
};

struct RaySources {
    const NormalizedField& nf;
    const std::vector<double>& z;
    int q;
    std::vector<double> arg, gval;

    RaySources(const NormalizedField& nf_, const std::vector<double>& z_)
        : nf(nf_), z(z_), q(nf_.g.dim), arg(q), gval(q) {}

    // fills g(tau s z) and A_i(z, tau s) = sigma(I_i (1 - I_z^{-1} g)) for all i
    void eval(double s, double tau, double* g_out, double* a_out) {
        for (int i = 0; i < q; ++i) arg[i] = tau * s * z[i];
        nf.g.eval(arg.data(), gval.data());
        double total = 0.0;
        for (int i = 0; i < q; ++i) {
            g_out[i] = gval[i];
            total += 1.0 - gval[i] / z[i];
        }
        a_out[0] = total;
        for (int i = 0; i < q; ++i) a_out[i + 1] = total - 2.0 * (1.0 - gval[i] / z[i]);
    }
};

// Streaming Simpson cumulative of the oriented kernels over [0, k]; returns
// endpoint values E_i(k) = int_0^k kappa_i(tau nu) dnu for i = 0..q.
std::vector<double> kernel_endpoints(const NormalizedField& nf, const std::vector<double>& z,
                                     double kh, double tau, double h) {
    RayKernels ker(nf, z);
    const int m = nf.g.dim + 1;
    std::vector<double> E(m, 0.0), k0(m), k1(m), k2(m);
    const long pairs = std::max(1L, static_cast<long>(std::ceil(kh / (2.0 * h))));
    const double step = kh / (2.0 * pairs);
    ker.eval(0.0, tau, k0.data());
    for (long p = 0; p < pairs; ++p) {
        const double sa = 2.0 * p * step;
        ker.eval(sa + step, tau, k1.data());
        ker.eval(sa + 2.0 * step, tau, k2.data());
        for (int i = 0; i < m; ++i) E[i] += (step / 3.0) * (k0[i] + 4.0 * k1[i] + k2[i]);
        k0.swap(k2);
    }
    return E;
}

constexpr double kThetaGuard = 700.0;

} // namespace

ThetaPair theta_kernels(const NormalizedField& nf, const std::vector<double>& z, double k, double s,
                        int i, double h) {
    const int q = nf.g.dim;
    if (i < 1 || i > q) throw argument_error("theta_kernels: index out of range 1..q");
    if (!(s >= 0.0 && s <= k)) throw argument_error("theta_kernels: need 0 <= s <= k");
    if (!strictly_positive(z)) throw argument_error("theta_kernels: z must lie in the open cone");

    // tau from the forward kernel average at horizon k
    std::vector<double> Ef = kernel_endpoints(nf, z, k, +1.0, h);
    const double lambda = q * Ef[i] / k;
    const int tau = (lambda >= 0.0) ? -1 : +1;

    std::vector<double> Es = kernel_endpoints(nf, z, s, tau, h);
    std::vector<double> Ek = (tau == +1) ? Ef : kernel_endpoints(nf, z, k, tau, h);
    const double ex0 = tau * (Ek[0] - Es[0]);
    const double exi = tau * (Ek[i] - Es[i]);
    if (ex0 > kThetaGuard || exi > kThetaGuard)
        throw kernel_overflow("theta kernel overflow at index " + std::to_string(i), i, k);
    ThetaPair tp;
    tp.tau = tau;
    tp.theta0 = std::exp(ex0);
    tp.theta_i = std::exp(exi);
    tp.theta_under = tp.theta0 - tp.theta_i;
    return tp;
}

GammaState gamma_map(const NormalizedField& nf, const std::vector<double>& z, int k, double h,
                     double L) {
    const int q = nf.g.dim;
    if (static_cast<int>(z.size()) != q) throw argument_error("gamma_map: z dimension mismatch");
    if (!strictly_positive(z)) throw argument_error("gamma_map: z must lie in the open cone");
    if (k < 1) throw argument_error("gamma_map: horizon k must be >= 1");

    GammaState st;
    st.z = z;
    st.k = k;
    st.image.assign(q, 0.0);
    st.zeta.assign(q, 0.0);
    st.lambda.assign(q, 0.0);
    st.tau.assign(q, -1);

    // orientation per component from the forward kernel averages
    std::vector<double> Ef = kernel_endpoints(nf, z, k, +1.0, h);
    for (int i = 1; i <= q; ++i) {
        st.lambda[i - 1] = q * Ef[i] / k;
        st.tau[i - 1] = (st.lambda[i - 1] >= 0.0) ? -1 : +1;
    }

    // One streaming Simpson sweep per orientation present. Accumulators are
    // kept in a running log scale so drifting kernels never overflow:
    //   S1_i  = int e^{-tau E_0(s) - M0} g_i(tau s z) ds
    //   S2a   = int e^{-tau E_0(s) - M0} ds
    //   S2b_i = int e^{-tau E_0(s) - M0} A_i(tau s)/2 ds
    //   S3_i  = int e^{-tau E_i(s) - Mi} A_i(tau s)/2 ds
    for (int ori = 0; ori < 2; ++ori) {
        const double tau = (ori == 0) ? -1.0 : +1.0;
        std::vector<int> idx;
        for (int i = 1; i <= q; ++i)
            if (st.tau[i - 1] == static_cast<int>(tau)) idx.push_back(i);
        if (idx.empty()) continue;

        RayKernels ker(nf, z);
        RaySources src(nf, z);
        const int m = q + 1;
        const long pairs = std::max(1L, static_cast<long>(std::ceil(k / (2.0 * h))));
        const double step = k / (2.0 * pairs);

        std::vector<double> E(m, 0.0), E1(m), k0(m), k1(m), k2(m);
        std::vector<double> g0(q), g1(q), g2(q), a0(m), a1(m), a2(m);
        std::vector<double> x0v(m, 0.0), x1v(m), x2v(m); // exponents -tau*E at the three nodes
        double M0 = 0.0;
        std::vector<double> Mi(q, 0.0);
        double S2a = 0.0;
        std::vector<double> S1(q, 0.0), S2b(q, 0.0), S3(q, 0.0);

        ker.eval(0.0, tau, k0.data());
        src.eval(0.0, tau, g0.data(), a0.data());

        for (long p = 0; p < pairs; ++p) {
            const double sa = 2.0 * p * step;
            const double sb = sa + step;
            const double sc = (p + 1 == pairs) ? static_cast<double>(k) : sa + 2.0 * step;
            ker.eval(sb, tau, k1.data());
            ker.eval(sc, tau, k2.data());
            src.eval(sb, tau, g1.data(), a1.data());
            src.eval(sc, tau, g2.data(), a2.data());
            for (int i = 0; i < m; ++i) {
                E1[i] = E[i] + (step / 12.0) * (5.0 * k0[i] + 8.0 * k1[i] - k2[i]);
                E[i] += (step / 3.0) * (k0[i] + 4.0 * k1[i] + k2[i]);
                x1v[i] = -tau * E1[i];
                x2v[i] = -tau * E[i];
            }
            // contributions under the current scales
            {
                const double f0 = std::exp(x0v[0] - M0), f1 = std::exp(x1v[0] - M0),
                             f2 = std::exp(x2v[0] - M0);
                S2a += (step / 3.0) * (f0 + f1 * 4.0 + f2);
                for (int i : idx) {
                    S1[i - 1] += (step / 3.0) * (f0 * g0[i - 1] + 4.0 * f1 * g1[i - 1] + f2 * g2[i - 1]);
                    S2b[i - 1] +=
                        (step / 6.0) * (f0 * a0[i] + 4.0 * f1 * a1[i] + f2 * a2[i]);
                    const double e0 = std::exp(x0v[i] - Mi[i - 1]), e1 = std::exp(x1v[i] - Mi[i - 1]),
                                 e2 = std::exp(x2v[i] - Mi[i - 1]);
                    S3[i - 1] += (step / 6.0) * (e0 * a0[i] + 4.0 * e1 * a1[i] + e2 * a2[i]);
                }
            }
            // rescale when an exponent pulls ahead of its scale
            if (x2v[0] > M0 + 40.0) {
                const double shift = std::exp(M0 - x2v[0]);
                S2a *= shift;
                for (int i : idx) {
                    S1[i - 1] *= shift;
                    S2b[i - 1] *= shift;
                }
                M0 = x2v[0];
            }
            for (int i : idx)
                if (x2v[i] > Mi[i - 1] + 40.0) {
                    S3[i - 1] *= std::exp(Mi[i - 1] - x2v[i]);
                    Mi[i - 1] = x2v[i];
                }
            k0.swap(k2);
            g0.swap(g2);
            a0.swap(a2);
            std::swap(x0v, x2v);
        }

        for (int i : idx) {
            // N_i / Theta_i with the shared scales divided out
            const double log0 = tau * E[0] + M0;       // log of e^{tau E_0(k)} e^{M0}
            const double logi = tau * E[i] + Mi[i - 1]; // log of e^{tau E_i(k)} e^{Mi}
            if (logi - log0 > kThetaGuard)
                throw kernel_overflow("gamma_map kernel overflow at index " + std::to_string(i), i, k);
            const double cross = std::exp(logi - log0); // bounded above by theta bounds
            const double theta_part = S2a + S2b[i - 1] - cross * S3[i - 1];
            if (!(std::abs(theta_part) > 1e-12 * std::max(1.0, S2a)))
                throw degenerate_denominator("gamma_map: Theta_" + std::to_string(i) +
                                             " is numerically degenerate");
            st.image[i - 1] = S1[i - 1] / theta_part;
            st.zeta[i - 1] = (S2b[i - 1] - cross * S3[i - 1]) / S2a;
        }
    }
    st.in_VL = in_VL(nf, st.image, L);
    return st;
}

std::vector<std::string> check_L_inequalities(const NormalizedField& nf, double L) {
    std::vector<std::string> warnings;
    const int q = nf.g.dim;
    const double a = q * L * (std::exp(2.0 * nf.dg_bound) - 1.0) * nf.g_sup;
    if (!(2.0 - a > 0.0 && L > 2.0 / (2.0 - a)))
        warnings.push_back("L inequality 1 not satisfied: L <= 2/(2 - qL(e^{2gamma}-1)||g||)");
    if (!(a < 2.0 * nf.beta))
        warnings.push_back("L inequality 2 not satisfied: qL(e^{2gamma}-1)||g|| >= 2 beta");
    return warnings;
}

FixedPointResult fixed_point(const NormalizedField& nf, const SolveOptions& opts) {
    const int q = nf.g.dim;
    std::vector<int> schedule = opts.k_schedule;
    if (schedule.empty()) schedule = {25, 50, 100, 200, 400, 800};
    for (size_t j = 1; j < schedule.size(); ++j)
        if (schedule[j] <= schedule[j - 1])
            throw argument_error("fixed_point: k_schedule must be strictly increasing");

    FixedPointResult res;
    std::vector<double> z(q, nf.c); // start at c * 1
    for (int k : schedule) {
        GammaState st;
        double resid = 0.0;
        int it = 0;
        for (; it < opts.max_iters; ++it) {
            st = gamma_map(nf, z, k, opts.quad_h, opts.L);
            if (!st.in_VL)
                throw cone_violation("fixed_point: Gamma_k image left V_L at k = " +
                                     std::to_string(k));
            resid = 0.0;
            for (int i = 0; i < q; ++i) resid = std::max(resid, std::abs(st.image[i] - z[i]));
            res.residual_history.push_back(resid);
            if (resid <= opts.tol) {
                z = st.image;
                break;
            }
            for (int i = 0; i < q; ++i) z[i] = (1.0 - opts.alpha) * z[i] + opts.alpha * st.image[i];
        }
        if (resid > opts.tol)
            throw iteration_failure("fixed_point: no convergence at k = " + std::to_string(k) +
                                        " after " + std::to_string(opts.max_iters) + " iterations",
                                    res.residual_history);
        res.ks.push_back(k);
        res.rho_k.push_back(z);
        res.residuals.push_back(resid);
        res.iterations.push_back(it + 1);
        res.last_state = st;
    }
    res.rho_star = z;
    return res;
}

SolveResult solve_rotation_formula(const Field& f, const std::vector<double>& x0, SolveOptions opts) {
    if (!(std::isfinite(f.jac_norm) && std::isfinite(f.sup_norm)))
        throw argument_error("solve: field norm bounds must be finite");
    if (!(opts.gamma > 0.0 && opts.gamma < 1.0))
        throw argument_error("solve: gamma must lie in (0,1)");
    if (opts.gamma * f.jac_norm > opts.smallness)
        throw compute_error("solve: smallness regime violated: gamma * ||df|| = " +
                            std::to_string(opts.gamma * f.jac_norm) + " > " +
                            std::to_string(opts.smallness));
    double c = opts.c;
    if (c <= 0.0) c = 2.0 + opts.beta + opts.gamma * f.sup_norm;

    NormalizedField nf = normalize(f, x0, c, opts.gamma, opts.beta);

    SolveResult out;
    out.c = c;
    out.gamma = opts.gamma;
    out.warnings = check_L_inequalities(nf, opts.L);

    out.fp = fixed_point(nf, opts);

    const int n = f.dim;
    out.rho.resize(n);
    for (int i = 0; i < n; ++i) out.rho[i] = (out.fp.rho_star[i] - c) / opts.gamma;
    out.suspension_residual = std::abs(out.fp.rho_star[n] - c);

    if (opts.with_certificate) {
        out.certificate = residual_report(f, x0, out.rho, opts.certificate_T,
                                          opts.certificate_samples, opts.certificate_h);
        out.certificate_ok = true;
        for (double lim : out.certificate.limit)
            if (std::abs(lim) > opts.certificate_tol) out.certificate_ok = false;
        if (!out.certificate_ok)
            out.warnings.push_back("certificate residual above tolerance; result flagged");
    }
    return out;
}

} // namespace rotvec
