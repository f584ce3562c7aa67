#include "riccati.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "errors.hpp"
#include "integrate.hpp"

namespace rotvec {

void RiccatiSystem::rhs(double t, const double* y, double* dy) const {
    thread_local std::vector<double> a, b, h;
    a.resize(q);
    b.resize(static_cast<size_t>(q) * q);
    h.resize(static_cast<size_t>(q) * q * q);
    A(t, a.data());
    B(t, b.data());
    H(t, h.data());
    for (int i = 0; i < q; ++i) {
        double v = a[i];
        for (int j = 0; j < q; ++j) v += b[static_cast<size_t>(i) * q + j] * y[j];
        const double* hi = h.data() + static_cast<size_t>(i) * q * q;
        double quad = 0.0;
        for (int j = 0; j < q; ++j)
            for (int k = 0; k < q; ++k) quad += y[j] * hi[static_cast<size_t>(j) * q + k] * y[k];
        dy[i] = v + quad;
    }
}

void validate_riccati(const RiccatiSystem& sys, int samples, double t_range) {
    if (sys.q < 1) throw argument_error("riccati: dimension must be >= 1");
    if (!(sys.gamma >= 0.0 && sys.gamma < 1.0))
        throw argument_error("riccati: declared gamma must lie in [0,1)");
    const int q = sys.q;
    std::vector<double> b(static_cast<size_t>(q) * q), h(static_cast<size_t>(q) * q * q);
    for (int s = 0; s < samples; ++s) {
        const double t = -t_range + 2.0 * t_range * s / std::max(1, samples - 1);
        sys.B(t, b.data());
        sys.H(t, h.data());
        RowMat bm(q, q);
        bm.a = b;
        const double nb = mat_inf_norm(bm);
        const double nh = tensor_inf_norm(q, h);
        if (nb > sys.gamma + 1e-12 || nh > sys.gamma + 1e-12)
            throw argument_error("riccati: coefficient norms exceed the declared gamma bound");
    }
}

RiccatiSystem riccati_zero(int q) {
    RiccatiSystem sys;
    sys.q = q;
    sys.gamma = 0.0;
    sys.name = "zero";
    sys.A = [q](double, double* a) { std::fill(a, a + q, 0.0); };
    sys.B = [q](double, double* b) { std::fill(b, b + q * q, 0.0); };
    sys.H = [q](double, double* h) { std::fill(h, h + q * q * q, 0.0); };
    return sys;
}

RiccatiSystem riccati_constant(int q, std::vector<double> a, std::vector<double> b,
                               std::vector<double> h, double gamma) {
    if (static_cast<int>(a.size()) != q || static_cast<int>(b.size()) != q * q ||
        static_cast<int>(h.size()) != q * q * q)
        throw argument_error("riccati_constant: coefficient sizes inconsistent with q");
    RiccatiSystem sys;
    sys.q = q;
    sys.gamma = gamma;
    sys.name = "constant";
    sys.A = [a](double, double* out) { std::copy(a.begin(), a.end(), out); };
    sys.B = [b](double, double* out) { std::copy(b.begin(), b.end(), out); };
    sys.H = [h](double, double* out) { std::copy(h.begin(), h.end(), out); };
    validate_riccati(sys);
    return sys;
}

RiccatiSystem riccati_trig(int q, double gamma, uint64_t seed) {
    if (q < 1) throw argument_error("riccati_trig: dimension must be >= 1");
    if (!(gamma > 0.0 && gamma < 1.0)) throw argument_error("riccati_trig: gamma must lie in (0,1)");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amp(0.2, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);

    // rationally independent frequency pools, disjoint between A and B so the
    // hypothesis averages vanish
    const std::vector<double> freqA = {1.0, 2.2360679774997896};              // 1, sqrt 5
    const std::vector<double> freqB = {1.4142135623730951, 1.7320508075688772}; // sqrt 2, sqrt 3

    struct Wave {
        double a, f, p;
    };
    std::vector<std::vector<Wave>> wa(q), wb(static_cast<size_t>(q) * q);
    for (int i = 0; i < q; ++i)
        for (double f : freqA) wa[i].push_back({amp(rng), f, phase(rng)});
    // scale B entries so every row sum of amplitudes is exactly gamma
    std::vector<double> raw(static_cast<size_t>(q) * q);
    for (auto& r : raw) r = amp(rng);
    for (int i = 0; i < q; ++i) {
        double rowsum = 0.0;
        for (int j = 0; j < q; ++j) rowsum += raw[static_cast<size_t>(i) * q + j];
        for (int j = 0; j < q; ++j) {
            const double scale = gamma * raw[static_cast<size_t>(i) * q + j] / rowsum;
            auto& cell = wb[static_cast<size_t>(i) * q + j];
            const double split = amp(rng);
            cell.push_back({scale * split / (split + 1.0), freqB[0], phase(rng)});
            cell.push_back({scale / (split + 1.0), freqB[1], phase(rng)});
        }
    }
    // constant H tensor at half the budget
    std::vector<double> h(static_cast<size_t>(q) * q * q);
    std::uniform_real_distribution<double> sgn(-1.0, 1.0);
    for (auto& v : h) v = sgn(rng);
    const double hn = tensor_inf_norm(q, h);
    for (auto& v : h) v *= 0.5 * gamma / hn;

    RiccatiSystem sys;
    sys.q = q;
    sys.gamma = gamma;
    sys.name = "trig(seed=" + std::to_string(seed) + ")";
    sys.A = [wa, q](double t, double* out) {
        for (int i = 0; i < q; ++i) {
            double v = 0.0;
            for (const auto& w : wa[i]) v += w.a * std::cos(6.283185307179586 * w.f * t + w.p);
            out[i] = v;
        }
    };
    sys.B = [wb, q](double t, double* out) {
        for (int i = 0; i < q * q; ++i) {
            double v = 0.0;
            for (const auto& w : wb[i]) v += w.a * std::cos(6.283185307179586 * w.f * t + w.p);
            out[i] = v;
        }
    };
    sys.H = [h](double, double* out) { std::copy(h.begin(), h.end(), out); };
    validate_riccati(sys);
    return sys;
}

RiccatiSystem riccati_counterexample_b(int q) {
    RiccatiSystem sys;
    sys.q = q;
    sys.gamma = 0.1 * q; // honest row-sum bound for the constant matrix
    sys.name = "b-const-0.1";
    if (sys.gamma >= 1.0) throw argument_error("riccati_counterexample_b: q too large for gamma < 1");
    sys.A = [q](double, double* a) { std::fill(a, a + q, 0.0); };
    sys.B = [q](double, double* b) { std::fill(b, b + q * q, 0.1); };
    sys.H = [q](double, double* h) { std::fill(h, h + q * q * q, 0.0); };
    return sys;
}

Trajectory riccati_simulate(const RiccatiSystem& sys, double ta, double tb, double tol,
                            const SampleSpec& spec) {
    Rhs rhs = [&sys](double t, const double* y, double* dy) { sys.rhs(t, y, dy); };
    std::vector<double> y0(sys.q, 0.0);
    return integrate_rhs(rhs, sys.q, y0, ta, tb, tol, spec, 1e6);
}

namespace {

// Wrap the Riccati coefficients as a PsiSystem: sources sigma(I_i A(t)),
// kernels sigma(I_i B(t) I_i)/q -- exactly the hypothesis-psi equations.
PsiSystem riccati_psi_system(const RiccatiSystem& sys) {
    PsiSystem ps;
    const int q = sys.q;
    ps.q = q;
    ps.sources = [&sys, q, a = std::vector<double>(q)](double t, double* out) mutable {
        sys.A(t, a.data());
        double total = 0.0;
        for (double v : a) total += v;
        out[0] = total;
        for (int i = 0; i < q; ++i) out[i + 1] = total - 2.0 * a[i];
    };
    ps.kernels = [&sys, q, b = std::vector<double>(static_cast<size_t>(q) * q)](double t,
                                                                                double* out) mutable {
        sys.B(t, b.data());
        conjugated_sums_all(q, b, out);
        for (int i = 0; i <= q; ++i) out[i] /= q;
    };
    return ps;
}

} // namespace

HypothesisReport hypothesis_check(const RiccatiSystem& sys, double T, const HypothesisOptions& opts) {
    if (!(T >= 100.0)) throw argument_error("hypothesis_check: horizon must be >= 100");
    const int q = sys.q;
    PsiSystem ps = riccati_psi_system(sys);
    std::vector<double> tpos(opts.samples);
    for (int i = 0; i < opts.samples; ++i) tpos[i] = T * (i + 1) / static_cast<double>(opts.samples);

    HypothesisReport rep;
    auto Gf = kernel_cumulative_curves(ps, tpos, opts.quad_h, false);
    auto Gb = kernel_cumulative_curves(ps, tpos, opts.quad_h, true);

    // [H1] part 1: |int_0^t sigma(B)| bounded on both sides
    {
        std::vector<double> times, vals;
        for (size_t k = tpos.size(); k-- > 0;) {
            times.push_back(-tpos[k]);
            vals.push_back(q * Gb[0][k]);
        }
        for (size_t k = 0; k < tpos.size(); ++k) {
            times.push_back(tpos[k]);
            vals.push_back(q * Gf[0][k]);
        }
        rep.h1_trace.window = dyadic_window_test(times, vals, opts.slope_tol, WindowMode::AbsSup, true);
        rep.h1_trace.sup = rep.h1_trace.window.sup;
        rep.h1_trace.pass = rep.h1_trace.window.pass;
        rep.h1_trace.tau = +1;
    }

    // [H1] part 2: per i, tau_i makes the oriented sup finite. Both signs are
    // tried; if both pass the tie breaks to tau = -1.
    rep.h1_conj.resize(q);
    for (int i = 1; i <= q; ++i) {
        std::vector<double> vplus(tpos.size()), vminus(tpos.size());
        for (size_t k = 0; k < tpos.size(); ++k) {
            vplus[k] = q * Gf[i][k];
            vminus[k] = q * Gb[i][k];
        }
        WindowTest wplus = dyadic_window_test(tpos, vplus, opts.slope_tol, WindowMode::RawSup, false);
        WindowTest wminus = dyadic_window_test(tpos, vminus, opts.slope_tol, WindowMode::RawSup, false);
        HypothesisPart& part = rep.h1_conj[i - 1];
        if (wminus.pass) {
            part.tau = -1;
            part.window = wminus;
        } else if (wplus.pass) {
            part.tau = +1;
            part.window = wplus;
        } else {
            part.tau = -1;
            part.window = (wminus.slope <= wplus.slope) ? wminus : wplus;
        }
        part.sup = part.window.sup;
        part.pass = part.window.pass;
    }

    // [H2]: |psi_0(tau_i t) - psi_i(tau_i t)| bounded; two-sided in effect
    {
        std::vector<double> times;
        for (size_t k = tpos.size(); k-- > 0;) times.push_back(-tpos[k]);
        times.push_back(0.0);
        times.insert(times.end(), tpos.begin(), tpos.end());
        auto curves = psi_ode_curves(ps, times, opts.ode_tol);
        rep.h2.resize(q);
        for (int i = 1; i <= q; ++i) {
            std::vector<double> diff(times.size());
            for (size_t k = 0; k < times.size(); ++k)
                diff[k] = curves[0].values[k] - curves[i].values[k];
            HypothesisPart& part = rep.h2[i - 1];
            part.tau = rep.h1_conj[i - 1].tau;
            part.window = dyadic_window_test(times, diff, opts.slope_tol, WindowMode::AbsSup, true);
            part.sup = part.window.sup;
            part.pass = part.window.pass;
        }
    }

    rep.h1_pass = rep.h1_trace.pass;
    for (const auto& p : rep.h1_conj) rep.h1_pass = rep.h1_pass && p.pass;
    rep.h2_pass = true;
    for (const auto& p : rep.h2) rep.h2_pass = rep.h2_pass && p.pass;
    rep.pass = rep.h1_pass && rep.h2_pass;
    return rep;
}

BoundednessVerdict boundedness_verdict(const RiccatiSystem& sys, double T, double tol,
                                       double slope_tol) {
    BoundednessVerdict v;
    Trajectory traj = riccati_simulate(sys, -T, T, tol);
    if (!traj.complete) {
        v.blow_up = true;
        v.pass = false;
        double sup = 0.0;
        for (const auto& y : traj.x) sup = std::max(sup, max_norm(y));
        v.sup = sup;
        return v;
    }
    std::vector<double> vals(traj.size());
    for (size_t k = 0; k < traj.size(); ++k) vals[k] = max_norm(traj.x[k]);
    v.window = dyadic_window_test(traj.t, vals, slope_tol, WindowMode::AbsSup, true);
    v.sup = v.window.sup;
    v.pass = v.window.pass;
    return v;
}

RiccatiSystem linearize(const Field& f, const Path& mu, double threshold) {
    if (mu.dim != f.dim) throw argument_error("linearize: path dimension mismatch");
    if (!(std::isfinite(f.jac_norm) && std::isfinite(f.hess_norm)))
        throw argument_error("linearize: derivative bounds must be finite");
    const int q = f.dim;
    double eps = 0.5;
    if (f.hess_norm > 0.0) eps = std::min(0.5, threshold / f.hess_norm);
    if (f.jac_norm > 0.0) eps = std::min(eps, std::sqrt(threshold / f.jac_norm));

    RiccatiSystem sys;
    sys.q = q;
    sys.name = "linearize(" + f.name + ")";
    sys.gamma = std::max(eps * eps * f.jac_norm, eps * f.hess_norm);
    sys.A = [fld = f, path = mu, q, eps, pos = std::vector<double>(q), vel = std::vector<double>(q),
             fv = std::vector<double>(q)](double t, double* out) mutable {
        path.mu(eps * t, pos.data());
        path.mu_dot(eps * t, vel.data());
        fld.eval(pos.data(), fv.data());
        const double e3 = eps * eps * eps;
        for (int i = 0; i < q; ++i) out[i] = e3 * (vel[i] - fv[i]);
    };
    sys.B = [fld = f, path = mu, q, eps, pos = std::vector<double>(q)](double t, double* out) mutable {
        path.mu(eps * t, pos.data());
        fld.jacobian(pos.data(), out);
        const double e2 = eps * eps;
        for (int i = 0; i < q * q; ++i) out[i] *= e2;
    };
    // constant remainder tensor at the scaled bound eps ||d^2 f|| <= ||d^2 f||
    const double fill = (f.hess_norm > 0.0) ? eps * f.hess_norm / (q * q) : 0.0;
    sys.H = [q, fill](double, double* out) {
        std::fill(out, out + q * q * q, fill);
    };
    validate_riccati(sys);
    return sys;
}

} // namespace rotvec
