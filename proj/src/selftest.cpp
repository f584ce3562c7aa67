#include "selftest.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "algebra.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "flow.hpp"
#include "io.hpp"
#include "leader.hpp"
#include "psi.hpp"
#include "riccati.hpp"
#include "solver.hpp"
#include "tongue.hpp"

namespace rotvec {

namespace {

Trajectory synthetic_trajectory(const std::vector<double>& lambda, double T, int samples,
                                double wobble) {
    Trajectory traj;
    traj.dim = static_cast<int>(lambda.size());
    for (int k = 0; k <= samples; ++k) {
        const double t = T * k / samples;
        std::vector<double> x(traj.dim), fx(traj.dim);
        for (int i = 0; i < traj.dim; ++i) {
            x[i] = lambda[i] * t + wobble * std::sin(t);
            fx[i] = lambda[i] + wobble * std::cos(t);
        }
        traj.t.push_back(t);
        traj.x.push_back(x);
        traj.fx.push_back(fx);
    }
    return traj;
}

} // namespace

SelftestResult run_selftest(const std::function<void(const std::string&)>& line_sink) {
    SelftestResult res;
    auto check = [&](const std::string& name, const std::function<bool()>& fn) {
        bool ok = false;
        std::string detail;
        try {
            ok = fn();
        } catch (const std::exception& e) {
            detail = std::string(" (") + e.what() + ")";
        }
        if (ok)
            ++res.passed;
        else
            ++res.failed;
        if (line_sink) line_sink((ok ? "pass  " : "FAIL  ") + name + detail);
    };

    // ---- algebra ----
    check("sum_entries 2x2", [] {
        const std::vector<double> m = {1, 2, 3, 4};
        return sum_entries(m) == 10.0;
    });
    check("sum_entries zero 3x3", [] {
        const std::vector<double> m(9, 0.0);
        return sum_entries(m) == 0.0;
    });
    check("sum_entries signed diagonal cancels", [] {
        const std::vector<double> m = {-1, 0, 0, 1};
        return sum_entries(m) == 0.0;
    });
    check("involution identity case", [] {
        const Involution inv = involution(0, 3);
        return inv.signs == std::vector<double>({1, 1, 1});
    });
    check("involution flips one sign", [] {
        const Involution inv = involution(2, 3);
        return inv.signs == std::vector<double>({1, -1, 1});
    });
    check("involution applied twice is identity", [] {
        for (int q = 1; q <= 4; ++q)
            for (int i = 0; i <= q; ++i) {
                std::vector<double> y(q);
                for (int j = 0; j < q; ++j) y[j] = 0.37 * (j + 1);
                std::vector<double> z = y;
                const Involution inv = involution(i, q);
                inv.apply(z);
                inv.apply(z);
                if (z != y) return false;
            }
        return true;
    });
    check("recover_component", [] {
        const std::vector<double> y = {3, 5};
        return recover_component(y, 1) == 3.0 && recover_component(y, 2) == 5.0;
    });
    check("recover_component equals indexing", [] {
        const std::vector<double> y = {0.25, -1.5, 7.0, 0.125};
        for (int i = 1; i <= 4; ++i)
            if (recover_component(y, i) != y[i - 1]) return false;
        return true;
    });
    check("ones_exp at t=0 is the identity", [] {
        const RowMat m = ones_exp(0.0, 3);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                if (m(r, c) != (r == c ? 1.0 : 0.0)) return false;
        return true;
    });

    // ---- field ----
    check("constant field evaluation", [] {
        const Field f = make_constant({0.5, 2.0});
        double x[2] = {0.3, 0.9}, out[2];
        f.eval(x, out);
        return out[0] == 0.5 && out[1] == 2.0;
    });
    check("circle field at 1/4", [] {
        const Field f = make_circle(2.0, 1.0);
        double x = 0.25, out;
        f.eval(&x, &out);
        return std::abs(out - 3.0) < 1e-15;
    });
    check("circle derivative at 1/4", [] {
        const Field f = make_circle(2.0, 1.0);
        double x = 0.25, out;
        f.jac(&x, &out);
        return std::abs(out) < 1e-12;
    });
    check("circle derivative at 0 is 2 pi eps", [] {
        const Field f = make_circle(2.0, 1.0);
        double x = 0.0, out;
        f.jac(&x, &out);
        return std::abs(out - 2.0 * M_PI) < 1e-12;
    });
    check("shipped models are periodic", [] {
        const std::vector<Field> models = {make_constant({0.5, 2.0}), make_circle(2.0, 1.0),
                                           make_torus_product({2.0, 3.0}, {0.1, 0.1}),
                                           make_winfree({1.0, 1.618033988749895}, 0.2)};
        for (const auto& f : models)
            if (!periodicity_check(f, 32).pass) return false;
        return true;
    });
    check("injected linear field is not periodic", [] {
        Field f;
        f.dim = 1;
        f.name = "linear";
        f.eval = [](const double* x, double* out) { out[0] = x[0]; };
        const CheckReport rep = periodicity_check(f, 16);
        return !rep.pass && std::abs(rep.max_deviation - 1.0) < 1e-12;
    });
    check("constant field periodicity deviation is exactly 0", [] {
        return periodicity_check(make_constant({0.5, 2.0}), 16).max_deviation == 0.0;
    });
    check("jacobian_check constant deviation 0", [] {
        return jacobian_check(make_constant({0.5, 2.0}), 8).max_deviation == 0.0;
    });
    check("jacobian_check circle", [] { return jacobian_check(make_circle(2.0, 1.0), 16).pass; });

    // ---- flow ----
    check("constant flow is linear in time", [] {
        const Field f = make_constant({0.5, 2.0});
        const Trajectory traj = integrate(f, {0.0, 0.0}, 0.0, 4.0, 1e-12);
        const std::vector<double> xT = traj.state_at(4.0);
        return std::abs(xT[0] - 2.0) < 1e-10 && std::abs(xT[1] - 8.0) < 1e-10;
    });
    check("forward-then-backward returns to x0", [] {
        const Field f = make_circle(2.0, 1.0);
        const double tol = 1e-10;
        Trajectory fwd = integrate(f, {0.2}, 0.0, 25.0, tol);
        Trajectory back = integrate(f, fwd.state_at(25.0), -25.0, 0.0, tol);
        return std::abs(back.state_at(-25.0)[0] - 0.2) < 10.0 * 1e-8;
    });
    check("rotation estimate of the constant flow", [] {
        const Field f = make_constant({0.5, 2.0});
        const Trajectory traj = integrate(f, {0.0, 0.0}, 0.0, 200.0, 1e-10);
        const RotationEstimate est = rotation_estimate(traj);
        return std::abs(est.lambda[0] - 0.5) < 1e-9 && std::abs(est.lambda[1] - 2.0) < 1e-9;
    });
    check("boundedness: exact drift passes with D = 0", [] {
        const Trajectory traj = synthetic_trajectory({1.5}, 1000.0, 2000, 0.0);
        const WindowTest wt = boundedness_test(traj, {1.5});
        return wt.pass && wt.sup < 1e-12;
    });
    check("boundedness: bounded wobble passes with D near 1", [] {
        const Trajectory traj = synthetic_trajectory({1.5}, 1000.0, 2000, 1.0);
        const WindowTest wt = boundedness_test(traj, {1.5});
        return wt.pass && wt.sup > 0.9 && wt.sup <= 1.0 + 1e-9;
    });
    check("boundedness: wrong slope fails", [] {
        const Trajectory traj = synthetic_trajectory({1.5}, 1000.0, 2000, 0.0);
        return !boundedness_test(traj, {1.0}).pass;
    });

    // ---- psi ----
    check("coefficient A vanishes at rho = omega", [] {
        const Field f = make_constant({1.0, 2.0});
        for (int i = 0; i <= 2; ++i)
            for (double s : {0.0, 0.7, 13.0})
                if (std::abs(coefficient_A(f, {0.0, 0.0}, {1.0, 2.0}, i, s)) > 1e-15) return false;
        return true;
    });
    check("coefficient A signed sums", [] {
        const Field f = make_constant({1.0, 2.0});
        return std::abs(coefficient_A(f, {0, 0}, {2.0, 2.0}, 0, 3.3) - 1.0) < 1e-15 &&
               std::abs(coefficient_A(f, {0, 0}, {2.0, 2.0}, 1, 3.3) + 1.0) < 1e-15;
    });
    check("psi quadrature vanishes at rho = omega", [] {
        const Field f = make_constant({1.0, 2.0});
        const PsiSystem sys = main_result_system(f, {0, 0}, {1.0, 2.0});
        for (int i = 0; i <= 2; ++i)
            if (std::abs(psi_quadrature(sys, i, 10.0, 0.01)) > 1e-12) return false;
        return true;
    });
    check("psi quadrature linear growth for constant field", [] {
        const Field f = make_constant({1.0, 2.0});
        const PsiSystem sys = main_result_system(f, {0, 0}, {1.5, 2.5});
        // sigma(I_i (rho - omega)) = 1, 0, 2 for i = 0, 1, 2 at rho - omega = (1/2, 1/2)
        const double t = 7.0;
        return std::abs(psi_quadrature(sys, 0, t, 0.01) - 1.0 * t) < 1e-10 &&
               std::abs(psi_quadrature(sys, 1, t, 0.01) - 0.0) < 1e-10 &&
               std::abs(psi_quadrature(sys, 2, t, 0.01) - 2.0 * t) < 1e-10;
    });
    check("psi ode matches the constant-field line", [] {
        const Field f = make_constant({1.0, 2.0});
        const PsiSystem sys = main_result_system(f, {0, 0}, {1.5, 2.5});
        auto curves = psi_ode_curves(sys, {0.0, 3.5, 7.0}, 1e-12);
        return std::abs(curves[0].values[2] - 7.0) < 1e-9 &&
               std::abs(curves[1].values[2]) < 1e-9 &&
               std::abs(curves[2].values[2] - 14.0) < 1e-9;
    });
    check("residual vanishes at the rotation vector", [] {
        const Field f = make_constant({1.0, 2.0});
        const ResidualReport rep = residual_report(f, {0, 0}, {1.0, 2.0}, 200.0, 16, 0.01);
        for (const auto& ri : rep.R)
            for (double v : ri)
                if (std::abs(v) > 1e-12) return false;
        return true;
    });
    check("residual is 2(rho - omega) for the constant field", [] {
        const Field f = make_constant({1.0, 2.0});
        const ResidualReport rep = residual_report(f, {0, 0}, {1.25, 2.5}, 200.0, 16, 0.01);
        for (size_t k = 0; k < rep.times.size(); ++k)
            if (std::abs(rep.R[0][k] - 0.5) > 1e-9 || std::abs(rep.R[1][k] - 1.0) > 1e-9)
                return false;
        return true;
    });
    check("tau signs with zero Jacobian", [] {
        const Field f = make_constant({2.0, 3.0});
        const SignProfile sp = tau_signs(f, {1.5, 1.5}, 200.0);
        for (size_t i = 0; i < sp.tau.size(); ++i)
            if (sp.tau[i] != -1 || std::abs(sp.lambda[i]) > 1e-12) return false;
        return true;
    });

    // ---- solver ----
    check("theta kernels are 1 for constant fields", [] {
        const Field f = make_constant({1.0, 2.0});
        const NormalizedField nf = normalize(f, {0, 0}, 4.0, 0.1, 0.5);
        const ThetaPair tp = theta_kernels(nf, {4.1, 4.2, 4.0}, 50.0, 12.5, 1);
        return std::abs(tp.theta0 - 1.0) < 1e-12 && std::abs(tp.theta_i - 1.0) < 1e-12 &&
               std::abs(tp.theta_under) < 1e-12;
    });
    check("gamma map is constant for constant fields", [] {
        const Field f = make_constant({1.0, 2.0});
        const NormalizedField nf = normalize(f, {0, 0}, 4.0, 0.1, 0.5);
        // g = (4 + 0.1, 4 + 0.2, 4)
        const GammaState st = gamma_map(nf, {4.3, 3.9, 4.05}, 40);
        return std::abs(st.image[0] - 4.1) < 1e-12 && std::abs(st.image[1] - 4.2) < 1e-12 &&
               std::abs(st.image[2] - 4.0) < 1e-12 && max_norm(st.zeta) < 1e-12;
    });
    check("solve returns omega for constant fields", [] {
        const Field f = make_constant({0.5, 2.0});
        SolveOptions opts;
        opts.k_schedule = {25, 50};
        const SolveResult sr = solve_rotation_formula(f, {0.25, 0.75}, opts);
        return std::abs(sr.rho[0] - 0.5) < 1e-9 && std::abs(sr.rho[1] - 2.0) < 1e-9 &&
               sr.certificate_ok;
    });

    // ---- leader ----
    check("exact solution is its own leader", [] {
        const Field f = make_constant({1.0, 2.0});
        const Path mu = affine_path({1.0, 2.0}, {0.3, 0.4});
        LeaderOptions lo;
        lo.samples = 512;
        const LeaderReport rep = leader_check(f, mu, 200.0, lo);
        if (!rep.pass) return false;
        for (const auto& b : rep.bullet3)
            if (b.window.sup > 1e-9) return false;
        return true;
    });
    check("doubled-speed line fails bullet 3", [] {
        const Field f = make_constant({1.0, 2.0});
        const Path mu = affine_path({2.0, 4.0}, {0.0, 0.0});
        LeaderOptions lo;
        lo.samples = 512;
        const LeaderReport rep = leader_check(f, mu, 200.0, lo);
        // psi_0 - psi_1 = 2 omega_1 t grows linearly
        return !rep.pass && !rep.bullet3[0].pass &&
               std::abs(rep.bullet3[0].drift_rate - 2.0) < 1e-6;
    });
    check("leader distance of the exact solution is 0", [] {
        const Field f = make_constant({1.0, 2.0});
        const Path mu = affine_path({1.0, 2.0}, {0.1, 0.9});
        const DistanceReport rep = leader_distance(f, mu, 150.0);
        return rep.pass && rep.D < 1e-8;
    });
    check("bounded offset gives D near 0.3", [] {
        const Field f = make_constant({1.0, 2.0});
        Path mu;
        mu.dim = 2;
        mu.mu = [](double t, double* out) {
            out[0] = 1.0 * t + 0.3 * std::sin(t);
            out[1] = 2.0 * t;
        };
        mu.mu_dot = [](double t, double* out) {
            out[0] = 1.0 + 0.3 * std::cos(t);
            out[1] = 2.0;
        };
        const DistanceReport rep = leader_distance(f, mu, 150.0);
        return rep.pass && rep.D > 0.29 && rep.D < 0.31;
    });

    // ---- riccati ----
    check("zero system stays at zero", [] {
        const RiccatiSystem sys = riccati_zero(2);
        const Trajectory traj = riccati_simulate(sys, -20.0, 20.0);
        for (const auto& y : traj.x)
            if (max_norm(y) > 1e-14) return false;
        return true;
    });
    check("pure source integrates to a line", [] {
        const RiccatiSystem sys =
            riccati_constant(1, {0.5}, {0.0}, {0.0}, 0.0);
        const Trajectory traj = riccati_simulate(sys, 0.0, 10.0, 1e-12);
        return std::abs(traj.state_at(10.0)[0] - 5.0) < 1e-9;
    });
    check("hypotheses hold for B = 0", [] {
        const RiccatiSystem sys = riccati_constant(1, {0.3}, {0.0}, {0.0}, 0.0);
        HypothesisOptions ho;
        ho.samples = 512;
        const HypothesisReport rep = hypothesis_check(sys, 200.0, ho);
        return rep.h1_pass && rep.h1_trace.sup < 1e-12;
    });
    check("zero-mean oscillating B passes H1", [] {
        RiccatiSystem sys;
        sys.q = 1;
        sys.gamma = 0.5;
        sys.name = "sin";
        sys.A = [](double, double* a) { a[0] = 0.0; };
        sys.B = [](double t, double* b) { b[0] = 0.5 * std::sin(2.0 * M_PI * t); };
        sys.H = [](double, double* h) { h[0] = 0.0; };
        HypothesisOptions ho;
        ho.samples = 512;
        return hypothesis_check(sys, 200.0, ho).h1_pass;
    });
    check("constant B = 0.1 fails H1", [] {
        const RiccatiSystem sys = riccati_counterexample_b(1);
        HypothesisOptions ho;
        ho.samples = 512;
        const HypothesisReport rep = hypothesis_check(sys, 200.0, ho);
        return !rep.h1_trace.pass;
    });
    check("zero system boundedness verdict", [] {
        const BoundednessVerdict v = boundedness_verdict(riccati_zero(2), 200.0);
        return v.pass && v.sup < 1e-14;
    });
    check("linearize around the exact constant solution", [] {
        const Field f = make_constant({1.0, 2.0});
        const Path mu = affine_path({1.0, 2.0}, {0.0, 0.0});
        const RiccatiSystem sys = linearize(f, mu);
        double a[2], b[4];
        sys.A(3.7, a);
        sys.B(3.7, b);
        return std::abs(a[0]) < 1e-15 && std::abs(a[1]) < 1e-15 && std::abs(b[0]) < 1e-15 &&
               std::abs(b[3]) < 1e-15;
    });

    // ---- tongue / perturbation ----
    check("zero perturbation is locked", [] {
        const Field f = make_circle(2.0, 0.1);
        const ZetaFn zeta = [](double, double* out) { out[0] = 0.0; };
        PerturbationOptions po;
        po.samples = 256;
        const PerturbationVerdict v =
            perturbation_criterion(f, {0.0}, {1.9974984355438178}, zeta, 200.0, po);
        return v.locked && v.sup < 1e-12;
    });
    check("constant perturbation of a constant field unlocks", [] {
        const Field f = make_constant({1.0, 2.0});
        const ZetaFn zeta = [](double, double* out) {
            out[0] = 0.25;
            out[1] = 0.0;
        };
        PerturbationOptions po;
        po.samples = 256;
        const PerturbationVerdict v =
            perturbation_criterion(f, {0.0, 0.0}, {1.0, 2.0}, zeta, 200.0, po);
        return !v.locked;
    });
    check("tongue scan eps = 0 row locks only at Omega = 0", [] {
        const FamilyFn family = [](double omega, double eps) { return make_circle(omega, -eps); };
        TongueOptions to;
        to.horizon = 200.0;
        to.targets = {0.0};
        to.threads = 1;
        const TongueGrid grid =
            tongue_scan(family, {-0.2, -0.1, 0.0, 0.1, 0.2}, {0.0}, to);
        for (size_t i = 0; i < 5; ++i) {
            const TongueCell& cell = grid.at(i, 0);
            if (!cell.ok) return false;
            if (std::abs(cell.rho[0] - grid.axis1[i]) > 1e-9) return false;
            if (cell.locked != (i == 2)) return false;
        }
        return true;
    });

    return res;
}

} // namespace rotvec
