#include "field.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "errors.hpp"

namespace rotvec {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void require_finite(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw argument_error(std::string(what) + ": parameters must be finite");
}

} // namespace

void Field::jacobian(const double* x, double* out) const {
    if (jac) {
        jac(x, out);
    } else {
        fd_jacobian(*this, x, out);
    }
}

void fd_jacobian(const Field& f, const double* x, double* out) {
    const int n = f.dim;
    const double h0 = std::cbrt(std::numeric_limits<double>::epsilon());
    std::vector<double> xp(x, x + n), fp(n), fm(n);
    for (int j = 0; j < n; ++j) {
        const double h = h0 * (1.0 + std::abs(x[j]));
        const double save = xp[j];
        xp[j] = save + h;
        f.eval(xp.data(), fp.data());
        xp[j] = save - h;
        f.eval(xp.data(), fm.data());
        xp[j] = save;
        for (int i = 0; i < n; ++i) out[static_cast<size_t>(i) * n + j] = (fp[i] - fm[i]) / (2.0 * h);
    }
}

Field make_constant(std::vector<double> omega) {
    if (omega.empty()) throw argument_error("constant model: empty frequency vector");
    require_finite(omega, "constant model");
    Field f;
    f.dim = static_cast<int>(omega.size());
    f.name = "constant";
    f.params = omega;
    f.sup_norm = max_norm(omega);
    f.jac_norm = 0.0;
    f.hess_norm = 0.0;
    const int n = f.dim;
    f.eval = [omega, n](const double*, double* out) {
        for (int i = 0; i < n; ++i) out[i] = omega[i];
    };
    f.jac = [n](const double*, double* out) {
        for (int i = 0; i < n * n; ++i) out[i] = 0.0;
    };
    return f;
}

Field make_circle(double c, double eps) {
    if (!std::isfinite(c) || !std::isfinite(eps)) throw argument_error("circle model: parameters must be finite");
    Field f;
    f.dim = 1;
    f.name = "circle";
    f.params = {c, eps};
    f.sup_norm = std::abs(c) + std::abs(eps);
    f.jac_norm = kTwoPi * std::abs(eps);
    f.hess_norm = kTwoPi * kTwoPi * std::abs(eps);
    f.eval = [c, eps](const double* x, double* out) { out[0] = c + eps * std::sin(kTwoPi * x[0]); };
    f.jac = [eps](const double* x, double* out) { out[0] = kTwoPi * eps * std::cos(kTwoPi * x[0]); };
    return f;
}

Field make_torus_product(std::vector<double> c, std::vector<double> eps) {
    if (c.size() != eps.size()) throw argument_error("torus-product model: c and eps must have equal length");
    if (c.size() < 2) throw argument_error("torus-product model: dimension must be >= 2");
    require_finite(c, "torus-product model");
    require_finite(eps, "torus-product model");
    Field f;
    const int n = static_cast<int>(c.size());
    f.dim = n;
    f.name = "torus-product";
    f.params = c;
    f.params.insert(f.params.end(), eps.begin(), eps.end());
    double sup = 0.0, jn = 0.0;
    for (int i = 0; i < n; ++i) {
        sup = std::max(sup, std::abs(c[i]) + std::abs(eps[i]));
        jn = std::max(jn, kTwoPi * std::abs(eps[i]));
    }
    f.sup_norm = sup;
    f.jac_norm = jn;
    f.hess_norm = kTwoPi * jn;
    f.eval = [c, eps, n](const double* x, double* out) {
        for (int i = 0; i < n; ++i) out[i] = c[i] + eps[i] * std::sin(kTwoPi * x[i]);
    };
    f.jac = [eps, n](const double* x, double* out) {
        for (int i = 0; i < n * n; ++i) out[i] = 0.0;
        for (int i = 0; i < n; ++i) out[static_cast<size_t>(i) * n + i] = kTwoPi * eps[i] * std::cos(kTwoPi * x[i]);
    };
    return f;
}

// f_i(x) = omega_i + (kappa/n) * sum_j P(x_j) * R(x_i)
// with P(x) = 1 + cos(2 pi x) and R(x) = -sin(2 pi x).
Field make_winfree(std::vector<double> omega, double kappa) {
    if (omega.empty()) throw argument_error("winfree-type model: empty frequency vector");
    require_finite(omega, "winfree-type model");
    if (!std::isfinite(kappa)) throw argument_error("winfree-type model: kappa must be finite");
    Field f;
    const int n = static_cast<int>(omega.size());
    f.dim = n;
    f.name = "winfree-type";
    f.params = omega;
    f.params.push_back(kappa);
    const double ka = std::abs(kappa);
    f.sup_norm = max_norm(omega) + 2.0 * ka;              // |P| <= 2, |R| <= 1
    f.jac_norm = 6.0 * (kTwoPi / 2.0) * ka;               // row sum <= kappa (2 pi + 4 pi)
    f.hess_norm = 4.0 * kTwoPi * kTwoPi * ka;             // 16 pi^2 kappa
    f.eval = [omega, kappa, n](const double* x, double* out) {
        double psum = 0.0;
        for (int j = 0; j < n; ++j) psum += 1.0 + std::cos(kTwoPi * x[j]);
        const double w = kappa / n;
        for (int i = 0; i < n; ++i) out[i] = omega[i] - w * psum * std::sin(kTwoPi * x[i]);
    };
    f.jac = [kappa, n](const double* x, double* out) {
        const double w = kappa / n;
        double psum = 0.0;
        std::vector<double> pp(n), s(n), cs(n);
        for (int j = 0; j < n; ++j) {
            psum += 1.0 + std::cos(kTwoPi * x[j]);
            pp[j] = -kTwoPi * std::sin(kTwoPi * x[j]); // P'
            s[j] = std::sin(kTwoPi * x[j]);
            cs[j] = std::cos(kTwoPi * x[j]);
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double v = -w * pp[j] * s[i]; // P'(x_j) R(x_i) term, R = -sin
                if (i == j) v += -w * psum * kTwoPi * cs[i];
                out[static_cast<size_t>(i) * n + j] = v;
            }
    };
    return f;
}

Field make_model(const ModelSpec& spec) {
    if (spec.model == "constant") return make_constant(spec.omega);
    if (spec.model == "circle") {
        if (spec.c.size() != 1 || spec.eps.size() != 1)
            throw argument_error("circle model: expects scalar c and eps");
        return make_circle(spec.c[0], spec.eps[0]);
    }
    if (spec.model == "torus-product") return make_torus_product(spec.c, spec.eps);
    if (spec.model == "winfree-type") return make_winfree(spec.omega, spec.kappa);
    throw argument_error("unknown model name: " + spec.model);
}

CheckReport periodicity_check(const Field& f, int sample_count, uint64_t seed) {
    if (sample_count < 1) throw argument_error("periodicity_check: sample_count must be >= 1");
    const int n = f.dim;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    std::vector<double> x(n), y(n), fx(n), fy(n);
    CheckReport rep;
    rep.tolerance = 1e-10;
    rep.samples = sample_count;
    for (int s = 0; s < sample_count; ++s) {
        for (int i = 0; i < n; ++i) x[i] = unif(rng);
        f.eval(x.data(), fx.data());
        for (int j = 0; j < n; ++j) {
            y = x;
            y[j] += 1.0;
            f.eval(y.data(), fy.data());
            for (int i = 0; i < n; ++i) rep.max_deviation = std::max(rep.max_deviation, std::abs(fy[i] - fx[i]));
        }
    }
    rep.pass = rep.max_deviation < rep.tolerance;
    return rep;
}

CheckReport jacobian_check(const Field& f, int sample_count, uint64_t seed) {
    if (sample_count < 1) throw argument_error("jacobian_check: sample_count must be >= 1");
    if (!f.has_analytic_jacobian()) throw argument_error("jacobian_check: field has no analytic Jacobian");
    const int n = f.dim;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    std::vector<double> x(n), ja(static_cast<size_t>(n) * n), jd(static_cast<size_t>(n) * n);
    std::vector<double> xp(n), fp(n), fm(n);
    CheckReport rep;
    rep.tolerance = 1e-5;
    rep.samples = sample_count;
    const double h = 1e-6;
    for (int s = 0; s < sample_count; ++s) {
        for (int i = 0; i < n; ++i) x[i] = unif(rng);
        f.jac(x.data(), ja.data());
        xp = x;
        for (int j = 0; j < n; ++j) {
            const double save = xp[j];
            xp[j] = save + h;
            f.eval(xp.data(), fp.data());
            xp[j] = save - h;
            f.eval(xp.data(), fm.data());
            xp[j] = save;
            for (int i = 0; i < n; ++i) jd[static_cast<size_t>(i) * n + j] = (fp[i] - fm[i]) / (2.0 * h);
        }
        for (size_t k = 0; k < ja.size(); ++k) rep.max_deviation = std::max(rep.max_deviation, std::abs(ja[k] - jd[k]));
    }
    rep.pass = rep.max_deviation < rep.tolerance;
    return rep;
}

} // namespace rotvec
