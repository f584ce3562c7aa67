#include "io.hpp"

#include <cstdio>

#include <nlohmann/json.hpp>

namespace rotvec {

using json = nlohmann::ordered_json;

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string join9(const std::vector<double>& v, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += fmt9(v[i]);
    }
    return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t";
    for (int i = 1; i <= traj.dim; ++i) os << ",x" << i;
    os << "\n";
    for (size_t k = 0; k < traj.size(); ++k)
        os << fmt9(traj.t[k]) << "," << join9(traj.x[k]) << "\n";
}

void write_psi_curves_csv(std::ostream& os, const std::vector<PsiCurve>& curves) {
    os << "t";
    for (const auto& c : curves) os << ",psi_" << c.index;
    os << "\n";
    if (curves.empty()) return;
    for (size_t k = 0; k < curves[0].times.size(); ++k) {
        os << fmt9(curves[0].times[k]);
        for (const auto& c : curves) os << "," << fmt9(c.values[k]);
        os << "\n";
    }
}

void write_residual_csv(std::ostream& os, const ResidualReport& rep) {
    os << "t";
    for (size_t i = 1; i <= rep.R.size(); ++i) os << ",R_" << i;
    os << "\n";
    for (size_t k = 0; k < rep.times.size(); ++k) {
        os << fmt9(rep.times[k]);
        for (const auto& ri : rep.R) os << "," << fmt9(ri[k]);
        os << "\n";
    }
}

void write_tongue_csv(std::ostream& os, const TongueGrid& grid) {
    size_t n = 0;
    for (const auto& cell : grid.cells)
        if (cell.ok) {
            n = cell.rho.size();
            break;
        }
    os << "param1,param2";
    for (size_t i = 1; i <= n; ++i) os << ",rho_" << i;
    os << ",locked\n";
    for (const auto& cell : grid.cells) {
        os << fmt9(cell.p1) << "," << fmt9(cell.p2);
        for (size_t i = 0; i < n; ++i) os << "," << (cell.ok ? fmt9(cell.rho[i]) : "nan");
        os << "," << (cell.locked ? 1 : 0) << "\n";
    }
}

void write_solver_diag_csv(std::ostream& os, const FixedPointResult& fp) {
    os << "k,iterations,residual";
    const size_t q = fp.rho_star.size();
    for (size_t i = 1; i <= q; ++i) os << ",rho_" << i;
    os << "\n";
    for (size_t j = 0; j < fp.ks.size(); ++j) {
        os << fp.ks[j] << "," << fp.iterations[j] << "," << fmt9(fp.residuals[j]);
        for (size_t i = 0; i < q; ++i) os << "," << fmt9(fp.rho_k[j][i]);
        os << "\n";
    }
}

namespace {

json window_to_json(const WindowTest& wt) {
    return json{{"pass", wt.pass},          {"slope", wt.slope},
                {"slope_tol", wt.slope_tol}, {"sup", wt.sup},
                {"two_sided", wt.two_sided}, {"window_sups", wt.window_sup}};
}

json bullet_to_json(const BulletReport& b) {
    return json{
        {"pass", b.pass}, {"tau", b.tau}, {"drift_rate", b.drift_rate}, {"window", window_to_json(b.window)}};
}

json part_to_json(const HypothesisPart& p) {
    return json{{"pass", p.pass}, {"tau", p.tau}, {"sup", p.sup}, {"window", window_to_json(p.window)}};
}

} // namespace

std::string window_test_json(const WindowTest& wt) { return window_to_json(wt).dump(2); }

std::string leader_report_json(const LeaderReport& rep) {
    json j;
    j["pass"] = rep.pass;
    j["note"] = rep.note;
    j["bullet1"] = bullet_to_json(rep.bullet1);
    j["bullet2"] = json::array();
    for (const auto& b : rep.bullet2) j["bullet2"].push_back(bullet_to_json(b));
    j["bullet3"] = json::array();
    for (const auto& b : rep.bullet3) j["bullet3"].push_back(bullet_to_json(b));
    return j.dump(2);
}

std::string distance_report_json(const DistanceReport& rep) {
    json j;
    j["pass"] = rep.pass;
    j["D"] = rep.D;
    j["drift_rate"] = rep.drift_rate;
    j["window"] = window_to_json(rep.window);
    return j.dump(2);
}

std::string hypothesis_report_json(const HypothesisReport& rep) {
    json j;
    j["pass"] = rep.pass;
    j["h1_pass"] = rep.h1_pass;
    j["h2_pass"] = rep.h2_pass;
    j["h1_trace"] = part_to_json(rep.h1_trace);
    j["h1_conjugated"] = json::array();
    for (const auto& p : rep.h1_conj) j["h1_conjugated"].push_back(part_to_json(p));
    j["h2"] = json::array();
    for (const auto& p : rep.h2) j["h2"].push_back(part_to_json(p));
    return j.dump(2);
}

std::string solve_result_json(const SolveResult& res) {
    json j;
    j["rho"] = res.rho;
    j["c"] = res.c;
    j["gamma"] = res.gamma;
    j["suspension_residual"] = res.suspension_residual;
    j["certificate_ok"] = res.certificate_ok;
    j["certificate_limits"] = res.certificate.limit;
    j["certificate_stderr"] = res.certificate.limit_stderr;
    j["warnings"] = res.warnings;
    json ks = json::array();
    for (size_t i = 0; i < res.fp.ks.size(); ++i)
        ks.push_back(json{{"k", res.fp.ks[i]},
                          {"iterations", res.fp.iterations[i]},
                          {"residual", res.fp.residuals[i]},
                          {"rho_k", res.fp.rho_k[i]}});
    j["schedule"] = ks;
    return j.dump(2);
}

std::string rotation_estimate_json(const RotationEstimate& est, const WindowTest& wt) {
    json j;
    j["lambda"] = est.lambda;
    j["residual_sup"] = est.residual_sup;
    j["horizon"] = est.horizon;
    j["boundedness"] = window_to_json(wt);
    return j.dump(2);
}

std::string perturbation_verdict_json(const PerturbationVerdict& v) {
    json j;
    j["locked"] = v.locked;
    j["sup"] = v.sup;
    j["per_index"] = json::array();
    for (const auto& wt : v.per_index) j["per_index"].push_back(window_to_json(wt));
    return j.dump(2);
}

} // namespace rotvec
