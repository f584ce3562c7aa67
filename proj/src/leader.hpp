#ifndef ROTVEC_LEADER_HPP
#define ROTVEC_LEADER_HPP

#include <string>
#include <vector>

#include "field.hpp"
#include "flow.hpp"
#include "psi.hpp"

namespace rotvec {

struct BulletReport {
    WindowTest window;
    double drift_rate = 0.0; // least-squares linear slope of the quantity vs t
    int tau = -1;            // orientation (bullet 2/3)
    bool pass = false;
};

struct LeaderReport {
    BulletReport bullet1;               // |int sigma(dg(mu))| bounded, two-sided
    std::vector<BulletReport> bullet2;  // per i, one-sided sup with orientation tau_i
    std::vector<BulletReport> bullet3;  // per i, |psi_0 - psi_i| bounded, two-sided
    bool pass = false;
    std::string note;
};

struct LeaderOptions {
    double quad_h = 1e-2;
    double ode_tol = 1e-10;
    double slope_tol = 1e-3;
    int samples = 2049; // per side
};

// Verifies the three leader-trajectory conditions for mu against g on [-T, T].
LeaderReport leader_check(const Field& g, const Path& mu, double T, const LeaderOptions& opts = {});

struct DistanceReport {
    WindowTest window;
    double D = 0.0; // empirical sup ||mu(t) - x(t)||
    double drift_rate = 0.0;
    bool pass = false;
};

// Integrates x from mu(0) over [-T, T] and windows ||mu(t) - x(t)||.
DistanceReport leader_distance(const Field& f, const Path& mu, double T, double tol = 1e-10,
                               double slope_tol = 1e-3);

} // namespace rotvec

#endif
