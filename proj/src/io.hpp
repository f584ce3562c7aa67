#ifndef ROTVEC_IO_HPP
#define ROTVEC_IO_HPP

#include <ostream>
#include <string>
#include <vector>

#include "flow.hpp"
#include "leader.hpp"
#include "psi.hpp"
#include "riccati.hpp"
#include "solver.hpp"
#include "tongue.hpp"

namespace rotvec {

// All floating-point output goes through this: 9 significant digits, so that
// identical configs give byte-identical files.
std::string fmt9(double v);
std::string join9(const std::vector<double>& v, const std::string& sep = ",");

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_psi_curves_csv(std::ostream& os, const std::vector<PsiCurve>& curves);
void write_residual_csv(std::ostream& os, const ResidualReport& rep);
void write_tongue_csv(std::ostream& os, const TongueGrid& grid);
void write_solver_diag_csv(std::ostream& os, const FixedPointResult& fp);

std::string leader_report_json(const LeaderReport& rep);
std::string distance_report_json(const DistanceReport& rep);
std::string hypothesis_report_json(const HypothesisReport& rep);
std::string solve_result_json(const SolveResult& res);
std::string rotation_estimate_json(const RotationEstimate& est, const WindowTest& wt);
std::string perturbation_verdict_json(const PerturbationVerdict& v);
std::string window_test_json(const WindowTest& wt);

} // namespace rotvec

#endif
