#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nlch/config.hpp"
#include "nlch/csv.hpp"
#include "nlch/solver.hpp"

namespace nlch {

/// Exit codes shared by the command drivers and the executable.
enum ExitCode : int { exit_ok = 0, exit_validation = 2, exit_solver = 3, exit_io = 4 };

/// Module-level objects resolved from a RunConfig.
struct Setup {
  Grid grid;
  Problem problem;
  SchemeConfig scheme;
  State initial;  // phi and sigma only; mu is filled in by the solver
  RunOptions options;
};

Setup make_setup(const RunConfig& c);

// ---------------------------------------------------------------------------
// check

struct CheckResult {
  ValidationReport validation;
  JunctionReport junctions;
  CurvatureMinimum curvature;
  A5Report a5;
  double minorant_eps_hat = 0.0;
  std::vector<std::string> warnings;
  bool ok = false;
};

CheckResult run_check(const RunConfig& c);
std::string format_check(const CheckResult& r);

// ---------------------------------------------------------------------------
// compare: sup_t ||phi diff (mean-adjusted)||_V' + sup_t ||phi diff|| +
// sup_t ||sigma diff|| + ||sigma diff||_{L2(0,T;V)} against the same
// quantities of the initial data.

struct CompareNorms {
  double vprime_phi = 0.0;
  double l2_phi = 0.0;
  double l2_sigma = 0.0;
  double l2v_sigma = 0.0;  // zero for the initial-data bundle
  double total() const { return vprime_phi + l2_phi + l2_sigma + l2v_sigma; }
};

struct CompareReport {
  CompareNorms lhs;
  CompareNorms rhs;
  double ratio = 0.0;  // empirical M_tau; 0 when both bundles vanish
  int steps = 0;
  bool ok = true;
  std::string error;
};

/// Runs both initial states with identical problem and scheme. Throws
/// PreconditionError for tau outside (0, 1] or grid mismatch.
CompareReport compare_runs(const Problem& prob, const SchemeConfig& cfg, const State& a, const State& b, double T);

/// cos(mode pi x / L) along the first axis.
Field compare_perturbation(const Grid& g, int mode);

// ---------------------------------------------------------------------------
// tau sweep against the tau = 0 run

struct TauEntry {
  double tau = 0.0;
  double err_phi = 0.0;    // ||phi_tau - phi_0||_{L2(0,T;H)}
  double err_sigma = 0.0;  // ||sigma_tau - sigma_0||_{L2(0,T;H)}
  double viscous = 0.0;    // tau ||d_t phi_tau||^2_{L2(Q)}
  double sqrt_tau_sup_V = 0.0;  // tau^{1/2} sup_t ||phi_tau||_V
  bool ok = true;
  std::string error;
};

struct TauSweep {
  std::vector<TauEntry> entries;  // in the order given
  bool monotone = false;          // err_phi strictly decreasing along the positive taus
  bool bounded = false;           // max viscous <= 2 x value at the largest tau
  bool ok = false;
};

/// Taus must be decreasing, non-negative and end with 0. Runs execute
/// concurrently. Throws PreconditionError on a malformed list.
TauSweep sweep_tau(const RunConfig& c, const std::vector<double>& taus);

// ---------------------------------------------------------------------------
// lambda sweep

struct LambdaEntry {
  double lambda = 0.0;
  double dist_next = 0.0;    // ||phi_lambda - phi_next||_{L2(Q)}; 0 for the last entry
  double F_mismatch = 0.0;   // sup over the trajectory of |F_lambda(phi) - F(phi)|; inf once phi leaves [0,1)
  double max_phi = 0.0;
  double min_phi = 0.0;
  bool ok = true;
  std::string error;
};

struct LambdaSweep {
  std::vector<LambdaEntry> entries;
  std::vector<double> ratios;  // dist_next[k+1] / dist_next[k]
  bool cauchy = false;         // every ratio <= 0.7
  bool ok = false;
};

/// Lambdas must be positive and decreasing. Runs execute concurrently.
LambdaSweep sweep_lambda(const RunConfig& c, const std::vector<double>& lambdas);

// ---------------------------------------------------------------------------

/// Columns r, F, F_lambda, dF_lambda on [r_min, r_max].
Table potential_table(const PotentialParams& p, double r_min = -0.2, double r_max = 1.1, int samples = 1301);

/// L2(0,T;H) distance of two trajectories sampled at the same times.
double trajectory_distance(const std::vector<State>& a, const std::vector<State>& b,
                           Field State::*field = &State::phi);

// ---------------------------------------------------------------------------
// Command drivers: write artifacts under out_dir, print a report to `os` and
// return an ExitCode.

int cmd_check(const RunConfig& c, std::ostream& os);
int cmd_run(const RunConfig& c, std::ostream& os);
int cmd_compare(const RunConfig& a, const std::optional<RunConfig>& b, std::ostream& os);
int cmd_sweep_tau(const RunConfig& c, std::ostream& os);
int cmd_sweep_lambda(const RunConfig& c, std::ostream& os);
int cmd_potential_table(const RunConfig& c, std::ostream& os);

}  // namespace nlch
