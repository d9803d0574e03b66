#pragma once

#include <string>
#include <vector>

#include "nlch/diagnostics.hpp"
#include "nlch/kernel.hpp"
#include "nlch/model.hpp"
#include "nlch/potential.hpp"
#include "nlch/state.hpp"

namespace nlch {

/// Everything a time step needs besides the state.
struct Problem {
  ModelParams model;
  PotentialParams pot = PotentialParams::make(0.6, 1e-3);
  DiscreteKernel kernel;
};

struct StepStats {
  int newton_iterations = 0;
  int halvings = 0;
  Residuals residuals;          // max over accepted sub-steps
  double separation_drive = 0;  // max over accepted sub-steps of the phi-ODE drive
};

/// One step of size cfg.dt:
///  1. sigma: (s - s_n)/dt - lap s + B (s - sigma_S) + C s h2(phi_n) = 0  (linear)
///  2. (phi, mu): (phi - phi_n)/dt - lap mu = S(phi_n, sigma)
///     mu = tau (phi - phi_n)/dt + a phi + F1_lambda'(phi) - J*phi_n + F2_bar'(phi_n) - chi sigma
///     solved by Newton on phi with mu eliminated.
/// Throws SolverError when Newton fails to converge.
State step(const State& s, const Problem& prob, const SchemeConfig& cfg, StepStats* stats = nullptr);

/// step() with automatic halving (up to cfg.max_halvings levels) on Newton failure.
State advance(const State& s, const Problem& prob, const SchemeConfig& cfg, StepStats* stats = nullptr);

/// Consistent initial chemical potential: solves the elliptic problem for the
/// initial velocity phi'_0 - tau lap phi'_0 = S + lap(w0), mu0 = tau phi'_0 + w0,
/// with w0 = a phi0 - J*phi0 + F'_lambda(phi0) - chi sigma0.
State initial_state(const Field& phi0, const Field& sigma0, const Problem& prob, Field* velocity = nullptr);

struct MonitorConfig {
  double mp_tol = 1e-8;             // max-principle slack
  double mean_slack_per_dt = 5.0;   // envelope widened by this * dt
  double residual_tol = 1e-8;
  double lyapunov_blowup = 10.0;    // flag when J > factor * (|J0| + 1)
};

struct RunOptions {
  double T = 1.0;
  int snapshot_every = 0;  // 0: no snapshots
  bool store_trajectory = false;
  MonitorConfig monitors;
};

struct RunSummary {
  int steps = 0;
  int halvings = 0;
  int newton_iterations = 0;
  double max_residual = 0.0;
  double min_phi = 0.0;
  double max_phi = 0.0;
  double min_sigma = 0.0;
  double max_sigma = 0.0;
  double worst_mean_slack = 0.0;   // min over steps of distance inside the widened envelope
  double max_mass_defect = 0.0;    // max |mean(phi_{n+1}) - mean(phi_n) - dt mean(S)|
  double energy_max_increase = 0.0;
  double empirical_M_tau = 0.0;
  double max_J = 0.0;
  double separation_drive = 0.0;   // sup of the phi-ODE drive over the run
  int flagged_records = 0;
};

struct RunResult {
  bool ok = true;
  std::string error;
  std::vector<DiagnosticsRecord> records;
  std::vector<State> snapshots;
  std::vector<State> trajectory;  // every accepted macro step, t = 0 included
  State final_state;
  RunSummary summary;
};

/// Integrates from the initial state to opts.T, emitting one record per step.
/// Solver failures and non-finite values end the run with ok = false and the
/// last valid state in final_state.
RunResult run(const Problem& prob, const SchemeConfig& cfg, const State& initial, const RunOptions& opts);

}  // namespace nlch
