#pragma once

#include <string>
#include <vector>

#include "nlch/extended_real.hpp"
#include "nlch/kernel.hpp"
#include "nlch/model.hpp"
#include "nlch/potential.hpp"
#include "nlch/state.hpp"

namespace nlch {

/// Non-local free energy
///   E(phi) = 1/4 sum sum J(x-y) |phi(x) - phi(y)|^2 |cell|^2 + sum F(phi) |cell|
/// with the pairwise sum evaluated as 1/2 <a phi, phi> - 1/2 <J*phi, phi>.
/// Uses F_lambda when lambda > 0; with lambda = 0 returns +inf as soon as phi
/// leaves [0,1).
ExtendedReal energy(const Field& phi, const DiscreteKernel& k, const PotentialParams& pot);
double nonlocal_energy(const Field& phi, const DiscreteKernel& k);

struct MeanEnvelope {
  double lo = 0.0;
  double hi = 0.0;
};

/// y0 e^{-mt} <= mean(phi)(t) <= y0 e^{-mt} + (1 - e^{-mt}) K/m.
/// Throws PreconditionError unless m > 0, K >= 0 and y0 in (0,1).
MeanEnvelope mean_envelope(double t, double y0, double m, double K);

/// delta = min{1/4, y0 e^{-mT}, 1 - max{K/m, y0}}; keeps the mean in
/// [delta, 1 - delta] on [0, T]. Throws PreconditionError if K >= m.
double delta_for_mean(double y0, double m, double K, double T);

struct LyapunovValue {
  double J = 0.0;
  double grad_mu_sq = 0.0;  // ||grad mu||^2
  double dtphi_sq = 0.0;    // ||(phi - phi_prev)/dt||^2
  /// (||grad mu||^2 + ||d_t phi||^2) / (J + 1); +inf when J + 1 <= 0.
  double coercivity_ratio = 0.0;
};

/// J = 1/2 ||grad mu||^2 - (S(phi, sigma), mu) + tau/2 ||d_t phi||^2 at the
/// later state, with d_t phi = (phi - phi_prev)/dt.
LyapunovValue lyapunov_J(const State& prev, const State& s, double dt, const ModelParams& p);
/// Same functional with an explicitly supplied time derivative.
LyapunovValue lyapunov_J(const State& s, const Field& dtphi, const ModelParams& p);

struct Residuals {
  double r_phi = 0.0;
  double r_sigma = 0.0;
  double r_mu = 0.0;
  double max() const;
};

/// Max-norm residuals of the discrete phi, sigma and mu identities for the
/// step prev -> s, in the form the given splitting discretizes them.
Residuals weak_residuals(const State& prev, const State& s, double dt, const ModelParams& p,
                         const DiscreteKernel& k, const PotentialParams& pot,
                         Splitting splitting = Splitting::convex_split);

/// Pointwise right-hand side of the phi-ODE
///   tau (phi - phi_prev)/dt + a phi + F'_lambda(phi) = drive
/// for one step of the scheme; its sup over the run feeds separation_delta.
Field separation_drive(const State& prev, const State& s, const ModelParams& p, const DiscreteKernel& k,
                       const PotentialParams& pot, Splitting splitting = Splitting::convex_split);

/// Largest delta in (0, delta_bar] such that F'_lambda(r) >= drive_sup for
/// every r in (1 - delta, 1]. Returns a non-positive value when no such delta
/// exists.
double separation_delta(const PotentialParams& pot, double drive_sup, double delta_bar);

/// One row of the per-step diagnostics table.
struct DiagnosticsRecord {
  double t = 0.0;
  double mean_phi = 0.0;
  double mean_lo = 0.0;
  double mean_hi = 0.0;
  double min_phi = 0.0;
  double max_phi = 0.0;
  double min_sigma = 0.0;
  double max_sigma = 0.0;
  double energy = 0.0;
  double J = 0.0;
  double r_phi = 0.0;
  double r_sigma = 0.0;
  double r_mu = 0.0;
  std::vector<std::string> flags;
};

}  // namespace nlch
