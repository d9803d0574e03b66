#include "nlch/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlch/calculus.hpp"
#include "nlch/errors.hpp"

namespace nlch {

double nonlocal_energy(const Field& phi, const DiscreteKernel& k) {
  const Field jphi = convolve(k, phi);
  const Field& a = k.a_field();
  double s = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) s += (a[i] * phi[i] - jphi[i]) * phi[i];
  return 0.5 * s * phi.grid().cell_volume();
}

ExtendedReal energy(const Field& phi, const DiscreteKernel& k, const PotentialParams& pot) {
  const double vol = phi.grid().cell_volume();
  ExtendedReal local = 0.0;
  if (pot.lambda() > 0.0) {
    double s = 0.0;
    for (double v : phi.values()) s += eval_F_lambda(v, pot);
    local = s * vol;
  } else {
    double s = 0.0;
    for (double v : phi.values()) {
      const ExtendedReal f = eval_F(v, pot);
      if (f.is_infinite()) return ExtendedReal::infinity();
      s += f.value();
    }
    local = s * vol;
  }
  return ExtendedReal(nonlocal_energy(phi, k)) + local;
}

MeanEnvelope mean_envelope(double t, double y0, double m, double K) {
  if (!(m > 0.0)) throw PreconditionError("mean envelope requires m > 0");
  if (!(K >= 0.0)) throw PreconditionError("mean envelope requires K >= 0");
  if (!(y0 > 0.0 && y0 < 1.0)) throw PreconditionError("mean envelope requires y0 in (0,1)");
  const double decay = std::exp(-m * t);
  return {y0 * decay, y0 * decay + (1.0 - decay) * K / m};
}

double delta_for_mean(double y0, double m, double K, double T) {
  if (!(K < m)) throw PreconditionError("delta_for_mean requires K < m");
  if (!(y0 > 0.0 && y0 < 1.0)) throw PreconditionError("delta_for_mean requires y0 in (0,1)");
  return std::min({0.25, y0 * std::exp(-m * T), 1.0 - std::max(K / m, y0)});
}

LyapunovValue lyapunov_J(const State& s, const Field& dtphi, const ModelParams& p) {
  LyapunovValue v;
  v.grad_mu_sq = grad_norm_sq(s.mu);
  v.dtphi_sq = inner(dtphi, dtphi);
  const Field S = eval_S(s.phi, s.sigma, p);
  v.J = 0.5 * v.grad_mu_sq - inner(S, s.mu) + 0.5 * p.tau * v.dtphi_sq;
  const double denom = v.J + 1.0;
  v.coercivity_ratio = denom > 0.0 ? (v.grad_mu_sq + v.dtphi_sq) / denom : std::numeric_limits<double>::infinity();
  return v;
}

LyapunovValue lyapunov_J(const State& prev, const State& s, double dt, const ModelParams& p) {
  Field dtphi = s.phi - prev.phi;
  dtphi *= 1.0 / dt;
  return lyapunov_J(s, dtphi, p);
}

double Residuals::max() const { return std::max({r_phi, r_sigma, r_mu}); }

Residuals weak_residuals(const State& prev, const State& s, double dt, const ModelParams& p,
                         const DiscreteKernel& k, const PotentialParams& pot, Splitting splitting) {
  Residuals r;
  const Field lap_mu = neumann_laplacian(s.mu);
  const Field lap_sigma = neumann_laplacian(s.sigma);
  const Field S = eval_S(prev.phi, s.sigma, p);
  const Field supply = supply_field(p, s.phi.grid());
  const Field jphi = convolve(k, prev.phi);
  const Field& a = k.a_field();
  for (std::size_t i = 0; i < s.phi.size(); ++i) {
    const double dphi = (s.phi[i] - prev.phi[i]) / dt;
    r.r_phi = std::max(r.r_phi, std::abs(dphi - lap_mu[i] - S[i]));

    const double dsig = (s.sigma[i] - prev.sigma[i]) / dt;
    const double react = p.B * (s.sigma[i] - supply[i]) + p.C * s.sigma[i] * p.h2.h2(prev.phi[i]);
    r.r_sigma = std::max(r.r_sigma, std::abs(dsig - lap_sigma[i] + react));

    double local = 0.0;
    if (splitting == Splitting::convex_split) {
      local = eval_dF1_lambda(s.phi[i], pot) + eval_dF2_bar(prev.phi[i], pot);
    } else {
      local = eval_dF_lambda(s.phi[i], pot);
    }
    const double mu = p.tau * dphi + a[i] * s.phi[i] + local - jphi[i] - p.chi * s.sigma[i];
    r.r_mu = std::max(r.r_mu, std::abs(s.mu[i] - mu));
  }
  return r;
}

Field separation_drive(const State& prev, const State& s, const ModelParams& p, const DiscreteKernel& k,
                       const PotentialParams& pot, Splitting splitting) {
  const Field jphi = convolve(k, prev.phi);
  Field out(s.phi.grid());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double v = s.mu[i] + p.chi * s.sigma[i] + jphi[i];
    // The scheme treats F2_bar explicitly; moving it to the implicit side
    // leaves this correction on the right.
    if (splitting == Splitting::convex_split) v += eval_dF2_bar(s.phi[i], pot) - eval_dF2_bar(prev.phi[i], pot);
    out[i] = v;
  }
  return out;
}

double separation_delta(const PotentialParams& pot, double drive_sup, double delta_bar) {
  const auto f = [&](double r) { return eval_dF_lambda(r, pot) - drive_sup; };
  // Last point of [0,1] where F'_lambda < drive_sup.
  const int n = 100000;
  int last = -1;
  for (int i = 0; i <= n; ++i) {
    if (f(static_cast<double>(i) / n) < 0.0) last = i;
  }
  if (last < 0) return delta_bar;
  if (last == n) return 0.0;
  double lo = static_cast<double>(last) / n;
  double hi = static_cast<double>(last + 1) / n;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return std::min(delta_bar, 1.0 - hi);
}

}  // namespace nlch
