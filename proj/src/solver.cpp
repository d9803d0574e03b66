#include "nlch/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nlch/calculus.hpp"
#include "nlch/errors.hpp"
#include "nlch/kernels.hpp"

namespace nlch {

namespace {

Field solve_sigma(const State& s, const Problem& prob, double dt) {
  const ModelParams& p = prob.model;
  const Grid& g = s.phi.grid();
  const Field supply = supply_field(p, g);
  std::vector<double> diag(g.size());
  Field rhs(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    diag[i] = 1.0 / dt + p.B + p.C * p.h2.h2(s.phi[i]);
    rhs[i] = s.sigma[i] / dt + p.B * supply[i];
  }
  return solve_shifted_laplacian(diag, rhs);
}

}  // namespace

State step(const State& s, const Problem& prob, const SchemeConfig& cfg, StepStats* stats) {
  const double dt = cfg.dt;
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  const ModelParams& p = prob.model;
  const PotentialParams& pot = prob.pot;
  const Grid& g = s.phi.grid();
  const std::size_t n = g.size();
  const Field& a = prob.kernel.a_field();
  const bool convex = cfg.splitting == Splitting::convex_split;

  State next;
  next.t = s.t + dt;
  next.sigma = solve_sigma(s, prob, dt);

  // Explicit part of mu and the right-hand side of the phi equation.
  const Field jphi = convolve(prob.kernel, s.phi);
  Field explicit_mu(g);
  for (std::size_t i = 0; i < n; ++i) {
    explicit_mu[i] = -jphi[i] - p.chi * next.sigma[i];
    if (convex) explicit_mu[i] += eval_dF2_bar(s.phi[i], pot);
  }
  const Field S = eval_S(s.phi, next.sigma, p);
  Field b = s.phi;
  for (std::size_t i = 0; i < n; ++i) b[i] += dt * S[i];

  const auto implicit_d1 = [&](double r) { return convex ? eval_dF1_lambda(r, pot) : eval_dF_lambda(r, pot); };
  const auto implicit_d2 = [&](double r) { return convex ? eval_ddF1_lambda(r, pot) : eval_ddF_lambda(r, pot); };

  Field phi = s.phi;
  Field G(g);
  Field D(g);
  std::vector<double> inv_dtD(n);
  Field rhs(g);
  int it = 0;
  double update = std::numeric_limits<double>::infinity();
  for (; it < cfg.newton_max_iter; ++it) {
    kernels::parallel::transform(phi.values(), G.values(), implicit_d1);
    kernels::parallel::transform(phi.values(), D.values(), implicit_d2);
    for (std::size_t i = 0; i < n; ++i) {
      G[i] += p.tau * (phi[i] - s.phi[i]) / dt + a[i] * phi[i] + explicit_mu[i];
      D[i] += p.tau / dt + a[i];
      if (!(D[i] > 0.0) || !std::isfinite(D[i])) {
        throw SolverError("Newton Jacobian lost positivity", std::numeric_limits<double>::infinity());
      }
      inv_dtD[i] = 1.0 / (dt * D[i]);
    }
    const Field lapG = neumann_laplacian(G);
    // Residual R = phi - dt lap G - b; Newton: (I - dt lap D) delta = -R.
    // With w = D delta this is the SPD system (1/(dt D) - lap) w = -R/dt.
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -(phi[i] - dt * lapG[i] - b[i]) / dt;
    const Field w = solve_shifted_laplacian(inv_dtD, rhs);
    update = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double delta = w[i] / D[i];
      phi[i] += delta;
      update = std::max(update, std::abs(delta));
    }
    if (!std::isfinite(update)) throw SolverError("Newton produced non-finite values", update);
    if (update < cfg.newton_tol) {
      ++it;
      break;
    }
  }
  if (!(update < cfg.newton_tol)) {
    std::ostringstream os;
    os << "Newton did not converge in " << cfg.newton_max_iter << " iterations (dt = " << dt << ")";
    throw SolverError(os.str(), update);
  }

  kernels::parallel::transform(phi.values(), G.values(), implicit_d1);
  for (std::size_t i = 0; i < n; ++i) G[i] += p.tau * (phi[i] - s.phi[i]) / dt + a[i] * phi[i] + explicit_mu[i];
  // With mu eliminated the phi equation amplifies one ulp of phi by
  // (tau/dt + a) |lap|. Recover mu from lap mu = (phi - phi_n)/dt - S instead,
  // pinned to mean(G(phi)); both identities then hold near roundoff.
  Field f(g);
  for (std::size_t i = 0; i < n; ++i) f[i] = (phi[i] - s.phi[i]) / dt - S[i];
  f += -mean(f);
  f *= -1.0;
  CgOptions cg;
  cg.rel_tol = 1e-14;
  cg.max_iter_factor = 50;
  Field mu = inv_neumann_laplacian(f, cg);
  mu += mean(G);
  next.phi = std::move(phi);
  next.mu = std::move(mu);

  if (stats) {
    stats->newton_iterations += it;
    const Residuals r = weak_residuals(s, next, dt, p, prob.kernel, pot, cfg.splitting);
    stats->residuals.r_phi = std::max(stats->residuals.r_phi, r.r_phi);
    stats->residuals.r_sigma = std::max(stats->residuals.r_sigma, r.r_sigma);
    stats->residuals.r_mu = std::max(stats->residuals.r_mu, r.r_mu);
    const Field drive = separation_drive(s, next, p, prob.kernel, pot, cfg.splitting);
    stats->separation_drive = std::max(stats->separation_drive, drive.max());
  }
  return next;
}

namespace {

State advance_rec(const State& s, const Problem& prob, SchemeConfig cfg, int depth, StepStats* stats) {
  try {
    return step(s, prob, cfg, stats);
  } catch (const SolverError&) {
    if (depth >= cfg.max_halvings) throw;
  }
  if (stats) ++stats->halvings;
  cfg.dt *= 0.5;
  const State mid = advance_rec(s, prob, cfg, depth + 1, stats);
  return advance_rec(mid, prob, cfg, depth + 1, stats);
}

}  // namespace

State advance(const State& s, const Problem& prob, const SchemeConfig& cfg, StepStats* stats) {
  if (stats) stats->separation_drive = -std::numeric_limits<double>::infinity();
  return advance_rec(s, prob, cfg, 0, stats);
}

State initial_state(const Field& phi0, const Field& sigma0, const Problem& prob, Field* velocity) {
  require_same_grid(phi0, sigma0, "initial_state");
  const ModelParams& p = prob.model;
  const Grid& g = phi0.grid();
  const Field jphi = convolve(prob.kernel, phi0);
  const Field& a = prob.kernel.a_field();
  Field w(g);
  for (std::size_t i = 0; i < g.size(); ++i)
    w[i] = a[i] * phi0[i] - jphi[i] + eval_dF_lambda(phi0[i], prob.pot) - p.chi * sigma0[i];

  const Field S = eval_S(phi0, sigma0, p);
  Field src = neumann_laplacian(w);
  src += S;
  Field vel(g);
  if (p.tau > 0.0) {
    // (1/tau - lap) v = src / tau
    std::vector<double> diag(g.size(), 1.0 / p.tau);
    Field rhs = src;
    rhs *= 1.0 / p.tau;
    vel = solve_shifted_laplacian(diag, rhs);
  } else {
    vel = src;
  }
  State s;
  s.t = 0.0;
  s.phi = phi0;
  s.sigma = sigma0;
  s.mu = w;
  for (std::size_t i = 0; i < g.size(); ++i) s.mu[i] += p.tau * vel[i];
  if (velocity) *velocity = vel;
  return s;
}

namespace {

bool sigma_mp_applies(const ModelParams& p, const Field& sigma0) {
  const Field supply = supply_field(p, sigma0.grid());
  return sigma0.min() >= 0.0 && sigma0.max() <= 1.0 && p.h2.inf() >= 0.0 && supply.min() >= 0.0 &&
         supply.max() <= 1.0;
}

}  // namespace

RunResult run(const Problem& prob, const SchemeConfig& cfg, const State& initial, const RunOptions& opts) {
  const ModelParams& p = prob.model;
  const PotentialParams& pot = prob.pot;
  const MonitorConfig& mon = opts.monitors;
  if (!(pot.lambda() > 0.0)) throw ConfigError("solver requires lambda > 0");

  RunResult res;
  const double y0 = mean(initial.phi);
  const double K = p.K();
  const bool envelope_applies = p.m > 0.0 && K >= 0.0 && y0 > 0.0 && y0 < 1.0;
  const bool sigma_mp = sigma_mp_applies(p, initial.sigma);
  const double phi_hi = 1.0 - pot.lambda() / 2.0;

  Field vel0;
  const State s0 = initial_state(initial.phi, initial.sigma, prob, &vel0);
  const LyapunovValue J0 = lyapunov_J(s0, vel0, p);
  const double J_cap = mon.lyapunov_blowup * (std::abs(J0.J) + 1.0);

  RunSummary& sum = res.summary;
  sum.min_phi = s0.phi.min();
  sum.max_phi = s0.phi.max();
  sum.min_sigma = s0.sigma.min();
  sum.max_sigma = s0.sigma.max();
  sum.worst_mean_slack = std::numeric_limits<double>::infinity();
  sum.empirical_M_tau = J0.coercivity_ratio;
  sum.max_J = J0.J;
  sum.separation_drive = -std::numeric_limits<double>::infinity();

  auto make_record = [&](const State& s, double energy_value, const LyapunovValue& J, const Residuals& r,
                         double dt_used) {
    DiagnosticsRecord rec;
    rec.t = s.t;
    rec.mean_phi = mean(s.phi);
    if (envelope_applies) {
      const MeanEnvelope env = mean_envelope(s.t, y0, p.m, K);
      rec.mean_lo = env.lo;
      rec.mean_hi = env.hi;
    } else {
      rec.mean_lo = rec.mean_hi = std::numeric_limits<double>::quiet_NaN();
    }
    rec.min_phi = s.phi.min();
    rec.max_phi = s.phi.max();
    rec.min_sigma = s.sigma.min();
    rec.max_sigma = s.sigma.max();
    rec.energy = energy_value;
    rec.J = J.J;
    rec.r_phi = r.r_phi;
    rec.r_sigma = r.r_sigma;
    rec.r_mu = r.r_mu;

    if (envelope_applies) {
      const double slack = mon.mean_slack_per_dt * dt_used;
      const double inside = std::min(rec.mean_phi - (rec.mean_lo - slack), (rec.mean_hi + slack) - rec.mean_phi);
      sum.worst_mean_slack = std::min(sum.worst_mean_slack, inside);
      if (inside < 0.0) rec.flags.push_back("mean-envelope");
    }
    if (rec.min_phi < -mon.mp_tol || rec.max_phi > phi_hi + mon.mp_tol) rec.flags.push_back("phi-range");
    if (sigma_mp && (rec.min_sigma < -mon.mp_tol || rec.max_sigma > 1.0 + mon.mp_tol))
      rec.flags.push_back("sigma-range");
    if (r.max() > mon.residual_tol) rec.flags.push_back("residual");
    if (J.J > J_cap) rec.flags.push_back("lyapunov-blowup");
    if (!rec.flags.empty()) ++sum.flagged_records;
    return rec;
  };

  double E_prev = energy(s0.phi, prob.kernel, pot).value();
  res.records.push_back(make_record(s0, E_prev, J0, Residuals{}, cfg.dt));
  if (opts.store_trajectory) res.trajectory.push_back(s0);
  if (opts.snapshot_every > 0) res.snapshots.push_back(s0);

  State cur = s0;
  const double T = opts.T;
  const double t_eps = 1e-12 * std::max(1.0, T);
  while (cur.t < T - t_eps) {
    SchemeConfig c = cfg;
    c.dt = std::min(cfg.dt, T - cur.t);
    StepStats st;
    State next;
    try {
      next = advance(cur, prob, c, &st);
    } catch (const SolverError& e) {
      std::ostringstream os;
      os << e.what() << " at t = " << cur.t << " (residual " << e.residual() << ")";
      res.ok = false;
      res.error = os.str();
      break;
    }
    if (!next.phi.all_finite() || !next.mu.all_finite() || !next.sigma.all_finite()) {
      std::ostringstream os;
      os << "non-finite values at t = " << next.t;
      res.ok = false;
      res.error = os.str();
      break;
    }
    // Snap accumulated time to the nominal grid of step times.
    if (std::abs(next.t - T) < t_eps) next.t = T;

    ++sum.steps;
    sum.halvings += st.halvings;
    sum.newton_iterations += st.newton_iterations;
    sum.max_residual = std::max(sum.max_residual, st.residuals.max());
    sum.separation_drive = std::max(sum.separation_drive, st.separation_drive);
    if (st.halvings == 0) {
      const Field S = eval_S(cur.phi, next.sigma, p);
      const double defect = mean(next.phi) - mean(cur.phi) - c.dt * mean(S);
      sum.max_mass_defect = std::max(sum.max_mass_defect, std::abs(defect));
    }

    const double E = energy(next.phi, prob.kernel, pot).value();
    sum.energy_max_increase = std::max(sum.energy_max_increase, E - E_prev);
    E_prev = E;
    const LyapunovValue J = lyapunov_J(cur, next, c.dt, p);
    sum.empirical_M_tau = std::max(sum.empirical_M_tau, J.coercivity_ratio);
    sum.max_J = std::max(sum.max_J, J.J);
    sum.min_phi = std::min(sum.min_phi, next.phi.min());
    sum.max_phi = std::max(sum.max_phi, next.phi.max());
    sum.min_sigma = std::min(sum.min_sigma, next.sigma.min());
    sum.max_sigma = std::max(sum.max_sigma, next.sigma.max());

    res.records.push_back(make_record(next, E, J, st.residuals, c.dt));
    if (opts.store_trajectory) res.trajectory.push_back(next);
    if (opts.snapshot_every > 0 && sum.steps % opts.snapshot_every == 0) res.snapshots.push_back(next);
    cur = std::move(next);
  }
  if (!std::isfinite(sum.worst_mean_slack)) sum.worst_mean_slack = std::numeric_limits<double>::quiet_NaN();
  res.final_state = std::move(cur);
  return res;
}

}  // namespace nlch
