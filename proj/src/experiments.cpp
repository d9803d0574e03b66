#include "nlch/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <ostream>
#include <sstream>

#include "nlch/calculus.hpp"
#include "nlch/errors.hpp"

namespace nlch {

Setup make_setup(const RunConfig& c) {
  Setup s;
  s.grid = c.grid.build();
  s.problem.model = c.model;
  s.problem.pot = c.potential();
  s.problem.kernel = c.build_kernel(s.grid);
  s.scheme = c.scheme;
  s.initial.t = 0.0;
  s.initial.phi = make_initial(c.phi0, s.grid, "phi");
  s.initial.sigma = make_initial(c.sigma0, s.grid, "sigma");
  s.options.T = c.T;
  s.options.snapshot_every = c.snapshot_every;
  return s;
}

// ---------------------------------------------------------------------------

CheckResult run_check(const RunConfig& c) {
  CheckResult r;
  const Setup s = make_setup(c);
  const PotentialParams& pot = s.problem.pot;
  r.validation = validate(s.problem.model, s.problem.kernel, pot);
  r.junctions = check_junctions(pot);
  r.curvature = curvature_minimum(pot);
  r.a5 = check_A5(s.problem.kernel, pot);
  r.warnings = s.problem.kernel.warnings();
  try {
    r.minorant_eps_hat = quadratic_minorant(pot, r.a5.a_star, r.a5.a_sup).eps_hat;
  } catch (const PreconditionError& e) {
    r.warnings.push_back(std::string("quadratic minorant: ") + e.what());
  }
  const double phi0_max = s.initial.phi.max();
  if (phi0_max >= 1.0) r.warnings.push_back("initial phi reaches 1");
  r.ok = r.validation.ok() && r.junctions.max() < 1e-10 && phi0_max < 1.0;
  return r;
}

std::string format_check(const CheckResult& r) {
  std::ostringstream os;
  os << "mode: " << (r.validation.strict ? "strict" : "lab") << "\n";
  for (const Check& c : r.validation.checks) {
    const char* status = c.passed ? "ok  " : (c.advisory ? "note" : "FAIL");
    os << status << "  " << c.name << ": " << c.detail << "\n";
  }
  os << "potential junction mismatch: " << format_real(r.junctions.max()) << "\n";
  os << "min F'' = " << format_real(r.curvature.value) << " at r = " << format_real(r.curvature.argmin) << "\n";
  os << "kernel: a_* = " << format_real(r.a5.a_star) << ", a^* = " << format_real(r.a5.a_sup)
     << ", b^* = " << format_real(r.a5.b_sup) << "\n";
  if (r.minorant_eps_hat > 0.0) os << "quadratic minorant eps_hat = " << format_real(r.minorant_eps_hat) << "\n";
  for (const std::string& w : r.warnings) os << "warning: " << w << "\n";
  os << (r.ok ? "check passed" : "check FAILED") << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------

Field compare_perturbation(const Grid& g, int mode) {
  Field u(g);
  const double L = g.length(0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double x = g.center(0, static_cast<int>(k % g.nx()));
    u[k] = std::cos(mode * std::numbers::pi * x / L);
  }
  return u;
}

namespace {

CompareNorms pointwise_norms(const State& a, const State& b) {
  CompareNorms n;
  Field dphi = a.phi - b.phi;
  n.l2_phi = norm_L2(dphi);
  dphi += -mean(dphi);
  CgOptions cg;
  cg.mean_tol = 1e-8;
  n.vprime_phi = vprime_norm(dphi, cg);
  n.l2_sigma = norm_L2(a.sigma - b.sigma);
  return n;
}

double time_step(const std::vector<State>& traj, std::size_t n) { return traj[n].t - traj[n - 1].t; }

}  // namespace

double trajectory_distance(const std::vector<State>& a, const std::vector<State>& b, Field State::*field) {
  if (a.size() != b.size()) throw ShapeError("trajectories have different lengths");
  double s = 0.0;
  for (std::size_t n = 1; n < a.size(); ++n) {
    const double d = norm_L2(a[n].*field - b[n].*field);
    s += time_step(a, n) * d * d;
  }
  return std::sqrt(s);
}

CompareReport compare_runs(const Problem& prob, const SchemeConfig& cfg, const State& a, const State& b, double T) {
  if (!(prob.model.tau > 0.0 && prob.model.tau <= 1.0))
    throw PreconditionError("continuous dependence needs tau in (0, 1]");
  require_same_grid(a.phi, b.phi, "compare");
  RunOptions opts;
  opts.T = T;
  opts.store_trajectory = true;
  std::future<RunResult> fa = std::async(std::launch::async, [&] { return run(prob, cfg, a, opts); });
  const RunResult rb = run(prob, cfg, b, opts);
  const RunResult ra = fa.get();

  CompareReport rep;
  if (!ra.ok || !rb.ok) {
    rep.ok = false;
    rep.error = !ra.ok ? ra.error : rb.error;
    return rep;
  }
  rep.steps = ra.summary.steps;
  rep.rhs = pointwise_norms(ra.trajectory.front(), rb.trajectory.front());
  double l2v = 0.0;
  for (std::size_t n = 0; n < ra.trajectory.size(); ++n) {
    const CompareNorms p = pointwise_norms(ra.trajectory[n], rb.trajectory[n]);
    rep.lhs.vprime_phi = std::max(rep.lhs.vprime_phi, p.vprime_phi);
    rep.lhs.l2_phi = std::max(rep.lhs.l2_phi, p.l2_phi);
    rep.lhs.l2_sigma = std::max(rep.lhs.l2_sigma, p.l2_sigma);
    if (n > 0) {
      const Field ds = ra.trajectory[n].sigma - rb.trajectory[n].sigma;
      const double h1 = norm_H1(ds);
      l2v += time_step(ra.trajectory, n) * h1 * h1;
    }
  }
  rep.lhs.l2v_sigma = std::sqrt(l2v);
  const double rhs = rep.rhs.total();
  rep.ratio = rhs > 0.0 ? rep.lhs.total() / rhs : 0.0;
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

RunResult run_with(const Setup& s, bool trajectory) {
  RunOptions opts = s.options;
  opts.snapshot_every = 0;
  opts.store_trajectory = trajectory;
  return run(s.problem, s.scheme, s.initial, opts);
}

template <class T, class F>
std::vector<T> run_all(std::size_t n, F&& f) {
  std::vector<std::future<T>> futures;
  futures.reserve(n);
  for (std::size_t i = 0; i < n; ++i) futures.push_back(std::async(std::launch::async, f, i));
  std::vector<T> out;
  out.reserve(n);
  for (auto& fu : futures) out.push_back(fu.get());
  return out;
}

}  // namespace

TauSweep sweep_tau(const RunConfig& c, const std::vector<double>& taus) {
  if (taus.size() < 2 || taus.back() != 0.0) throw PreconditionError("tau list must end with 0");
  for (std::size_t i = 0; i + 1 < taus.size(); ++i)
    if (!(taus[i] > taus[i + 1])) throw PreconditionError("tau list must be strictly decreasing");
  if (!(taus.front() <= 1.0)) throw PreconditionError("taus must lie in [0, 1]");

  const std::vector<RunResult> runs = run_all<RunResult>(taus.size(), [&](std::size_t i) {
    RunConfig ci = c;
    ci.model.tau = taus[i];
    return run_with(make_setup(ci), true);
  });

  TauSweep sweep;
  const RunResult& ref = runs.back();
  for (std::size_t i = 0; i < taus.size(); ++i) {
    TauEntry e;
    e.tau = taus[i];
    const RunResult& r = runs[i];
    if (!r.ok || !ref.ok) {
      e.ok = false;
      e.error = !r.ok ? r.error : "tau = 0 run failed: " + ref.error;
      sweep.entries.push_back(e);
      continue;
    }
    e.err_phi = trajectory_distance(r.trajectory, ref.trajectory, &State::phi);
    e.err_sigma = trajectory_distance(r.trajectory, ref.trajectory, &State::sigma);
    double v = 0.0;
    double sup_v = 0.0;
    for (std::size_t n = 0; n < r.trajectory.size(); ++n) {
      sup_v = std::max(sup_v, norm_H1(r.trajectory[n].phi));
      if (n == 0) continue;
      const double dt = time_step(r.trajectory, n);
      const double d = norm_L2(r.trajectory[n].phi - r.trajectory[n - 1].phi) / dt;
      v += dt * d * d;
    }
    e.viscous = e.tau * v;
    e.sqrt_tau_sup_V = std::sqrt(e.tau) * sup_v;
    sweep.entries.push_back(e);
  }
  sweep.ok = std::all_of(sweep.entries.begin(), sweep.entries.end(), [](const TauEntry& e) { return e.ok; });
  if (sweep.ok) {
    sweep.monotone = true;
    for (std::size_t i = 0; i + 2 < sweep.entries.size(); ++i)
      if (!(sweep.entries[i + 1].err_phi < sweep.entries[i].err_phi)) sweep.monotone = false;
    double vmax = 0.0;
    for (const TauEntry& e : sweep.entries) vmax = std::max(vmax, e.viscous);
    sweep.bounded = std::isfinite(vmax) && vmax <= 2.0 * sweep.entries.front().viscous + 1e-14;
  }
  return sweep;
}

LambdaSweep sweep_lambda(const RunConfig& c, const std::vector<double>& lambdas) {
  if (lambdas.size() < 2) throw PreconditionError("lambda sweep needs at least two values");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) throw PreconditionError("lambdas must be positive");
    if (i + 1 < lambdas.size() && !(lambdas[i] > lambdas[i + 1]))
      throw PreconditionError("lambda list must be strictly decreasing");
  }
  const std::vector<RunResult> runs = run_all<RunResult>(lambdas.size(), [&](std::size_t i) {
    RunConfig ci = c;
    ci.lambda = lambdas[i];
    return run_with(make_setup(ci), true);
  });

  LambdaSweep sweep;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    LambdaEntry e;
    e.lambda = lambdas[i];
    const RunResult& r = runs[i];
    if (!r.ok) {
      e.ok = false;
      e.error = r.error;
      sweep.entries.push_back(e);
      continue;
    }
    e.max_phi = r.summary.max_phi;
    e.min_phi = r.summary.min_phi;
    const PotentialParams pot = c.potential().with_lambda(lambdas[i]);
    for (const State& st : r.trajectory)
      for (double v : st.phi.values()) {
        const ExtendedReal f = eval_F(v, pot);
        const double mismatch = f.is_infinite() ? std::numeric_limits<double>::infinity()
                                                : std::abs(eval_F_lambda(v, pot) - f.value());
        e.F_mismatch = std::max(e.F_mismatch, mismatch);
      }
    if (i + 1 < lambdas.size() && runs[i + 1].ok) e.dist_next = trajectory_distance(r.trajectory, runs[i + 1].trajectory);
    sweep.entries.push_back(e);
  }
  sweep.ok = std::all_of(sweep.entries.begin(), sweep.entries.end(), [](const LambdaEntry& e) { return e.ok; });
  if (sweep.ok) {
    sweep.cauchy = true;
    for (std::size_t i = 0; i + 2 < sweep.entries.size(); ++i) {
      const double prev = sweep.entries[i].dist_next;
      const double ratio = prev > 0.0 ? sweep.entries[i + 1].dist_next / prev : 0.0;
      sweep.ratios.push_back(ratio);
      if (!(ratio <= 0.7)) sweep.cauchy = false;
    }
  }
  return sweep;
}

Table potential_table(const PotentialParams& p, double r_min, double r_max, int samples) {
  Table t;
  t.header = {"r", "F", "F_lambda", "dF_lambda"};
  for (int i = 0; i < samples; ++i) {
    const double r = r_min + (r_max - r_min) * i / (samples - 1);
    const ExtendedReal F = eval_F(r, p);
    t.add({format_real(r), format_real(F.is_finite() ? F.value() : INFINITY), format_real(eval_F_lambda(r, p)),
           format_real(eval_dF_lambda(r, p))});
  }
  return t;
}

// ---------------------------------------------------------------------------

namespace {

std::filesystem::path out_path(const RunConfig& c, const std::string& name) {
  return std::filesystem::path(c.out_dir) / name;
}

bool precheck(const RunConfig& c, std::ostream& os) {
  const CheckResult r = run_check(c);
  if (r.ok) return true;
  os << format_check(r);
  return false;
}

std::string summary_text(const RunResult& r, const RunConfig& c) {
  const RunSummary& s = r.summary;
  std::ostringstream os;
  os << "status = " << (r.ok ? "ok" : "failed") << "\n";
  if (!r.ok) os << "error = " << r.error << "\n";
  os << "mode = " << (c.model.strict_mode ? "strict" : "lab") << "\n";
  os << "steps = " << s.steps << "\nhalvings = " << s.halvings << "\nnewton_iterations = " << s.newton_iterations
     << "\n";
  os << "min_phi = " << format_real(s.min_phi) << "\nmax_phi = " << format_real(s.max_phi) << "\n";
  os << "phi_upper_slack = " << format_real(1.0 - c.lambda / 2.0 - s.max_phi) << "\n";
  os << "phi_lower_slack = " << format_real(s.min_phi) << "\n";
  os << "min_sigma = " << format_real(s.min_sigma) << "\nmax_sigma = " << format_real(s.max_sigma) << "\n";
  os << "mean_envelope_slack = " << format_real(s.worst_mean_slack) << "\n";
  os << "max_mass_defect = " << format_real(s.max_mass_defect) << "\n";
  os << "max_residual = " << format_real(s.max_residual) << "\n";
  os << "energy_max_increase = " << format_real(s.energy_max_increase) << "\n";
  os << "max_J = " << format_real(s.max_J) << "\n";
  os << "coercivity_ratio_max = " << format_real(s.empirical_M_tau) << "\n";
  os << "separation_drive = " << format_real(s.separation_drive) << "\n";
  os << "flagged_records = " << s.flagged_records << "\n";
  return os.str();
}

std::string pad(int n) {
  std::string s = std::to_string(n);
  return std::string(s.size() < 6 ? 6 - s.size() : 0, '0') + s;
}

}  // namespace

int cmd_check(const RunConfig& c, std::ostream& os) {
  const CheckResult r = run_check(c);
  os << format_check(r);
  return r.ok ? exit_ok : exit_validation;
}

int cmd_run(const RunConfig& c, std::ostream& os) {
  if (!precheck(c, os)) return exit_validation;
  Setup s = make_setup(c);
  const RunResult r = run(s.problem, s.scheme, s.initial, s.options);
  write_text(out_path(c, "diagnostics.csv"), diagnostics_csv(r.records));
  for (std::size_t i = 0; i < r.snapshots.size(); ++i)
    write_text(out_path(c, "snapshots/state_" + pad(static_cast<int>(i)) + ".csv"), state_csv(r.snapshots[i]));
  write_text(out_path(c, "final_state.csv"), state_csv(r.final_state));
  const std::string summary = summary_text(r, c);
  write_text(out_path(c, "summary.txt"), summary);
  write_text(out_path(c, "config.toml"), to_toml(c));
  os << summary;
  if (!r.ok) return exit_solver;
  if (c.model.strict_mode && r.summary.flagged_records > 0) {
    os << "strict mode: monitors flagged " << r.summary.flagged_records << " records\n";
    return exit_validation;
  }
  return exit_ok;
}

namespace {

// Configurations equal up to their initial data and output location.
bool same_problem(RunConfig a, RunConfig b) {
  for (RunConfig* c : {&a, &b}) {
    c->phi0 = InitialSpec{};
    c->sigma0 = InitialSpec{};
    c->out_dir.clear();
  }
  return to_toml(a) == to_toml(b);
}

}  // namespace

int cmd_compare(const RunConfig& a, const std::optional<RunConfig>& b, std::ostream& os) {
  if (!precheck(a, os)) return exit_validation;
  if (b && !same_problem(a, *b)) {
    os << "compare: configurations differ beyond their initial data\n";
    return exit_validation;
  }
  const Setup sa = make_setup(a);
  State init_b = sa.initial;
  if (b) {
    const Setup sb = make_setup(*b);
    init_b = sb.initial;
  } else {
    Field pert = compare_perturbation(sa.grid, a.compare_mode);
    pert *= a.compare_amplitude;
    init_b.phi += pert;
  }
  if (init_b.phi.max() >= 1.0 || sa.initial.phi.max() >= 1.0) {
    os << "compare: initial data must stay below 1\n";
    return exit_validation;
  }
  const CompareReport rep = compare_runs(sa.problem, sa.scheme, sa.initial, init_b, a.T);
  Table t;
  t.header = {"bundle", "vprime_phi", "l2_phi", "l2_sigma", "l2v_sigma", "total"};
  for (const auto& [name, n] : {std::pair{"lhs", rep.lhs}, std::pair{"rhs", rep.rhs}})
    t.add({name, format_real(n.vprime_phi), format_real(n.l2_phi), format_real(n.l2_sigma), format_real(n.l2v_sigma),
           format_real(n.total())});
  write_text(out_path(a, "compare.csv"), t.str());
  os << t.str();
  if (!rep.ok) {
    os << "compare failed: " << rep.error << "\n";
    return exit_solver;
  }
  os << "empirical M_tau = " << format_real(rep.ratio) << "\n";
  return exit_ok;
}

int cmd_sweep_tau(const RunConfig& c, std::ostream& os) {
  for (double tau : c.taus) {
    RunConfig ci = c;
    ci.model.tau = tau;
    if (!precheck(ci, os)) return exit_validation;
  }
  const TauSweep sw = sweep_tau(c, c.taus);
  Table t;
  t.header = {"tau", "err_phi", "err_sigma", "viscous", "sqrt_tau_sup_V", "status"};
  for (const TauEntry& e : sw.entries)
    t.add({format_real(e.tau), format_real(e.err_phi), format_real(e.err_sigma), format_real(e.viscous),
           format_real(e.sqrt_tau_sup_V), e.ok ? "ok" : e.error});
  write_text(out_path(c, "sweep_tau.csv"), t.str());
  os << t.str() << "monotone = " << (sw.monotone ? "yes" : "no") << "\nbounded = " << (sw.bounded ? "yes" : "no")
     << "\n";
  return sw.ok ? exit_ok : exit_solver;
}

int cmd_sweep_lambda(const RunConfig& c, std::ostream& os) {
  for (double l : c.lambdas) {
    RunConfig ci = c;
    ci.lambda = l;
    if (!precheck(ci, os)) return exit_validation;
  }
  const LambdaSweep sw = sweep_lambda(c, c.lambdas);
  Table t;
  t.header = {"lambda", "dist_next", "F_mismatch", "min_phi", "max_phi", "status"};
  for (const LambdaEntry& e : sw.entries)
    t.add({format_real(e.lambda), format_real(e.dist_next), format_real(e.F_mismatch), format_real(e.min_phi),
           format_real(e.max_phi), e.ok ? "ok" : e.error});
  write_text(out_path(c, "sweep_lambda.csv"), t.str());
  os << t.str();
  for (double r : sw.ratios) os << "ratio = " << format_real(r) << "\n";
  os << "cauchy = " << (sw.cauchy ? "yes" : "no") << "\n";
  return sw.ok ? exit_ok : exit_solver;
}

int cmd_potential_table(const RunConfig& c, std::ostream& os) {
  const Table t = potential_table(c.potential());
  write_text(out_path(c, "potential_table.csv"), t.str());
  os << "wrote " << t.rows.size() << " rows to " << out_path(c, "potential_table.csv").string() << "\n";
  return exit_ok;
}

}  // namespace nlch
