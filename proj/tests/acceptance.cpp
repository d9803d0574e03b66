// Acceptance suite: one PASS/FAIL line per criterion. Exit status is
// non-zero when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nlch/calculus.hpp"
#include "nlch/config.hpp"
#include "nlch/experiments.hpp"
#include "nlch/kernel.hpp"
#include "nlch/potential.hpp"
#include "nlch/solver.hpp"

using namespace nlch;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// Independent golden-section search.
double golden_min(const std::function<double(double)>& f, double a, double b) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > 1e-13) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return f(0.5 * (a + b));
}

// Quadratic extrapolation of a branch to x from three one-sided samples.
double extrapolate(const std::function<double(double)>& f, double x, double step) {
  return 3.0 * f(x + step) - 3.0 * f(x + 2.0 * step) + f(x + 3.0 * step);
}

// Reference potential written out from the definitions.
double ref_dF_lambda(double r, double h, double l) {
  double d1 = 0.0;
  if (r < 0.0) {
    d1 = -3.0 * r * r / l + h * r + h;
  } else if (r < 1.0 - l) {
    d1 = h / (1.0 - r);
  } else {
    d1 = 2.0 * h / l - h * (1.0 - r) / (l * l);
  }
  double d2 = 0.0;
  if (r < 1.0) {
    d2 = -r * r - h * (r + 1.0);
  } else {
    d2 = (-1.0 - 2.0 * h) + (-2.0 - h) * (r - 1.0);
  }
  return d1 + d2;
}

double ref_F_lambda(double r, double h, double l) {
  double f1 = 0.0;
  if (r < 0.0) {
    f1 = -r * r * r / l + 0.5 * h * r * r + h * r;
  } else if (r < 1.0 - l) {
    f1 = -h * std::log(1.0 - r);
  } else {
    const double s = 1.0 - r;
    f1 = -h * std::log(l) + 1.5 * h - 2.0 * h * s / l + h * s * s / (2.0 * l * l);
  }
  double f2 = 0.0;
  if (r < 1.0) {
    f2 = -r * r * r / 3.0 - h * (r * r / 2.0 + r);
  } else {
    const double s = r - 1.0;
    f2 = -1.0 / 3.0 - 1.5 * h + (-1.0 - 2.0 * h) * s + 0.5 * (-2.0 - h) * s * s;
  }
  return f1 + f2;
}

double ref_dF2_bar(double r, double h) {
  return r < 1.0 ? -r * r - h * (r + 1.0) : (-1.0 - 2.0 * h) + (-2.0 - h) * (r - 1.0);
}

RunConfig base_config() {
  RunConfig c = config_from_table({});
  c.grid.cells_x = 256;
  return c;
}

double cell_mean(const Field& u) {
  double s = 0.0;
  for (double v : u.values()) s += v;
  return s / static_cast<double>(u.size());
}

// ---------------------------------------------------------------------------

Outcome potential_exactness() {
  double worst_junction = 0.0;
  double worst_crit = 0.0;
  double worst_c0 = 0.0;
  // Power of two, so every sample point j + k eps is exact and rounding of
  // the argument (amplified by F'' ~ h / lambda^2) stays out of the mismatch.
  const double eps = std::ldexp(1.0, -27);
  for (double h : {0.2, 0.4, 0.6}) {
    const PotentialParams p = PotentialParams::make(1.0 - h, 1e-3);
    const double l = p.lambda();
    const std::function<double(double)> F = [&](double r) { return eval_F_lambda(r, p); };
    const std::function<double(double)> dF = [&](double r) { return eval_dF_lambda(r, p); };
    const std::function<double(double)> ddF = [&](double r) { return eval_ddF_lambda(r, p); };
    for (double j : {0.0, 1.0 - l, 1.0}) {
      for (const auto& g : {F, dF})
        worst_junction = std::max(worst_junction, std::abs(extrapolate(g, j, -eps) - extrapolate(g, j, eps)));
      const double c_left = extrapolate(ddF, j, -eps);
      const double c_right = extrapolate(ddF, j, eps);
      worst_junction = std::max(worst_junction, std::abs(c_left - c_right) / std::max(1.0, std::abs(c_left)));
    }
    worst_crit = std::max(worst_crit, std::abs(eval_dF(p.phi_bar(), p)));
    const double c0 = 2.0 + h - 3.0 * std::cbrt(h);
    const double m = golden_min([&](double r) { return eval_ddF(r, p); }, 0.0, 1.0 - 1e-6);
    worst_c0 = std::max(worst_c0, std::abs(m + c0));
  }
  Outcome o;
  o.pass = worst_junction < 1e-10 && worst_crit < 1e-12 && worst_c0 < 1e-6;
  o.detail = "junction " + fmt(worst_junction) + ", F'(phi_bar) " + fmt(worst_crit) + ", min F'' + c0 " + fmt(worst_c0);
  return o;
}

Outcome kernel_correctness() {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double worst_fft = 0.0;
  double worst_adj = 0.0;
  const std::vector<Grid> grids{Grid::make_1d(1.0, 64), Grid::make_2d(1.0, 1.0, 64, 64)};
  for (const Grid& g : grids)
    for (KernelFamily fam : {KernelFamily::wendland, KernelFamily::gaussian, KernelFamily::tophat}) {
      KernelSpec spec;
      spec.family = fam;
      spec.width = 0.1;
      spec.cutoff_radius = fam == KernelFamily::gaussian ? 0.3 : 0.1;
      const DiscreteKernel k = DiscreteKernel::build(spec, g);
      Field u(g);
      Field v(g);
      for (std::size_t i = 0; i < g.size(); ++i) {
        u[i] = U(rng);
        v[i] = U(rng);
      }
      const Field fu = convolve(k, u);
      const Field du = convolve_direct(k, u);
      worst_fft = std::max(worst_fft, norm_Linf(fu - du) / norm_Linf(du));
      const double lhs = inner(convolve_direct(k, u), v);
      const double rhs = inner(u, convolve_direct(k, v));
      worst_adj = std::max(worst_adj, std::abs(lhs - rhs) / (norm_L2(u) * norm_L2(v)));
    }
  // Tophat with cutoff (m + 1/2) h: the stencil covers exactly 2c of the line.
  const Grid g = Grid::make_1d(1.0, 200);
  KernelSpec top;
  top.family = KernelFamily::tophat;
  top.amplitude = 1.7;
  top.width = 0.05;
  top.cutoff_radius = (10 + 0.5) * g.spacing(0);
  const DiscreteKernel k = DiscreteKernel::build(top, g);
  const double expect = top.amplitude * 2.0 * top.cutoff_radius;
  double worst_a = 0.0;
  for (int i = 11; i < g.nx() - 11; ++i) worst_a = std::max(worst_a, std::abs(k.a_field()[g.index(i)] - expect));
  Outcome o;
  o.pass = worst_fft < 1e-12 && worst_adj < 1e-12 && worst_a < 1e-12;
  o.detail = "fft/direct " + fmt(worst_fft) + ", adjointness " + fmt(worst_adj) + ", tophat a " + fmt(worst_a);
  return o;
}

// Shared strict run for the mean and max-principle criteria.
struct StrictRun {
  RunConfig cfg;
  RunResult result;
};

const StrictRun& strict_run() {
  static const StrictRun r = [] {
    StrictRun s;
    s.cfg = base_config();
    s.cfg.T = 2.0;
    s.cfg.scheme.dt = 1e-3;
    s.cfg.phi_bar = 0.6;
    s.cfg.model.m = 1.0;
    s.cfg.model.h1 = {SourceFamily::constant, 0.5};
    Setup st = make_setup(s.cfg);
    RunOptions opts = st.options;
    opts.store_trajectory = true;
    s.result = run(st.problem, st.scheme, st.initial, opts);
    return s;
  }();
  return r;
}

Outcome mean_confinement() {
  const StrictRun& s = strict_run();
  Outcome o;
  if (!s.result.ok) return {false, "run failed: " + s.result.error};
  const auto& traj = s.result.trajectory;
  const double m = s.cfg.model.m;
  const double K = s.cfg.model.h1.value;
  const double y0 = cell_mean(traj.front().phi);
  const double dt = s.cfg.scheme.dt;
  double worst_env = std::numeric_limits<double>::infinity();
  double worst_mass = 0.0;
  for (std::size_t n = 0; n < traj.size(); ++n) {
    const double t = traj[n].t;
    const double y = cell_mean(traj[n].phi);
    const double lo = y0 * std::exp(-m * t) - 5.0 * dt;
    const double hi = y0 * std::exp(-m * t) + (1.0 - std::exp(-m * t)) * K / m + 5.0 * dt;
    worst_env = std::min({worst_env, y - lo, hi - y});
    if (n == 0) continue;
    // S(phi_n, sigma_{n+1}) = -m phi_n + K for the constant source.
    const double s_mean = -m * cell_mean(traj[n - 1].phi) + K;
    const double step = traj[n].t - traj[n - 1].t;
    worst_mass = std::max(worst_mass, std::abs(y - cell_mean(traj[n - 1].phi) - step * s_mean));
  }
  o.pass = std::abs(y0 - 0.5) < 1e-12 && worst_env >= 0.0 && worst_mass < 1e-10;
  o.detail = "y0 " + fmt(y0) + ", envelope slack " + fmt(worst_env) + ", mass defect " + fmt(worst_mass) + " over " +
             std::to_string(traj.size() - 1) + " steps";
  return o;
}

Outcome max_principles() {
  const StrictRun& s = strict_run();
  if (!s.result.ok) return {false, "run failed: " + s.result.error};
  double pmin = 1e300, pmax = -1e300, smin = 1e300, smax = -1e300;
  for (const State& st : s.result.trajectory) {
    pmin = std::min(pmin, st.phi.min());
    pmax = std::max(pmax, st.phi.max());
    smin = std::min(smin, st.sigma.min());
    smax = std::max(smax, st.sigma.max());
  }
  const double upper = 1.0 - s.cfg.lambda / 2.0;
  const bool sigma0_ok = s.result.trajectory.front().sigma.min() >= 0.0 && s.result.trajectory.front().sigma.max() <= 1.0;
  Outcome o;
  o.pass = sigma0_ok && pmin >= -1e-8 && pmax <= upper + 1e-8 && smin >= -1e-8 && smax <= 1.0 + 1e-8;
  o.detail = "phi in [" + fmt(pmin) + ", " + fmt(pmax) + "], sigma in [" + fmt(smin) + ", " + fmt(smax) + "]";
  return o;
}

Outcome energy_dissipation() {
  double worst = -std::numeric_limits<double>::infinity();
  std::string detail;
  bool ok = true;
  for (double dt : {1e-2, 1e-3}) {
    RunConfig c = base_config();
    c.model.strict_mode = false;
    c.model.m = 0.0;
    c.model.h1 = {SourceFamily::zero, 0.0};
    c.model.chi = 0.0;
    c.scheme.dt = dt;
    c.T = 1.0;
    Setup st = make_setup(c);
    RunOptions opts = st.options;
    opts.store_trajectory = true;
    const RunResult r = run(st.problem, st.scheme, st.initial, opts);
    if (!r.ok) return {false, "run failed: " + r.error};
    // Pairwise double sum with the sampled kernel, and the potential from its
    // definition.
    const Grid& g = st.grid;
    const double vol = g.cell_volume();
    const KernelSpec& ks = st.problem.kernel.spec();
    const int n = g.nx();
    std::vector<double> Jd(n);
    for (int d = 0; d < n; ++d) Jd[d] = kernel_value(ks, d * g.spacing(0));
    const double h = 1.0 - c.phi_bar;
    auto E = [&](const Field& phi) {
      double pair = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double diff = phi[i] - phi[j];
          pair += Jd[std::abs(i - j)] * diff * diff;
        }
      double local = 0.0;
      for (int i = 0; i < n; ++i) local += ref_F_lambda(phi[i], h, c.lambda);
      return 0.25 * pair * vol * vol + local * vol;
    };
    double prev = E(r.trajectory.front().phi);
    double max_rel_inc = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < r.trajectory.size(); ++k) {
      const double e = E(r.trajectory[k].phi);
      max_rel_inc = std::max(max_rel_inc, (e - prev) / std::max(1.0, std::abs(prev)));
      prev = e;
    }
    ok = ok && max_rel_inc <= 1e-12;
    worst = std::max(worst, max_rel_inc);
    if (!detail.empty()) detail += "; ";
    detail += "dt " + fmt(dt) + ": max relative increase " + fmt(max_rel_inc);
  }
  return {ok, detail};
}

Outcome separation() {
  RunConfig c = base_config();
  c.T = 1.0;
  Setup st = make_setup(c);
  RunOptions opts = st.options;
  opts.store_trajectory = true;
  const RunResult r = run(st.problem, st.scheme, st.initial, opts);
  if (!r.ok) return {false, "run failed: " + r.error};
  const double delta_bar = 0.1;
  const double phi0_max = r.trajectory.front().phi.max();
  const double h = 1.0 - c.phi_bar;
  const ModelParams& p = st.problem.model;
  // Sup over the run of mu + chi sigma + J*phi_prev + F2'(phi) - F2'(phi_prev).
  double drive = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n < r.trajectory.size(); ++n) {
    const State& a = r.trajectory[n - 1];
    const State& b = r.trajectory[n];
    const Field jphi = convolve_direct(st.problem.kernel, a.phi);
    for (std::size_t i = 0; i < b.phi.size(); ++i)
      drive = std::max(drive, b.mu[i] + p.chi * b.sigma[i] + jphi[i] + ref_dF2_bar(b.phi[i], h) -
                                  ref_dF2_bar(a.phi[i], h));
  }
  // Largest delta <= delta_bar with F'_lambda >= drive on (1 - delta, 1]:
  // F'_lambda is increasing near 1, so bisect on its crossing.
  double lo = 1.0 - delta_bar;
  double hi = 1.0;
  double delta = delta_bar;
  if (ref_dF_lambda(lo, h, c.lambda) < drive) {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (ref_dF_lambda(mid, h, c.lambda) < drive ? lo : hi) = mid;
    }
    delta = 1.0 - hi;
  }
  double pmax = 0.0;
  for (const State& s : r.trajectory) pmax = std::max(pmax, s.phi.max());
  Outcome o;
  o.pass = phi0_max <= 1.0 - delta_bar && delta > 0.0 && pmax <= 1.0 - delta + 1e-6;
  o.detail = "max phi0 " + fmt(phi0_max) + ", drive sup " + fmt(drive) + ", delta " + fmt(delta) + ", max phi " +
             fmt(pmax) + " <= " + fmt(1.0 - delta);
  return o;
}

Outcome continuous_dependence() {
  RunConfig c = base_config();
  c.T = 1.0;
  auto ratio_for = [&](double dt, double amp, double* lhs) {
    RunConfig ci = c;
    ci.scheme.dt = dt;
    Setup st = make_setup(ci);
    State b = st.initial;
    Field pert = compare_perturbation(st.grid, 2);
    pert *= amp;
    b.phi += pert;
    const CompareReport rep = compare_runs(st.problem, st.scheme, st.initial, b, ci.T);
    if (lhs) *lhs = rep.lhs.total();
    return rep.ok ? rep.ratio : std::numeric_limits<double>::quiet_NaN();
  };
  double lhs3 = 0.0, lhs4 = 0.0;
  const double m_coarse = ratio_for(1e-3, 1e-3, &lhs3);
  const double m_fine = ratio_for(5e-4, 1e-3, nullptr);
  ratio_for(1e-3, 1e-4, &lhs4);
  const double dt_change = std::abs(m_fine / m_coarse - 1.0);
  const double scaling = lhs3 / lhs4;
  Outcome o;
  o.pass = std::isfinite(m_coarse) && std::isfinite(m_fine) && dt_change <= 0.1 && std::abs(scaling / 10.0 - 1.0) <= 0.3;
  o.detail = "M_tau " + fmt(m_coarse) + " (dt/2: " + fmt(m_fine) + ", change " + fmt(dt_change) +
             "), LHS ratio 1e-3/1e-4 " + fmt(scaling);
  return o;
}

Outcome vanishing_viscosity() {
  RunConfig c = base_config();
  c.model.chi = 0.2;
  c.phi_bar = 0.6;
  const double h = 1.0 - c.phi_bar;
  const double chi_max = std::min(std::sqrt((2.0 + h - 3.0 * std::cbrt(h)) / 2.0), 1.0);
  const TauSweep sw = sweep_tau(c, {0.1, 0.05, 0.025, 0.0});
  std::string detail = "chi bound " + fmt(chi_max) + "; err";
  for (const TauEntry& e : sw.entries) detail += " " + fmt(e.err_phi);
  detail += "; tau|d_t phi|^2";
  for (const TauEntry& e : sw.entries) detail += " " + fmt(e.viscous);
  return {sw.ok && c.model.chi < chi_max && sw.monotone && sw.bounded, detail};
}

Outcome lambda_robustness() {
  // Data reaching above 1 - lambda for every lambda in the sweep, with a step
  // resolving the time the solution spends there (about lambda^2 tau / 2h).
  RunConfig c = base_config();
  c.phi0.high = 0.999;
  c.model.tau = 1.0;
  c.scheme.dt = 2e-6;
  c.T = 1e-3;
  const std::vector<double> lambdas{1e-2, 5e-3, 2.5e-3};
  const LambdaSweep sw = sweep_lambda(c, lambdas);
  bool reaches = sw.ok;
  for (const LambdaEntry& e : sw.entries) reaches = reaches && e.max_phi > 1.0 - e.lambda;
  std::string detail = "distances";
  for (std::size_t i = 0; i + 1 < sw.entries.size(); ++i) detail += " " + fmt(sw.entries[i].dist_next);
  detail += "; ratios";
  for (double r : sw.ratios) detail += " " + fmt(r);
  bool nontrivial = sw.ok && sw.entries.size() >= 2 && sw.entries[sw.entries.size() - 2].dist_next > 0.0;
  return {sw.ok && reaches && nontrivial && sw.cauchy, detail};
}

Field restrict_to(const Field& fine, const Grid& coarse) {
  const int ratio = fine.grid().nx() / coarse.nx();
  Field out(coarse);
  for (int i = 0; i < coarse.nx(); ++i) {
    double s = 0.0;
    for (int k = 0; k < ratio; ++k) s += fine[static_cast<std::size_t>(i * ratio + k)];
    out[static_cast<std::size_t>(i)] = s / ratio;
  }
  return out;
}

Outcome discretization_convergence() {
  RunConfig c = base_config();
  c.phi0.kind = InitialKind::cosine;
  c.phi0.value = 0.5;
  c.phi0.amplitude = 0.2;
  c.phi0.mode = 1;
  c.sigma0.kind = InitialKind::cosine;
  c.sigma0.value = 0.5;
  c.sigma0.amplitude = 0.1;
  c.sigma0.mode = 2;
  c.T = 0.1;
  auto final_phi = [](RunConfig ci) {
    Setup st = make_setup(ci);
    const RunResult r = run(st.problem, st.scheme, st.initial, st.options);
    return r.ok ? r.final_state.phi : Field(st.grid, std::numeric_limits<double>::quiet_NaN());
  };
  // Time: dt, dt/2, dt/4 on a fixed grid.
  c.grid.cells_x = 128;
  std::vector<Field> t_runs;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    RunConfig ci = c;
    ci.scheme.dt = dt;
    t_runs.push_back(final_phi(ci));
  }
  const double rt = norm_L2(t_runs[0] - t_runs[1]) / norm_L2(t_runs[1] - t_runs[2]);
  // Space: N, 2N, 4N with a fixed step, compared on the coarse grid.
  std::vector<Field> x_runs;
  const Grid coarse = Grid::make_1d(c.grid.length_x, 64);
  for (int cells : {64, 128, 256}) {
    RunConfig ci = c;
    ci.grid.cells_x = cells;
    ci.scheme.dt = 1e-3;
    x_runs.push_back(restrict_to(final_phi(ci), coarse));
  }
  const double rx = norm_L2(x_runs[0] - x_runs[1]) / norm_L2(x_runs[1] - x_runs[2]);
  Outcome o;
  o.pass = rt >= 1.8 && rt <= 2.2 && rx >= 3.5 && rx <= 4.5;
  o.detail = "dt ratio " + fmt(rt) + ", spacing ratio " + fmt(rx);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"potential exactness", potential_exactness},
      {"kernel correctness", kernel_correctness},
      {"mass and mean confinement", mean_confinement},
      {"max principles", max_principles},
      {"energy dissipation", energy_dissipation},
      {"separation", separation},
      {"continuous dependence", continuous_dependence},
      {"vanishing viscosity", vanishing_viscosity},
      {"lambda robustness", lambda_robustness},
      {"discretization convergence", discretization_convergence},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %zu (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
