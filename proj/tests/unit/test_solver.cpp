#include <doctest.h>

#include <cmath>

#include "nlch/calculus.hpp"
#include "nlch/errors.hpp"
#include "nlch/solver.hpp"
#include "nlch/spectral.hpp"

using namespace nlch;

namespace {

Problem make_problem(const Grid& g) {
  Problem prob;
  KernelSpec spec;
  spec.amplitude = amplitude_for_interior_mass(spec, g, 1.0);
  prob.kernel = DiscreteKernel::build(spec, g);
  prob.model.h1 = {SourceFamily::constant, 0.5};
  return prob;
}

Field cosine(const Grid& g, double base, double amp, int mode = 1) {
  Field f(g);
  for (int i = 0; i < g.nx(); ++i) f[i] = base + amp * std::cos(mode * M_PI * g.center(0, i) / g.length(0));
  return f;
}

}  // namespace

TEST_CASE("homogeneous equilibrium is preserved") {
  const Grid g = Grid::make_1d(1.0, 64);
  Problem prob = make_problem(g);
  prob.model.h1 = {};
  prob.model.h2 = {};
  prob.model.sigma_S = 0.7;
  const State s0 = initial_state(Field(g, 0.0), Field(g, 0.7), prob);
  SchemeConfig cfg;
  State s = s0;
  for (int n = 0; n < 20; ++n) s = step(s, prob, cfg);
  CHECK(norm_Linf(s.phi) < 1e-12);
  CHECK(norm_Linf(s.sigma - s0.sigma) < 1e-12);
  CHECK(norm_Linf(s.mu - s0.mu) < 1e-12);
  CHECK(s.t == doctest::Approx(20 * cfg.dt));
}

TEST_CASE("one step satisfies the mass identity and the discrete equations") {
  for (Splitting sp : {Splitting::convex_split, Splitting::implicit_potential}) {
    const Grid g = Grid::make_1d(1.0, 128);
    const Problem prob = make_problem(g);
    SchemeConfig cfg;
    cfg.splitting = sp;
    const State s0 = initial_state(cosine(g, 0.5, 0.3), cosine(g, 0.5, -0.2, 2), prob);
    StepStats st;
    const State s1 = step(s0, prob, cfg, &st);
    const double mass = mean(s1.phi) - mean(s0.phi) - cfg.dt * mean(eval_S(s0.phi, s1.sigma, prob.model));
    CHECK(std::abs(mass) < 1e-13);
    CHECK(st.residuals.max() < 1e-8);
    CHECK(weak_residuals(s0, s1, cfg.dt, prob.model, prob.kernel, prob.pot, sp).max() < 1e-8);
    CHECK(st.newton_iterations > 0);
  }
}

TEST_CASE("initial chemical potential is consistent with the velocity equation") {
  const Grid g = Grid::make_1d(1.0, 64);
  const Problem prob = make_problem(g);
  Field v;
  const State s0 = initial_state(cosine(g, 0.5, 0.2), Field(g, 0.5), prob, &v);
  // phi' = lap mu + S
  const Field S = eval_S(s0.phi, s0.sigma, prob.model);
  CHECK(norm_Linf(v - neumann_laplacian(s0.mu) - S) < 1e-8);
}

TEST_CASE("zero viscosity is the limit of small viscosity") {
  const Grid g = Grid::make_1d(1.0, 64);
  auto final_phi = [&](double tau) {
    Problem prob = make_problem(g);
    prob.model.tau = tau;
    State s = initial_state(cosine(g, 0.5, 0.3), Field(g, 0.5), prob);
    for (int n = 0; n < 10; ++n) s = step(s, prob, SchemeConfig{});
    return s.phi;
  };
  const Field p0 = final_phi(0.0);
  const double d4 = norm_Linf(final_phi(1e-4) - p0);
  const double d3 = norm_Linf(final_phi(1e-3) - p0);
  CHECK(d4 < 1e-3);
  CHECK(d3 / d4 == doctest::Approx(10.0).epsilon(0.5));
}

TEST_CASE("Newton failure surfaces as SolverError after halving") {
  const Grid g = Grid::make_1d(1.0, 32);
  const Problem prob = make_problem(g);
  const State s0 = initial_state(cosine(g, 0.5, 0.3), Field(g, 0.5), prob);
  SchemeConfig cfg;
  cfg.newton_max_iter = 1;
  cfg.max_halvings = 2;
  CHECK_THROWS_AS(step(s0, prob, cfg), SolverError);
  CHECK_THROWS_AS(advance(s0, prob, cfg), SolverError);
  cfg.dt = 0.0;
  CHECK_THROWS_AS(step(s0, prob, cfg), ConfigError);

  RunOptions opts;
  opts.T = 0.01;
  SchemeConfig bad;
  bad.newton_max_iter = 1;
  bad.max_halvings = 1;
  const RunResult r = run(prob, bad, s0, opts);
  CHECK_FALSE(r.ok);
  CHECK_FALSE(r.error.empty());
  CHECK(r.final_state.t == 0.0);
}

TEST_CASE("run records and summary") {
  const Grid g = Grid::make_1d(1.0, 64);
  const Problem prob = make_problem(g);
  const State s0 = initial_state(cosine(g, 0.5, 0.3), Field(g, 0.5), prob);
  RunOptions opts;
  opts.T = 0.0;
  const RunResult r0 = run(prob, SchemeConfig{}, s0, opts);
  CHECK(r0.ok);
  CHECK(r0.records.size() == 1);
  CHECK(r0.summary.steps == 0);

  opts.T = 0.05;
  opts.snapshot_every = 10;
  opts.store_trajectory = true;
  const RunResult r = run(prob, SchemeConfig{}, s0, opts);
  CHECK(r.ok);
  CHECK(r.summary.steps == 50);
  CHECK(r.records.size() == 51);
  CHECK(r.trajectory.size() == 51);
  CHECK(r.snapshots.size() == 6);
  CHECK(r.final_state.t == doctest::Approx(0.05));
  CHECK(r.summary.flagged_records == 0);
  CHECK(r.summary.max_residual < 1e-8);
  CHECK(r.summary.max_mass_defect < 1e-12);
  for (const auto& rec : r.records) {
    CHECK(rec.mean_phi >= rec.mean_lo - 1e-9);
    CHECK(rec.mean_phi <= rec.mean_hi + 1e-9);
  }
}

TEST_CASE("cosine basis") {
  const Grid g = Grid::make_1d(2.0, 32);
  CHECK_THROWS_AS(CosineBasis(g, 0), PreconditionError);
  CHECK_THROWS_AS(CosineBasis(g, 33), PreconditionError);
  CHECK_THROWS_AS(CosineBasis(Grid::make_2d(1.0, 1.0, 8, 8), 4), PreconditionError);
  const CosineBasis b(g, 8);
  CHECK(b.eigenvalue(3) == doctest::Approx(std::pow(3 * M_PI / 2.0, 2)));
  Field u(g);
  for (int i = 0; i < 32; ++i) u[i] = std::exp(g.center(0, i)) * std::sin(5.0 * g.center(0, i));
  const Field p1 = b.apply(u);
  const Field p2 = b.apply(p1);
  CHECK(norm_Linf(p1 - p2) < 1e-12);
  const CosineBasis full(g, 32);
  CHECK(norm_Linf(full.apply(u) - u) < 1e-12);
  CHECK(mean(b.apply(u)) == doctest::Approx(mean(u)).epsilon(1e-13));
}

TEST_CASE("spectral step agrees with finite differences on smooth data") {
  const Grid g = Grid::make_1d(1.0, 64);
  const Problem prob = make_problem(g);
  const State s0 = initial_state(cosine(g, 0.5, 0.1), cosine(g, 0.5, 0.1, 2), prob);
  SchemeConfig cfg;
  const State fd = step(s0, prob, cfg);
  const State sp = spectral_step_1d(s0, prob, cfg, 64);
  CHECK(norm_Linf(fd.phi - sp.phi) < 1e-4);
  CHECK(norm_Linf(fd.sigma - sp.sigma) < 1e-4);
}

TEST_CASE("single-mode spectral step follows the mean ODE") {
  const Grid g = Grid::make_1d(1.0, 32);
  const Problem prob = make_problem(g);
  const State s0 = initial_state(Field(g, 0.4), Field(g, 0.5), prob);
  SchemeConfig cfg;
  cfg.dt = 0.01;
  const State s1 = spectral_step_1d(s0, prob, cfg, 1);
  const double expected = 0.4 + cfg.dt * (-prob.model.m * 0.4 + 0.5);
  CHECK(s1.phi.min() == doctest::Approx(expected).epsilon(1e-12));
  CHECK(s1.phi.max() == doctest::Approx(expected).epsilon(1e-12));
}
