#include <doctest.h>

#include <cmath>
#include <random>

#include "nlch/calculus.hpp"
#include "nlch/diagnostics.hpp"
#include "nlch/errors.hpp"
#include "nlch/solver.hpp"

using namespace nlch;

namespace {

DiscreteKernel unit_mass_kernel(const Grid& g) {
  KernelSpec spec;
  spec.amplitude = amplitude_for_interior_mass(spec, g, 1.0);
  return DiscreteKernel::build(spec, g);
}

}  // namespace

TEST_CASE("mean envelope") {
  const MeanEnvelope e = mean_envelope(1.0, 0.5, 1.0, 0.5);
  CHECK(e.lo == doctest::Approx(0.183940).epsilon(1e-5));
  CHECK(e.hi == doctest::Approx(0.5).epsilon(1e-12));
  const MeanEnvelope e0 = mean_envelope(0.0, 0.3, 2.0, 0.1);
  CHECK(e0.lo == 0.3);
  CHECK(e0.hi == 0.3);
  CHECK_THROWS_AS(mean_envelope(1.0, 0.5, 0.0, 0.1), PreconditionError);
  CHECK_THROWS_AS(mean_envelope(1.0, 1.0, 1.0, 0.1), PreconditionError);
  CHECK_THROWS_AS(mean_envelope(1.0, 0.5, 1.0, -0.1), PreconditionError);
}

TEST_CASE("delta for the mean") {
  CHECK(delta_for_mean(0.5, 1.0, 0.5, 1.0) == doctest::Approx(0.183940).epsilon(1e-5));
  CHECK(delta_for_mean(0.5, 1.0, 0.0, 0.1) == doctest::Approx(0.25));
  CHECK(delta_for_mean(0.5, 1.0, 0.9, 0.1) == doctest::Approx(0.1));
  CHECK_THROWS_AS(delta_for_mean(0.5, 1.0, 1.0, 1.0), PreconditionError);
}

TEST_CASE("energy of a constant field is |Omega| F(c)") {
  const Grid g = Grid::make_1d(2.0, 64);
  const DiscreteKernel k = unit_mass_kernel(g);
  const auto pot = PotentialParams::make(0.6, 1e-3);
  const ExtendedReal E = energy(Field(g, 0.3), k, pot);
  CHECK(E.value() == doctest::Approx(2.0 * eval_F(0.3, pot).value()).epsilon(1e-12));
  CHECK(std::abs(nonlocal_energy(Field(g, 0.3), k)) < 1e-14);
  const auto sharp = PotentialParams::make(0.6);
  Field out(g, 0.3);
  out[5] = 1.0;
  CHECK(energy(out, k, sharp).is_infinite());
  CHECK(energy(Field(g, 0.3), k, sharp).is_finite());
}

TEST_CASE("non-local energy matches the pairwise double sum") {
  const Grid g = Grid::make_2d(1.0, 1.0, 16, 16);
  const DiscreteKernel k = unit_mass_kernel(g);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Field phi(g);
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = U(rng);
  double pair = 0.0;
  const double v = g.cell_volume();
  for (int j = 0; j < 16; ++j)
    for (int i = 0; i < 16; ++i)
      for (int jj = 0; jj < 16; ++jj)
        for (int ii = 0; ii < 16; ++ii) {
          const double r = std::hypot(g.center(0, i) - g.center(0, ii), g.center(1, j) - g.center(1, jj));
          const double d = phi[g.index(i, j)] - phi[g.index(ii, jj)];
          pair += 0.25 * kernel_value(k.spec(), r) * d * d * v * v;
        }
  CHECK(nonlocal_energy(phi, k) == doctest::Approx(pair).epsilon(1e-10));
}

TEST_CASE("Lyapunov functional") {
  const Grid g = Grid::make_1d(1.0, 32);
  ModelParams p;
  p.h1 = {};
  p.tau = 0.5;
  State s{0.0, Field(g, 0.0), Field(g, -0.2), Field(g, 1.0)};
  const LyapunovValue eq = lyapunov_J(s, s, 0.1, p);
  CHECK(eq.J == 0.0);
  CHECK(eq.coercivity_ratio == 0.0);

  State prev = s;
  for (int i = 0; i < 32; ++i) s.mu[i] = std::cos(3.0 * g.center(0, i));
  s.phi = Field(g, 0.1);
  const double dt = 0.05;
  const LyapunovValue v = lyapunov_J(prev, s, dt, p);
  const Field S = eval_S(s.phi, s.sigma, p);
  const double dtphi_sq = 4.0;  // (0.1/0.05)^2 over a unit domain
  CHECK(v.dtphi_sq == doctest::Approx(dtphi_sq));
  CHECK(v.J == doctest::Approx(0.5 * grad_norm_sq(s.mu) - inner(S, s.mu) + 0.5 * p.tau * dtphi_sq));
  CHECK(v.coercivity_ratio == doctest::Approx((v.grad_mu_sq + v.dtphi_sq) / (v.J + 1.0)));
}

TEST_CASE("weak residuals respond linearly to a chemical potential perturbation") {
  const Grid g = Grid::make_1d(1.0, 64);
  Problem prob;
  prob.kernel = unit_mass_kernel(g);
  Field phi0(g);
  for (int i = 0; i < 64; ++i) phi0[i] = 0.5 + 0.2 * std::cos(M_PI * g.center(0, i));
  SchemeConfig cfg;
  const State s0 = initial_state(phi0, Field(g, 0.5), prob);
  const State s1 = step(s0, prob, cfg);
  const Residuals base = weak_residuals(s0, s1, cfg.dt, prob.model, prob.kernel, prob.pot);
  CHECK(base.max() < 1e-8);

  State pert = s1;
  Field bump(g);
  for (int i = 0; i < 64; ++i) bump[i] = 1e-6 * std::cos(2.0 * M_PI * g.center(0, i));
  pert.mu += bump;
  const Residuals r = weak_residuals(s0, pert, cfg.dt, prob.model, prob.kernel, prob.pot);
  CHECK(r.r_mu == doctest::Approx(norm_Linf(bump)).epsilon(1e-3));
  CHECK(r.r_phi == doctest::Approx(norm_Linf(neumann_laplacian(bump))).epsilon(1e-3));
  CHECK(r.r_sigma == doctest::Approx(base.r_sigma));
}

TEST_CASE("separation delta") {
  const auto pot = PotentialParams::make(0.6, 1e-6);
  const double drive = eval_dF(0.95, pot);
  CHECK(separation_delta(pot, drive, 0.25) == doctest::Approx(0.05).epsilon(1e-6));
  CHECK(separation_delta(pot, drive, 0.01) == 0.01);
  CHECK(separation_delta(pot, -10.0, 0.2) == 0.2);
  CHECK(separation_delta(pot, 1e12, 0.2) <= 0.0);
}
