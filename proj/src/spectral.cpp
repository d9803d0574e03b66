#include "nlch/spectral.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nlch/errors.hpp"

namespace nlch {

CosineBasis::CosineBasis(const Grid& grid, int modes) : grid_(grid), modes_(modes) {
  if (grid.dim() != 1) throw PreconditionError("cosine basis needs a 1-D grid");
  if (modes < 1 || modes > grid.nx()) {
    std::ostringstream os;
    os << "mode count " << modes << " outside [1, " << grid.nx() << "]";
    throw PreconditionError(os.str());
  }
  const double L = grid.length(0);
  const std::size_t n = grid.size();
  eigen_.resize(modes);
  table_.resize(static_cast<std::size_t>(modes) * n);
  for (int j = 0; j < modes; ++j) {
    const double k = j * std::numbers::pi / L;
    eigen_[j] = k * k;
    const double c = std::sqrt((j == 0 ? 1.0 : 2.0) / L);
    for (std::size_t i = 0; i < n; ++i) table_[j * n + i] = c * std::cos(k * grid.center(0, static_cast<int>(i)));
  }
}

std::vector<double> CosineBasis::project(const Field& u) const {
  if (!(u.grid() == grid_)) throw ShapeError("field does not live on the basis grid");
  const std::size_t n = grid_.size();
  const double h = grid_.cell_volume();
  std::vector<double> c(modes_, 0.0);
  for (int j = 0; j < modes_; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += table_[j * n + i] * u[i];
    c[j] = s * h;
  }
  return c;
}

Field CosineBasis::synthesize(std::span<const double> coeffs) const {
  if (coeffs.size() != static_cast<std::size_t>(modes_)) throw ShapeError("coefficient count mismatch");
  const std::size_t n = grid_.size();
  Field u(grid_);
  for (int j = 0; j < modes_; ++j)
    for (std::size_t i = 0; i < n; ++i) u[i] += coeffs[j] * table_[j * n + i];
  return u;
}

namespace {

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> from_eigen(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

State spectral_step_1d(const State& s, const Problem& prob, const SchemeConfig& cfg, int modes) {
  const double dt = cfg.dt;
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  const Grid& g = s.phi.grid();
  const CosineBasis basis(g, modes);
  const ModelParams& p = prob.model;
  const PotentialParams& pot = prob.pot;
  const bool convex = cfg.splitting == Splitting::convex_split;
  const std::size_t n = g.size();
  const double h = g.cell_volume();

  Eigen::MatrixXd Phi(static_cast<Eigen::Index>(n), modes);
  for (int j = 0; j < modes; ++j)
    for (std::size_t i = 0; i < n; ++i) Phi(static_cast<Eigen::Index>(i), j) = basis.mode(j, i);
  Eigen::VectorXd lam(modes);
  for (int j = 0; j < modes; ++j) lam(j) = basis.eigenvalue(j);

  const Field phi_n = basis.apply(s.phi);
  const Eigen::VectorXd phi_hat_n = to_eigen(basis.project(phi_n));

  // sigma: dense Galerkin system (1/dt + Lambda) s + Pi[(B + C h2(phi_n)) s] = s_n/dt + B Pi sigma_S
  const Field supply = supply_field(p, g);
  Eigen::VectorXd react(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) react(static_cast<Eigen::Index>(i)) = (p.B + p.C * p.h2.h2(phi_n[i])) * h;
  Eigen::MatrixXd As = Phi.transpose() * react.asDiagonal() * Phi;
  As.diagonal().array() += 1.0 / dt + lam.array();
  const Eigen::VectorXd bs =
      to_eigen(basis.project(s.sigma)) / dt + p.B * to_eigen(basis.project(supply));
  const Eigen::VectorXd sig_hat = As.partialPivLu().solve(bs);

  State next;
  next.t = s.t + dt;
  next.sigma = basis.synthesize(from_eigen(sig_hat));

  const Field jphi = convolve(prob.kernel, phi_n);
  const Field& a = prob.kernel.a_field();
  Field explicit_mu(g);
  for (std::size_t i = 0; i < n; ++i) {
    explicit_mu[i] = -jphi[i] - p.chi * next.sigma[i];
    if (convex) explicit_mu[i] += eval_dF2_bar(phi_n[i], pot);
  }
  const Eigen::VectorXd S_hat = to_eigen(basis.project(eval_S(phi_n, next.sigma, p)));

  Eigen::VectorXd phi_hat = phi_hat_n;
  Field phi = phi_n;
  Field G(g);
  Eigen::VectorXd D(static_cast<Eigen::Index>(n));
  double update = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < cfg.newton_max_iter && !(update < cfg.newton_tol); ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      const double d1 = convex ? eval_dF1_lambda(phi[i], pot) : eval_dF_lambda(phi[i], pot);
      const double d2 = convex ? eval_ddF1_lambda(phi[i], pot) : eval_ddF_lambda(phi[i], pot);
      G[i] = p.tau * (phi[i] - phi_n[i]) / dt + a[i] * phi[i] + d1 + explicit_mu[i];
      D(static_cast<Eigen::Index>(i)) = (p.tau / dt + a[i] + d2) * h;
    }
    const Eigen::VectorXd G_hat = to_eigen(basis.project(G));
    const Eigen::VectorXd R = phi_hat - phi_hat_n + dt * lam.cwiseProduct(G_hat) - dt * S_hat;
    Eigen::MatrixXd Jac = dt * lam.asDiagonal() * (Phi.transpose() * D.asDiagonal() * Phi);
    Jac.diagonal().array() += 1.0;
    const Eigen::VectorXd delta = Jac.partialPivLu().solve(-R);
    phi_hat += delta;
    phi = basis.synthesize(from_eigen(phi_hat));
    update = (Phi * delta).cwiseAbs().maxCoeff();
    if (!std::isfinite(update)) throw SolverError("spectral Newton produced non-finite values", update);
  }
  if (!(update < cfg.newton_tol)) throw SolverError("spectral Newton did not converge", update);

  for (std::size_t i = 0; i < n; ++i) {
    const double d1 = convex ? eval_dF1_lambda(phi[i], pot) : eval_dF_lambda(phi[i], pot);
    G[i] = p.tau * (phi[i] - phi_n[i]) / dt + a[i] * phi[i] + d1 + explicit_mu[i];
  }
  next.phi = std::move(phi);
  next.mu = basis.apply(G);
  return next;
}

}  // namespace nlch
