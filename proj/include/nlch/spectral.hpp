#pragma once

#include <span>
#include <vector>

#include "nlch/solver.hpp"

namespace nlch {

/// Neumann eigenmodes of -d^2/dx^2 on [0, L] sampled at cell centres:
/// e_0 = sqrt(1/L), e_j = sqrt(2/L) cos(j pi x / L), eigenvalue (j pi / L)^2.
/// The sampled modes are orthonormal under the cell quadrature, so the
/// projection below is exactly idempotent.
class CosineBasis {
 public:
  /// Throws PreconditionError unless the grid is 1-D and 1 <= modes <= cells.
  CosineBasis(const Grid& grid, int modes);

  const Grid& grid() const { return grid_; }
  int modes() const { return modes_; }
  double eigenvalue(int j) const { return eigen_[j]; }
  double mode(int j, std::size_t i) const { return table_[static_cast<std::size_t>(j) * grid_.size() + i]; }

  std::vector<double> project(const Field& u) const;
  Field synthesize(std::span<const double> coeffs) const;
  /// Pi_n u.
  Field apply(const Field& u) const { return synthesize(project(u)); }

 private:
  Grid grid_;
  int modes_ = 0;
  std::vector<double> eigen_;
  std::vector<double> table_;
};

/// One step of the same splitting as step() in the first `modes` cosine
/// modes, nonlinear terms projected by cell quadrature. Returned fields are
/// the synthesized Galerkin approximations.
State spectral_step_1d(const State& s, const Problem& prob, const SchemeConfig& cfg, int modes);

}  // namespace nlch
