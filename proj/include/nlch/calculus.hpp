#pragma once

#include <span>

#include "nlch/grid.hpp"

namespace nlch {

Field neumann_laplacian(const Field& u);

double mean(const Field& u);
/// sum u v |cell|
double inner(const Field& u, const Field& v);
double norm_L2(const Field& u);
double norm_Linf(const Field& u);
/// Face-difference gradient pairing; equals inner(-laplacian(u), v) exactly in
/// exact arithmetic (discrete Neumann Green identity).
double grad_inner(const Field& u, const Field& v);
double grad_norm_sq(const Field& u);
double norm_H1(const Field& u);

struct CgOptions {
  double rel_tol = 1e-10;
  int max_iter_factor = 10;  // max iterations = factor * cells
  double mean_tol = 1e-10;
};

/// Mean-free u with -Laplacian(u) = f (operator N). Throws PreconditionError
/// if |mean(f)| >= opts.mean_tol and SolverError when CG does not converge.
Field inv_neumann_laplacian(const Field& f, const CgOptions& opts = {});

/// sqrt(<f, N f>) for mean-free f.
double vprime_norm(const Field& f, const CgOptions& opts = {});

/// Solves (diag - Laplacian) u = rhs with diag > 0 pointwise. 1-D uses a
/// tridiagonal direct solve, 2-D Jacobi-preconditioned CG.
Field solve_shifted_laplacian(std::span<const double> diag, const Field& rhs, double rel_tol = 1e-13);

}  // namespace nlch
