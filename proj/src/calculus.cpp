#include "nlch/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlch/errors.hpp"
#include "nlch/kernels.hpp"

namespace nlch {

Field neumann_laplacian(const Field& u) {
  Field out(u.grid());
  kernels::parallel::neumann_laplacian(u.grid(), u.values(), out.values());
  return out;
}

double mean(const Field& u) {
  double s = 0.0;
  for (double v : u.values()) s += v;
  return s / static_cast<double>(u.size());
}

double inner(const Field& u, const Field& v) {
  require_same_grid(u, v, "inner");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s * u.grid().cell_volume();
}

double norm_L2(const Field& u) { return std::sqrt(inner(u, u)); }

double norm_Linf(const Field& u) {
  double m = 0.0;
  for (double v : u.values()) m = std::max(m, std::abs(v));
  return m;
}

double grad_inner(const Field& u, const Field& v) {
  require_same_grid(u, v, "grad_inner");
  const Grid& g = u.grid();
  const int nx = g.nx();
  const int ny = g.ny();
  double sx = 0.0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      const std::size_t a = g.index(i, j);
      sx += (u[a + 1] - u[a]) * (v[a + 1] - v[a]);
    }
  double s = sx / (g.spacing(0) * g.spacing(0));
  if (g.dim() == 2) {
    double sy = 0.0;
    for (int j = 0; j + 1 < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const std::size_t a = g.index(i, j);
        const std::size_t b = g.index(i, j + 1);
        sy += (u[b] - u[a]) * (v[b] - v[a]);
      }
    s += sy / (g.spacing(1) * g.spacing(1));
  }
  return s * g.cell_volume();
}

double grad_norm_sq(const Field& u) { return grad_inner(u, u); }

double norm_H1(const Field& u) { return std::sqrt(inner(u, u) + grad_norm_sq(u)); }

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void remove_mean(std::span<double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  s /= static_cast<double>(v.size());
  for (double& x : v) x -= s;
}

}  // namespace

Field inv_neumann_laplacian(const Field& f, const CgOptions& opts) {
  const double m = mean(f);
  if (!(std::abs(m) < opts.mean_tol)) {
    std::ostringstream os;
    os << "inverse Laplacian needs a mean-free right-hand side, mean = " << m;
    throw PreconditionError(os.str());
  }
  const Grid& g = f.grid();
  const std::size_t n = f.size();
  std::vector<double> r(f.values().begin(), f.values().end());
  remove_mean(r);
  const double rhs_norm = std::sqrt(dot(r, r));
  Field u(g, 0.0);
  if (rhs_norm == 0.0) return u;

  if (g.dim() == 1) {
    // Flux form: face flux q_{i+1/2} = -h sum_{k<=i} r_k, then u_{i+1} = u_i + h q.
    const double h = g.spacing(0);
    double q = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      q -= h * r[i];
      u[i + 1] = u[i] + h * q;
    }
    remove_mean(u.values());
    return u;
  }

  std::vector<double> p = r;
  std::vector<double> ap(n);
  double rr = dot(r, r);
  const int max_iter = opts.max_iter_factor * static_cast<int>(n);
  for (int it = 0; it < max_iter; ++it) {
    kernels::parallel::neumann_laplacian(g, p, ap);
    for (double& v : ap) v = -v;
    const double pap = dot(p, ap);
    const double alpha = rr / pap;
    for (std::size_t i = 0; i < n; ++i) {
      u[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    remove_mean(r);
    const double rr_new = dot(r, r);
    if (std::sqrt(rr_new) <= opts.rel_tol * rhs_norm) {
      remove_mean(u.values());
      return u;
    }
    const double beta = rr_new / rr;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    rr = rr_new;
  }
  throw SolverError("inverse Laplacian CG did not converge", std::sqrt(rr) / rhs_norm);
}

double vprime_norm(const Field& f, const CgOptions& opts) {
  const Field nf = inv_neumann_laplacian(f, opts);
  return std::sqrt(std::max(0.0, inner(f, nf)));
}

namespace {

Field thomas_1d(std::span<const double> diag, const Field& rhs) {
  const Grid& g = rhs.grid();
  const int n = g.nx();
  const double c = 1.0 / (g.spacing(0) * g.spacing(0));
  // Row i: (diag_i + c*[i>0] + c*[i<n-1]) u_i - c u_{i-1} - c u_{i+1} = rhs_i
  std::vector<double> cp(n);
  std::vector<double> dp(n);
  for (int i = 0; i < n; ++i) {
    const double lower = i > 0 ? -c : 0.0;
    const double upper = i < n - 1 ? -c : 0.0;
    const double b = diag[i] + (i > 0 ? c : 0.0) + (i < n - 1 ? c : 0.0);
    const double denom = b - (i > 0 ? lower * cp[i - 1] : 0.0);
    cp[i] = upper / denom;
    dp[i] = (rhs[i] - (i > 0 ? lower * dp[i - 1] : 0.0)) / denom;
  }
  Field u(g);
  u[n - 1] = dp[n - 1];
  for (int i = n - 2; i >= 0; --i) u[i] = dp[i] - cp[i] * u[i + 1];
  return u;
}

Field pcg_2d(std::span<const double> diag, const Field& rhs, double rel_tol) {
  const Grid& g = rhs.grid();
  const std::size_t n = rhs.size();
  const double cx = 1.0 / (g.spacing(0) * g.spacing(0));
  const double cy = 1.0 / (g.spacing(1) * g.spacing(1));
  std::vector<double> inv_d(n);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const std::size_t k = g.index(i, j);
      const double off = cx * ((i > 0) + (i < g.nx() - 1)) + cy * ((j > 0) + (j < g.ny() - 1));
      inv_d[k] = 1.0 / (diag[k] + off);
    }
  const auto apply = [&](std::span<const double> x, std::span<double> y) {
    kernels::parallel::neumann_laplacian(g, x, y);
    for (std::size_t k = 0; k < n; ++k) y[k] = diag[k] * x[k] - y[k];
  };

  Field u(g, 0.0);
  std::vector<double> r(rhs.values().begin(), rhs.values().end());
  const double rhs_norm = std::sqrt(dot(r, r));
  if (rhs_norm == 0.0) return u;
  std::vector<double> z(n);
  for (std::size_t k = 0; k < n; ++k) z[k] = inv_d[k] * r[k];
  std::vector<double> p = z;
  std::vector<double> ap(n);
  double rz = dot(r, z);
  const int max_iter = 10 * static_cast<int>(n);
  double res = rhs_norm;
  for (int it = 0; it < max_iter; ++it) {
    apply(p, ap);
    const double alpha = rz / dot(p, ap);
    for (std::size_t k = 0; k < n; ++k) {
      u[k] += alpha * p[k];
      r[k] -= alpha * ap[k];
    }
    res = std::sqrt(dot(r, r));
    if (res <= rel_tol * rhs_norm) return u;
    for (std::size_t k = 0; k < n; ++k) z[k] = inv_d[k] * r[k];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
    rz = rz_new;
  }
  throw SolverError("shifted Laplacian CG did not converge", res / rhs_norm);
}

}  // namespace

Field solve_shifted_laplacian(std::span<const double> diag, const Field& rhs, double rel_tol) {
  if (diag.size() != rhs.size()) throw ShapeError("shifted Laplacian: diagonal size mismatch");
  for (double d : diag) {
    if (!(d > 0.0) || !std::isfinite(d)) throw PreconditionError("shifted Laplacian needs a positive finite diagonal");
  }
  if (rhs.grid().dim() == 1) return thomas_1d(diag, rhs);
  return pcg_2d(diag, rhs, rel_tol);
}

}  // namespace nlch
