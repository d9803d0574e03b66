#include "nlch/kernels.hpp"

#include <algorithm>

namespace nlch::kernels {

namespace {

// Row j of the Laplacian; shared by both variants so the arithmetic matches.
inline void laplacian_row(const Grid& g, std::span<const double> in, std::span<double> out, int j) {
  const int nx = g.nx();
  const int ny = g.ny();
  const double ix2 = 1.0 / (g.spacing(0) * g.spacing(0));
  const double iy2 = g.dim() == 2 ? 1.0 / (g.spacing(1) * g.spacing(1)) : 0.0;
  const std::size_t row = static_cast<std::size_t>(j) * nx;
  for (int i = 0; i < nx; ++i) {
    const double c = in[row + i];
    const double w = i > 0 ? in[row + i - 1] : c;
    const double e = i < nx - 1 ? in[row + i + 1] : c;
    double acc = (w - c) + (e - c);
    acc *= ix2;
    if (g.dim() == 2) {
      const double s = j > 0 ? in[row - nx + i] : c;
      const double n = j < ny - 1 ? in[row + nx + i] : c;
      acc += ((s - c) + (n - c)) * iy2;
    }
    out[row + i] = acc;
  }
}

inline double convolve_point(const Grid& g, const Stencil& s, std::span<const double> in, int i, int j) {
  const int nx = g.nx();
  const int ny = g.ny();
  const int ylo = std::max(-s.half_y, -j);
  const int yhi = std::min(s.half_y, ny - 1 - j);
  const int xlo = std::max(-s.half_x, -i);
  const int xhi = std::min(s.half_x, nx - 1 - i);
  double acc = 0.0;
  for (int oy = ylo; oy <= yhi; ++oy) {
    const std::size_t src = static_cast<std::size_t>(j + oy) * nx + i;
    const std::size_t wrow = static_cast<std::size_t>(oy + s.half_y) * s.width_x() + s.half_x;
    for (int ox = xlo; ox <= xhi; ++ox) {
      acc += s.weights[wrow + ox] * in[src + ox];
    }
  }
  return acc;
}

}  // namespace

namespace serial {

void neumann_laplacian(const Grid& g, std::span<const double> in, std::span<double> out) {
  for (int j = 0; j < g.ny(); ++j) laplacian_row(g, in, out, j);
}

void convolve_direct(const Grid& g, const Stencil& s, std::span<const double> in, std::span<double> out) {
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) out[g.index(i, j)] = convolve_point(g, s, in, i, j);
}

}  // namespace serial

namespace parallel {

void neumann_laplacian(const Grid& g, std::span<const double> in, std::span<double> out) {
  if (g.dim() == 1) {
    laplacian_row(g, in, out, 0);
    return;
  }
  const int ny = g.ny();
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) laplacian_row(g, in, out, j);
}

void convolve_direct(const Grid& g, const Stencil& s, std::span<const double> in, std::span<double> out) {
  const int nx = g.nx();
  const int ny = g.ny();
  const long total = static_cast<long>(nx) * ny;
#pragma omp parallel for schedule(static)
  for (long k = 0; k < total; ++k) {
    const int i = static_cast<int>(k % nx);
    const int j = static_cast<int>(k / nx);
    out[k] = convolve_point(g, s, in, i, j);
  }
}

}  // namespace parallel

}  // namespace nlch::kernels
