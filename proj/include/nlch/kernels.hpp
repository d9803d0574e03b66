#pragma once

// Data-parallel inner loops. Each kernel exists twice: `serial` is the
// reference used by tests, `parallel` is the OpenMP version used by the
// solver. Both perform the same floating-point operations per output element,
// so they agree bit for bit.

#include <cstddef>
#include <span>
#include <vector>

#include "nlch/grid.hpp"

namespace nlch::kernels {

/// Kernel samples times cell volume on offsets (-half_x..half_x) x (-half_y..half_y).
struct Stencil {
  int half_x = 0;
  int half_y = 0;
  std::vector<double> weights;  // row-major, width 2*half_x+1

  int width_x() const { return 2 * half_x + 1; }
  int width_y() const { return 2 * half_y + 1; }
  double at(int ox, int oy) const {
    return weights[static_cast<std::size_t>(oy + half_y) * width_x() + (ox + half_x)];
  }
};

namespace serial {

/// Second-order cell-centred Laplacian with mirror (zero-flux) ghosts.
void neumann_laplacian(const Grid& g, std::span<const double> in, std::span<double> out);

/// out(x) = sum_{y in Omega} J(x - y) in(y) |cell|, without periodic wrap.
void convolve_direct(const Grid& g, const Stencil& s, std::span<const double> in, std::span<double> out);

}  // namespace serial

namespace parallel {

void neumann_laplacian(const Grid& g, std::span<const double> in, std::span<double> out);
void convolve_direct(const Grid& g, const Stencil& s, std::span<const double> in, std::span<double> out);

/// out[i] = f(in[i]).
template <class F>
void transform(std::span<const double> in, std::span<double> out, F f) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(in.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = f(in[i]);
}

}  // namespace parallel

}  // namespace nlch::kernels
