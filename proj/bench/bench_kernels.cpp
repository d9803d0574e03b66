// Serial vs OpenMP timings for the Laplacian and direct convolution, with
// the FFT path for reference. Usage: nlch_bench [cells] [repeats]
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include <omp.h>

#include "nlch/kernel.hpp"
#include "nlch/kernels.hpp"

namespace {

template <class F>
double time_ms(int repeats, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < repeats; ++r) f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / repeats;
}

}  // namespace

int main(int argc, char** argv) {
  const int cells = argc > 1 ? std::atoi(argv[1]) : 256;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 20;
  const nlch::Grid g = nlch::Grid::make_2d(1.0, 1.0, cells, cells);
  nlch::KernelSpec spec;
  spec.width = 0.05;
  spec.cutoff_radius = 0.05;
  const nlch::DiscreteKernel k = nlch::DiscreteKernel::build(spec, g);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  nlch::Field u(g);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = U(rng);
  std::vector<double> out_s(g.size());
  std::vector<double> out_p(g.size());

  std::printf("grid %dx%d, stencil %dx%d, threads %d\n", cells, cells, k.stencil().width_x(), k.stencil().width_y(),
              omp_get_max_threads());
  const double lap_s = time_ms(repeats, [&] { nlch::kernels::serial::neumann_laplacian(g, u.values(), out_s); });
  const double lap_p = time_ms(repeats, [&] { nlch::kernels::parallel::neumann_laplacian(g, u.values(), out_p); });
  std::printf("laplacian      serial %9.3f ms  parallel %9.3f ms  identical %s\n", lap_s, lap_p,
              out_s == out_p ? "yes" : "no");
  const int conv_repeats = std::max(1, repeats / 10);
  const double conv_s =
      time_ms(conv_repeats, [&] { nlch::kernels::serial::convolve_direct(g, k.stencil(), u.values(), out_s); });
  const double conv_p =
      time_ms(conv_repeats, [&] { nlch::kernels::parallel::convolve_direct(g, k.stencil(), u.values(), out_p); });
  std::printf("direct conv    serial %9.3f ms  parallel %9.3f ms  identical %s\n", conv_s, conv_p,
              out_s == out_p ? "yes" : "no");
  const double fft = time_ms(repeats, [&] { (void)nlch::convolve(k, u); });
  std::printf("fft conv       %9.3f ms\n", fft);
  return 0;
}
