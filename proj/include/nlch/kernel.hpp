#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nlch/grid.hpp"
#include "nlch/kernels.hpp"
#include "nlch/potential.hpp"

namespace nlch {

enum class KernelFamily { gaussian, wendland, tophat };

KernelFamily parse_kernel_family(const std::string& name);
std::string to_string(KernelFamily f);

/// Radial convolution kernel J(x) = amplitude * profile(|x|), zero beyond
/// cutoff_radius.
///  - gaussian: exp(-r^2 / (2 width^2))
///  - wendland: (1 - r/width)_+^4 (4 r/width + 1), compactly supported in [0, width]
///  - tophat:   1 for r <= cutoff_radius (width only enters the resolution warning)
struct KernelSpec {
  KernelFamily family = KernelFamily::wendland;
  double width = 0.1;
  double amplitude = 1.0;
  double cutoff_radius = 0.1;
};

double kernel_value(const KernelSpec& spec, double r);
/// d/dr of kernel_value for r < cutoff; zero for the tophat interior.
double kernel_radial_derivative(const KernelSpec& spec, double r);

/// Amplitude for which an interior point (full stencil inside the domain)
/// has a(x) = interior_mass.
double amplitude_for_interior_mass(KernelSpec spec, const Grid& grid, double interior_mass);

class FftConvolver;

/// Kernel sampled on a grid with the induced a(x) = (J*1)(x) and the
/// statistics a_* = inf a, a^* = sup int |J|, b^* = sup int |grad J|.
/// Immutable after build; convolution is reentrant.
class DiscreteKernel {
 public:
  /// Throws ConfigError if the cutoff exceeds the shortest domain side or
  /// parameters are not positive.
  static DiscreteKernel build(const KernelSpec& spec, const Grid& grid);

  const KernelSpec& spec() const { return spec_; }
  const Grid& grid() const { return grid_; }
  const kernels::Stencil& stencil() const { return stencil_; }
  const Field& a_field() const { return a_field_; }
  double a_star() const { return a_star_; }
  double a_sup() const { return a_sup_; }
  double b_sup() const { return b_sup_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  const FftConvolver& fft() const { return *fft_; }

 private:
  KernelSpec spec_;
  Grid grid_;
  kernels::Stencil stencil_;
  Field a_field_;
  double a_star_ = 0.0;
  double a_sup_ = 0.0;
  double b_sup_ = 0.0;
  std::vector<std::string> warnings_;
  std::shared_ptr<const FftConvolver> fft_;
};

/// Omega-restricted convolution through zero-padded FFTs.
Field convolve(const DiscreteKernel& k, const Field& u);
/// Reference O(N * stencil) quadrature of the same operator.
Field convolve_direct(const DiscreteKernel& k, const Field& u);

struct A5Report {
  double a_star = 0.0;
  double a_sup = 0.0;
  double b_sup = 0.0;
  double c0 = 0.0;
  bool meets_c0 = false;     // a_* >= c0
  bool meets_2c0 = false;    // a_* >= 2 c0, enough for F'' + a_* >= c0
  bool finite_stats = false;
};

A5Report check_A5(const DiscreteKernel& k, const PotentialParams& p);

}  // namespace nlch
