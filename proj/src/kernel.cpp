#include "nlch/kernel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <sstream>

#include "nlch/errors.hpp"

namespace nlch {

KernelFamily parse_kernel_family(const std::string& name) {
  if (name == "gaussian") return KernelFamily::gaussian;
  if (name == "wendland" || name == "wendland-mollifier") return KernelFamily::wendland;
  if (name == "tophat") return KernelFamily::tophat;
  throw ConfigError("unknown kernel family '" + name + "'");
}

std::string to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::gaussian:
      return "gaussian";
    case KernelFamily::wendland:
      return "wendland";
    case KernelFamily::tophat:
      return "tophat";
  }
  return "?";
}

double kernel_value(const KernelSpec& spec, double r) {
  if (r > spec.cutoff_radius) return 0.0;
  switch (spec.family) {
    case KernelFamily::gaussian:
      return spec.amplitude * std::exp(-r * r / (2.0 * spec.width * spec.width));
    case KernelFamily::wendland: {
      const double s = r / spec.width;
      if (s >= 1.0) return 0.0;
      const double t = 1.0 - s;
      return spec.amplitude * t * t * t * t * (4.0 * s + 1.0);
    }
    case KernelFamily::tophat:
      return spec.amplitude;
  }
  return 0.0;
}

double kernel_radial_derivative(const KernelSpec& spec, double r) {
  if (r > spec.cutoff_radius) return 0.0;
  switch (spec.family) {
    case KernelFamily::gaussian:
      return -r / (spec.width * spec.width) * kernel_value(spec, r);
    case KernelFamily::wendland: {
      const double s = r / spec.width;
      if (s >= 1.0) return 0.0;
      const double t = 1.0 - s;
      return spec.amplitude * (-20.0 * s * t * t * t) / spec.width;
    }
    case KernelFamily::tophat:
      return 0.0;
  }
  return 0.0;
}

namespace {

void validate_spec(const KernelSpec& spec, const Grid& grid) {
  if (!(spec.width > 0.0)) throw ConfigError("kernel width must be positive");
  if (!(spec.amplitude > 0.0)) throw ConfigError("kernel amplitude must be positive");
  if (!(spec.cutoff_radius > 0.0)) throw ConfigError("kernel cutoff_radius must be positive");
  double shortest = grid.length(0);
  if (grid.dim() == 2) shortest = std::min(shortest, grid.length(1));
  if (spec.cutoff_radius > shortest) {
    std::ostringstream os;
    os << "kernel cutoff_radius " << spec.cutoff_radius << " exceeds the shortest domain side " << shortest;
    throw ConfigError(os.str());
  }
}

kernels::Stencil sample_stencil(const KernelSpec& spec, const Grid& grid,
                                double (*profile)(const KernelSpec&, double)) {
  kernels::Stencil s;
  const double hx = grid.spacing(0);
  const double hy = grid.dim() == 2 ? grid.spacing(1) : 1.0;
  s.half_x = std::min(static_cast<int>(std::floor(spec.cutoff_radius / hx)), grid.nx() - 1);
  s.half_y = grid.dim() == 2 ? std::min(static_cast<int>(std::floor(spec.cutoff_radius / hy)), grid.ny() - 1) : 0;
  s.weights.assign(static_cast<std::size_t>(s.width_x()) * s.width_y(), 0.0);
  const double vol = grid.cell_volume();
  for (int oy = -s.half_y; oy <= s.half_y; ++oy)
    for (int ox = -s.half_x; ox <= s.half_x; ++ox) {
      const double dx = ox * hx;
      const double dy = grid.dim() == 2 ? oy * hy : 0.0;
      const double r = std::sqrt(dx * dx + dy * dy);
      s.weights[static_cast<std::size_t>(oy + s.half_y) * s.width_x() + (ox + s.half_x)] =
          profile(spec, r) * vol;
    }
  return s;
}

double abs_derivative(const KernelSpec& spec, double r) { return std::abs(kernel_radial_derivative(spec, r)); }

// Tophat: |grad J| is amplitude times the surface measure of the sphere
// |x - y| = cutoff. Restricted to Omega this is the part of that sphere lying
// inside the domain.
double tophat_jump_measure(const KernelSpec& spec, const Grid& grid) {
  const double c = spec.cutoff_radius;
  double best = 0.0;
  if (grid.dim() == 1) {
    const double L = grid.length(0);
    for (int i = 0; i < grid.nx(); ++i) {
      const double x = grid.center(0, i);
      const double m = (x - c >= 0.0 ? 1.0 : 0.0) + (x + c <= L ? 1.0 : 0.0);
      best = std::max(best, m);
    }
    return spec.amplitude * best;
  }
  const int n_angles = 720;
  const double dtheta = 2.0 * std::numbers::pi / n_angles;
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i < grid.nx(); ++i) {
      const double x = grid.center(0, i);
      const double y = grid.center(1, j);
      int inside = 0;
      for (int a = 0; a < n_angles; ++a) {
        const double th = (a + 0.5) * dtheta;
        const double px = x + c * std::cos(th);
        const double py = y + c * std::sin(th);
        if (px >= 0.0 && px <= grid.length(0) && py >= 0.0 && py <= grid.length(1)) ++inside;
      }
      best = std::max(best, inside * dtheta * c);
    }
  return spec.amplitude * best;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

int fft_friendly(int n) {
  for (int m = n;; ++m) {
    int r = m;
    for (int f : {2, 3, 5, 7})
      while (r % f == 0) r /= f;
    if (r == 1) return m;
  }
}

}  // namespace

/// Zero-padded linear convolution on a padded box via real FFTs.
class FftConvolver {
 public:
  FftConvolver(const Grid& grid, const kernels::Stencil& s) : grid_(grid) {
    px_ = fft_friendly(grid.nx() + 2 * s.half_x);
    py_ = grid.dim() == 2 ? fft_friendly(grid.ny() + 2 * s.half_y) : 1;
    spectral_ = static_cast<std::size_t>(py_) * (px_ / 2 + 1);
    real_ = static_cast<std::size_t>(py_) * px_;

    double* in = fftw_alloc_real(real_);
    fftw_complex* out = fftw_alloc_complex(spectral_);
    {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      if (grid.dim() == 1) {
        fwd_ = fftw_plan_dft_r2c_1d(px_, in, out, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r_1d(px_, out, in, FFTW_ESTIMATE);
      } else {
        fwd_ = fftw_plan_dft_r2c_2d(py_, px_, in, out, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r_2d(py_, px_, out, in, FFTW_ESTIMATE);
      }
    }
    // Kernel placed with wrap-around so that index 0 is offset 0.
    std::fill(in, in + real_, 0.0);
    for (int oy = -s.half_y; oy <= s.half_y; ++oy)
      for (int ox = -s.half_x; ox <= s.half_x; ++ox) {
        const int ix = (ox + px_) % px_;
        const int iy = (oy + py_) % py_;
        in[static_cast<std::size_t>(iy) * px_ + ix] = s.at(ox, oy);
      }
    fftw_execute_dft_r2c(fwd_, in, out);
    kernel_hat_.resize(spectral_);
    const double scale = 1.0 / static_cast<double>(real_);
    for (std::size_t k = 0; k < spectral_; ++k)
      kernel_hat_[k] = std::complex<double>(out[k][0], out[k][1]) * scale;
    fftw_free(in);
    fftw_free(out);
  }

  ~FftConvolver() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }

  FftConvolver(const FftConvolver&) = delete;
  FftConvolver& operator=(const FftConvolver&) = delete;

  void apply(std::span<const double> u, std::span<double> result) const {
    struct Buffers {
      double* in;
      fftw_complex* out;
      ~Buffers() {
        fftw_free(in);
        fftw_free(out);
      }
    } buf{fftw_alloc_real(real_), fftw_alloc_complex(spectral_)};

    std::fill(buf.in, buf.in + real_, 0.0);
    const int nx = grid_.nx();
    for (int j = 0; j < grid_.ny(); ++j)
      std::copy_n(u.begin() + static_cast<std::ptrdiff_t>(j) * nx, nx, buf.in + static_cast<std::size_t>(j) * px_);
    fftw_execute_dft_r2c(fwd_, buf.in, buf.out);
    for (std::size_t k = 0; k < spectral_; ++k) {
      const std::complex<double> v = std::complex<double>(buf.out[k][0], buf.out[k][1]) * kernel_hat_[k];
      buf.out[k][0] = v.real();
      buf.out[k][1] = v.imag();
    }
    fftw_execute_dft_c2r(bwd_, buf.out, buf.in);
    for (int j = 0; j < grid_.ny(); ++j)
      std::copy_n(buf.in + static_cast<std::size_t>(j) * px_, nx, result.begin() + static_cast<std::ptrdiff_t>(j) * nx);
  }

 private:
  Grid grid_;
  int px_ = 0;
  int py_ = 0;
  std::size_t spectral_ = 0;
  std::size_t real_ = 0;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
  std::vector<std::complex<double>> kernel_hat_;
};

double amplitude_for_interior_mass(KernelSpec spec, const Grid& grid, double interior_mass) {
  validate_spec(spec, grid);
  spec.amplitude = 1.0;
  const auto s = sample_stencil(spec, grid, &kernel_value);
  double mass = 0.0;
  for (double w : s.weights) mass += w;
  if (!(mass > 0.0)) throw ConfigError("kernel stencil has zero mass on this grid");
  return interior_mass / mass;
}

DiscreteKernel DiscreteKernel::build(const KernelSpec& spec, const Grid& grid) {
  validate_spec(spec, grid);
  DiscreteKernel k;
  k.spec_ = spec;
  k.grid_ = grid;
  const double h_min = grid.dim() == 2 ? std::min(grid.spacing(0), grid.spacing(1)) : grid.spacing(0);
  if (!(h_min < spec.width)) {
    std::ostringstream os;
    os << "grid spacing " << h_min << " under-resolves kernel width " << spec.width;
    k.warnings_.push_back(os.str());
  }
  k.stencil_ = sample_stencil(spec, grid, &kernel_value);

  Field ones(grid, 1.0);
  k.a_field_ = Field(grid);
  kernels::parallel::convolve_direct(grid, k.stencil_, ones.values(), k.a_field_.values());
  k.a_star_ = k.a_field_.min();
  k.a_sup_ = k.a_field_.max();  // J >= 0 for every family, so int |J| = a

  if (spec.family == KernelFamily::tophat) {
    k.b_sup_ = tophat_jump_measure(spec, grid);
  } else {
    const auto grad = sample_stencil(spec, grid, &abs_derivative);
    Field b(grid);
    kernels::parallel::convolve_direct(grid, grad, ones.values(), b.values());
    k.b_sup_ = b.max();
  }
  k.fft_ = std::make_shared<const FftConvolver>(grid, k.stencil_);
  return k;
}

Field convolve(const DiscreteKernel& k, const Field& u) {
  if (!(u.grid() == k.grid())) throw ShapeError("convolve: field grid differs from kernel grid");
  Field out(u.grid());
  k.fft().apply(u.values(), out.values());
  return out;
}

Field convolve_direct(const DiscreteKernel& k, const Field& u) {
  if (!(u.grid() == k.grid())) throw ShapeError("convolve_direct: field grid differs from kernel grid");
  Field out(u.grid());
  kernels::parallel::convolve_direct(u.grid(), k.stencil(), u.values(), out.values());
  return out;
}

A5Report check_A5(const DiscreteKernel& k, const PotentialParams& p) {
  A5Report r;
  r.a_star = k.a_star();
  r.a_sup = k.a_sup();
  r.b_sup = k.b_sup();
  r.c0 = p.c0();
  r.meets_c0 = r.a_star >= r.c0;
  r.meets_2c0 = r.a_star >= 2.0 * r.c0;
  r.finite_stats = std::isfinite(r.a_star) && std::isfinite(r.a_sup) && std::isfinite(r.b_sup);
  return r;
}

}  // namespace nlch
