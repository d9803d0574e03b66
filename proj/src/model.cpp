#include "nlch/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlch/errors.hpp"

namespace nlch {

SourceFamily parse_source_family(const std::string& name) {
  if (name == "zero") return SourceFamily::zero;
  if (name == "constant") return SourceFamily::constant;
  if (name == "saturating" || name == "smooth-saturating") return SourceFamily::saturating;
  throw ConfigError("unknown source family '" + name + "'");
}

std::string to_string(SourceFamily f) {
  switch (f) {
    case SourceFamily::zero:
      return "zero";
    case SourceFamily::constant:
      return "constant";
    case SourceFamily::saturating:
      return "saturating";
  }
  return "?";
}

namespace {
double saturate(double x) {
  const double xp = std::max(x, 0.0);
  return xp / (1.0 + xp);
}
}  // namespace

double SourceSpec::h1(double phi, double sigma) const {
  switch (family) {
    case SourceFamily::zero:
      return 0.0;
    case SourceFamily::constant:
      return value;
    case SourceFamily::saturating:
      return value * saturate(phi * sigma);
  }
  return 0.0;
}

double SourceSpec::h2(double phi) const {
  switch (family) {
    case SourceFamily::zero:
      return 0.0;
    case SourceFamily::constant:
      return value;
    case SourceFamily::saturating:
      return value * saturate(phi);
  }
  return 0.0;
}

double SourceSpec::sup() const {
  switch (family) {
    case SourceFamily::zero:
      return 0.0;
    case SourceFamily::constant:
      return value;
    case SourceFamily::saturating:
      return std::max(value, 0.0);
  }
  return 0.0;
}

double SourceSpec::inf() const {
  switch (family) {
    case SourceFamily::zero:
      return 0.0;
    case SourceFamily::constant:
      return value;
    case SourceFamily::saturating:
      return std::min(value, 0.0);
  }
  return 0.0;
}

double SourceSpec::lipschitz(double radius) const {
  // d/dphi [value * s(phi sigma)] = value * sigma / (1 + phi sigma)^2 for phi sigma > 0.
  return family == SourceFamily::saturating ? std::abs(value) * std::max(radius, 1.0) : 0.0;
}

Field eval_S(const Field& phi, const Field& sigma, const ModelParams& p) {
  require_same_grid(phi, sigma, "eval_S");
  Field out(phi.grid());
  for (std::size_t i = 0; i < phi.size(); ++i) out[i] = -p.m * phi[i] + p.h1.h1(phi[i], sigma[i]);
  return out;
}

Field eval_h2(const Field& phi, const ModelParams& p) {
  return map(phi, [&](double v) { return p.h2.h2(v); });
}

Field supply_field(const ModelParams& p, const Grid& grid) {
  if (p.sigma_S_field) {
    if (!(p.sigma_S_field->grid() == grid)) throw ShapeError("sigma_S field lives on a different grid");
    return *p.sigma_S_field;
  }
  return Field(grid, p.sigma_S);
}

double chi_bound_tau0(double c0) { return std::min(std::sqrt(c0 / 2.0), 1.0); }

bool ValidationReport::ok() const {
  for (const auto& c : checks) {
    if (c.passed || c.advisory) continue;
    if (strict || c.structural) return false;
  }
  return true;
}

std::vector<const Check*> ValidationReport::failures() const {
  std::vector<const Check*> out;
  for (const auto& c : checks)
    if (!c.passed) out.push_back(&c);
  return out;
}

ValidationReport validate(const ModelParams& p, const DiscreteKernel& k, const PotentialParams& pot) {
  ValidationReport rep;
  rep.strict = p.strict_mode;
  auto add = [&](std::string name, bool passed, double q, std::string detail, bool advisory = false,
                 bool structural = false) {
    rep.checks.push_back({std::move(name), passed, q, std::move(detail), advisory, structural});
  };
  auto fmt = [](auto&&... parts) {
    std::ostringstream os;
    os.precision(6);
    (os << ... << parts);
    return os.str();
  };

  add("tau-range", p.tau >= 0.0 && p.tau <= 1.0, p.tau, fmt("tau = ", p.tau, " must lie in [0,1]"), false, true);
  add("B-C-nonnegative", p.B >= 0.0 && p.C >= 0.0, std::min(p.B, p.C), fmt("B = ", p.B, ", C = ", p.C),
      false, true);
  add("chi-positive", p.chi > 0.0, p.chi, fmt("chi = ", p.chi));

  const double K = p.K();
  const bool a1 = p.m > 0.0 && p.h1.inf() >= 0.0 && K < p.m;
  add("A1", a1, K - p.m, fmt("h1 in [", p.h1.inf(), ", ", K, "], m = ", p.m, ", K - m = ", K - p.m));

  add("A2", std::isfinite(p.h2.sup()) && std::isfinite(p.h2.inf()), std::abs(p.h2.sup()),
      fmt("h2 bounded by ", std::max(std::abs(p.h2.sup()), std::abs(p.h2.inf()))));
  add("A2-h2-nonnegative", p.h2.inf() >= 0.0, p.h2.inf(),
      fmt("inf h2 = ", p.h2.inf(), " (needed for the nutrient max principle)"));

  double s_lo = p.sigma_S;
  double s_hi = p.sigma_S;
  if (p.sigma_S_field) {
    s_lo = p.sigma_S_field->min();
    s_hi = p.sigma_S_field->max();
  }
  add("A3", s_lo >= 0.0 && s_hi <= 1.0, s_lo < 0.0 ? s_lo : s_hi - 1.0,
      fmt("sigma_S in [", s_lo, ", ", s_hi, "]"));

  add("A4", pot.lambda() > 0.0, pot.lambda(),
      fmt("phi_bar = ", pot.phi_bar(), ", lambda = ", pot.lambda(), " (solver needs lambda > 0)"), false, true);

  const A5Report a5 = check_A5(k, pot);
  add("A5", a5.meets_c0 && a5.finite_stats, a5.a_star - a5.c0,
      fmt("a_* = ", a5.a_star, ", c0 = ", a5.c0, ", a^* = ", a5.a_sup, ", b^* = ", a5.b_sup));
  add("A5-curvature", a5.meets_2c0, a5.a_star - 2.0 * a5.c0,
      fmt("a_* = ", a5.a_star, " vs 2 c0 = ", 2.0 * a5.c0, " (sufficient for F'' + a_* >= c0)"), true);

  if (p.tau == 0.0) {
    const double bound = chi_bound_tau0(pot.c0());
    add("tau0-chi-bound", p.chi < bound, p.chi - bound,
        fmt("tau = 0 needs chi < min(sqrt(c0/2), 1) = ", bound, ", chi = ", p.chi));
  }
  return rep;
}

}  // namespace nlch
