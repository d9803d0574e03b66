#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlch/grid.hpp"
#include "nlch/kernel.hpp"
#include "nlch/potential.hpp"

namespace nlch {

enum class SourceFamily { zero, constant, saturating };

SourceFamily parse_source_family(const std::string& name);
std::string to_string(SourceFamily f);

/// Built-in bounded source functions with closed-form bounds.
///  - zero:       0
///  - constant:   value
///  - saturating: value * x_+ / (1 + x_+), with x = phi * sigma for h1 and
///                x = phi for h2. Ranges over [0, value).
struct SourceSpec {
  SourceFamily family = SourceFamily::zero;
  double value = 0.0;

  double h1(double phi, double sigma) const;
  double h2(double phi) const;
  /// sup over the whole plane (or line).
  double sup() const;
  double inf() const;
  /// Lipschitz constant on [-radius, radius]^2 (per argument).
  double lipschitz(double radius) const;
};

struct ModelParams {
  double tau = 0.5;
  double chi = 0.2;
  double B = 1.0;
  double C = 1.0;
  double m = 1.0;
  SourceSpec h1{SourceFamily::saturating, 0.5};
  SourceSpec h2{SourceFamily::saturating, 1.0};
  double sigma_S = 1.0;                // used when sigma_S_field is empty
  std::optional<Field> sigma_S_field;  // time-independent supply
  bool strict_mode = true;

  double K() const { return h1.sup(); }
};

/// S(phi, sigma) = -m phi + h1(phi, sigma), pointwise.
Field eval_S(const Field& phi, const Field& sigma, const ModelParams& p);
Field eval_h2(const Field& phi, const ModelParams& p);
Field supply_field(const ModelParams& p, const Grid& grid);

/// min{sqrt(c0/2), 1}: the chi threshold for the tau = 0 problem.
double chi_bound_tau0(double c0);

struct Check {
  std::string name;
  bool passed = true;
  double quantity = 0.0;   // offending quantity (e.g. K - m)
  std::string detail;
  bool advisory = false;   // reported only, never fatal
  bool structural = false; // fatal in lab mode too
};

struct ValidationReport {
  bool strict = true;
  std::vector<Check> checks;

  /// False if a fatal check failed: in strict mode any non-advisory check,
  /// in lab mode only structural ones.
  bool ok() const;
  std::vector<const Check*> failures() const;
};

ValidationReport validate(const ModelParams& p, const DiscreteKernel& k, const PotentialParams& pot);

}  // namespace nlch
