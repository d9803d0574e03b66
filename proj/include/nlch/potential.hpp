#pragma once

#include "nlch/extended_real.hpp"

namespace nlch {

/// Parameters of the single-well Lennard-Jones potential
///
///   F(r) = -h log(1-r) - r^3/3 - h (r^2/2 + r)   on [0,1),  +inf otherwise,
///
/// with h = 1 - phi_bar and F'(phi_bar) = 0, together with the regularization
/// parameter lambda (0 means unregularized).
class PotentialParams {
 public:
  /// Throws ConfigError unless 0 < phi_bar < 1, 0 < lambda_bar < 1 and
  /// 0 <= lambda <= lambda_bar.
  static PotentialParams make(double phi_bar, double lambda = 0.0, double lambda_bar = 0.5);

  double phi_bar() const { return phi_bar_; }
  double h() const { return h_; }
  double lambda() const { return lambda_; }
  double lambda_bar() const { return lambda_bar_; }
  /// c0 = 2 + h - 3 h^(1/3); equals minus the minimum of F'' on [0,1).
  double c0() const;

  PotentialParams with_lambda(double lambda) const;

 private:
  PotentialParams() = default;
  double phi_bar_ = 0.6;
  double h_ = 0.4;
  double lambda_ = 0.0;
  double lambda_bar_ = 0.5;
};

double c0_of(double h);

// Unregularized potential and its convex/non-convex split F = F1 + F2.
ExtendedReal eval_F(double r, const PotentialParams& p);
ExtendedReal eval_F1(double r, const PotentialParams& p);
ExtendedReal eval_F2(double r, const PotentialParams& p);
/// F'(r); throws DomainError outside [0,1).
double eval_dF(double r, const PotentialParams& p);
/// F''(r); throws DomainError outside [0,1).
double eval_ddF(double r, const PotentialParams& p);

// Regularized potential F_lambda = F1_lambda + F2_bar. Every function below
// throws ConfigError when p.lambda() <= 0.
//
// F1_lambda: cubic-quadratic for r < 0, exact F1 on [0, 1-lambda),
// quadratic continuation beyond. Convex and C^2 on the real line.
// F2_bar: F2 for r < 1 and its C^2 quadratic continuation for r >= 1.
double eval_F1_lambda(double r, const PotentialParams& p);
double eval_dF1_lambda(double r, const PotentialParams& p);
double eval_ddF1_lambda(double r, const PotentialParams& p);
double eval_F2_bar(double r, const PotentialParams& p);
double eval_dF2_bar(double r, const PotentialParams& p);
double eval_ddF2_bar(double r, const PotentialParams& p);
double eval_F_lambda(double r, const PotentialParams& p);
double eval_dF_lambda(double r, const PotentialParams& p);
double eval_ddF_lambda(double r, const PotentialParams& p);

/// Largest absolute mismatch between the branch formulas at each junction.
struct JunctionReport {
  double at_zero = 0.0;              // F1_lambda: value, slope (and curvature)
  double at_one_minus_lambda = 0.0;  // F1_lambda: value, slope (and curvature)
  double at_one = 0.0;               // F2_bar: value, slope, curvature
  double max() const;
};

JunctionReport check_junctions(const PotentialParams& p);

struct SamplingPlan {
  double radius = 3.0;   // r sampled uniformly in [-radius, radius]
  int r_samples = 100;
  int r0_samples = 100;  // r0 sampled uniformly in [eps, 1-eps]
};

/// Outcome of checking |F'_l(r)| <= C1 F'_l(r)(r - r0) + C2 on a sample.
struct BoundReport {
  double C1 = 0.0;  // 2/eps
  double C2 = 0.0;  // max |F'| on [0, r_bar]
  double r_bar = 0.0;
  double worst_slack = 0.0;  // min over samples of rhs - lhs
  long violations = 0;
  long samples = 0;
};

/// Throws PreconditionError unless eps in (0, 1/2) and lambda is small enough
/// that F_lambda coincides with F on [0, r_bar].
BoundReport verify_growth_bound(const PotentialParams& p, double eps, const SamplingPlan& plan);

/// Minimum of F'' on [0,1) located by golden-section search (F'' is convex there).
struct CurvatureMinimum {
  double argmin = 0.0;
  double value = 0.0;
};
CurvatureMinimum curvature_minimum(const PotentialParams& p);

/// Constants of a quadratic minorant F_lambda(r) >= q r^2 - c2.
struct QuadraticMinorant {
  double eps_hat = 0.0;
  double q = 0.0;
  double c2 = 0.0;
};

/// Supremum of admissible q: F_lambda(r) - q r^2 is bounded below iff q < this.
double minorant_slope_limit(const PotentialParams& p);

/// c2 = max(0, -inf_r (F_lambda(r) - q r^2)) by 1-D minimization.
/// Throws PreconditionError if q >= minorant_slope_limit(p).
double minorant_offset(const PotentialParams& p, double q);

/// Picks eps_hat > 0 so that q = (a_sup - a_star)/2 + eps_hat is admissible
/// and computes the matching c2.
QuadraticMinorant quadratic_minorant(const PotentialParams& p, double a_star, double a_sup);

}  // namespace nlch
