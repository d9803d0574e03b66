#include "nlch/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nlch/errors.hpp"
#include "nlch/optimize.hpp"

namespace nlch {

PotentialParams PotentialParams::make(double phi_bar, double lambda, double lambda_bar) {
  if (!(phi_bar > 0.0 && phi_bar < 1.0)) {
    std::ostringstream os;
    os << "phi_bar must lie in (0,1), got " << phi_bar;
    throw ConfigError(os.str());
  }
  if (!(lambda_bar > 0.0 && lambda_bar < 1.0)) throw ConfigError("lambda_bar must lie in (0,1)");
  if (!(lambda >= 0.0 && lambda <= lambda_bar)) {
    std::ostringstream os;
    os << "lambda must lie in [0, " << lambda_bar << "], got " << lambda;
    throw ConfigError(os.str());
  }
  PotentialParams p;
  p.phi_bar_ = phi_bar;
  p.h_ = 1.0 - phi_bar;
  p.lambda_ = lambda;
  p.lambda_bar_ = lambda_bar;
  return p;
}

PotentialParams PotentialParams::with_lambda(double lambda) const {
  return make(phi_bar_, lambda, lambda_bar_);
}

double c0_of(double h) { return 2.0 + h - 3.0 * std::cbrt(h); }

double PotentialParams::c0() const { return c0_of(h_); }

namespace {

bool in_unit(double r) { return r >= 0.0 && r < 1.0; }

void require_unit(double r, const char* what) {
  if (!in_unit(r)) {
    std::ostringstream os;
    os << what << ": argument " << r << " outside [0,1)";
    throw DomainError(os.str());
  }
}

void require_lambda(const PotentialParams& p) {
  if (!(p.lambda() > 0.0)) throw ConfigError("regularized potential requires lambda > 0");
}

double f2_poly(double r, double h) { return -r * r * r / 3.0 - h * (r * r / 2.0 + r); }
double df2_poly(double r, double h) { return -r * r - h * (r + 1.0); }
double ddf2_poly(double r, double h) { return -2.0 * r - h; }

}  // namespace

ExtendedReal eval_F1(double r, const PotentialParams& p) {
  if (!in_unit(r)) return ExtendedReal::infinity();
  return -p.h() * std::log1p(-r);
}

ExtendedReal eval_F2(double r, const PotentialParams& p) {
  if (!(r < 1.0)) return ExtendedReal::infinity();
  return f2_poly(r, p.h());
}

ExtendedReal eval_F(double r, const PotentialParams& p) {
  if (!in_unit(r)) return ExtendedReal::infinity();
  return -p.h() * std::log1p(-r) + f2_poly(r, p.h());
}

double eval_dF(double r, const PotentialParams& p) {
  require_unit(r, "F'");
  return p.h() / (1.0 - r) + df2_poly(r, p.h());
}

double eval_ddF(double r, const PotentialParams& p) {
  require_unit(r, "F''");
  const double s = 1.0 - r;
  return p.h() / (s * s) + ddf2_poly(r, p.h());
}

double eval_F1_lambda(double r, const PotentialParams& p) {
  require_lambda(p);
  const double h = p.h();
  const double l = p.lambda();
  if (r < 0.0) return -r * r * r / l + 0.5 * h * r * r + h * r;
  if (r < 1.0 - l) return -h * std::log1p(-r);
  const double s = 1.0 - r;
  return -h * std::log(l) + 1.5 * h - 2.0 * h * s / l + h * s * s / (2.0 * l * l);
}

double eval_dF1_lambda(double r, const PotentialParams& p) {
  require_lambda(p);
  const double h = p.h();
  const double l = p.lambda();
  if (r < 0.0) return -3.0 * r * r / l + h * r + h;
  if (r < 1.0 - l) return h / (1.0 - r);
  const double s = 1.0 - r;
  return 2.0 * h / l - h * s / (l * l);
}

double eval_ddF1_lambda(double r, const PotentialParams& p) {
  require_lambda(p);
  const double h = p.h();
  const double l = p.lambda();
  if (r < 0.0) return -6.0 * r / l + h;
  if (r < 1.0 - l) {
    const double s = 1.0 - r;
    return h / (s * s);
  }
  return h / (l * l);
}

double eval_F2_bar(double r, const PotentialParams& p) {
  require_lambda(p);
  const double h = p.h();
  if (r < 1.0) return f2_poly(r, h);
  const double d = r - 1.0;
  return -1.0 / 3.0 - 1.5 * h + (-1.0 - 2.0 * h) * d + 0.5 * (-2.0 - h) * d * d;
}

double eval_dF2_bar(double r, const PotentialParams& p) {
  require_lambda(p);
  const double h = p.h();
  if (r < 1.0) return df2_poly(r, h);
  return (-1.0 - 2.0 * h) + (-2.0 - h) * (r - 1.0);
}

double eval_ddF2_bar(double r, const PotentialParams& p) {
  require_lambda(p);
  const double h = p.h();
  if (r < 1.0) return ddf2_poly(r, h);
  return -2.0 - h;
}

double eval_F_lambda(double r, const PotentialParams& p) {
  return eval_F1_lambda(r, p) + eval_F2_bar(r, p);
}
double eval_dF_lambda(double r, const PotentialParams& p) {
  return eval_dF1_lambda(r, p) + eval_dF2_bar(r, p);
}
double eval_ddF_lambda(double r, const PotentialParams& p) {
  return eval_ddF1_lambda(r, p) + eval_ddF2_bar(r, p);
}

double JunctionReport::max() const { return std::max({at_zero, at_one_minus_lambda, at_one}); }

JunctionReport check_junctions(const PotentialParams& p) {
  require_lambda(p);
  const double h = p.h();
  const double l = p.lambda();
  JunctionReport rep;

  // r = 0: cubic branch against the logarithmic branch.
  {
    const double r = 0.0;
    const double left_v = -r * r * r / l + 0.5 * h * r * r + h * r;
    const double left_d = -3.0 * r * r / l + h * r + h;
    const double left_dd = -6.0 * r / l + h;
    const double right_v = -h * std::log1p(-r);
    const double right_d = h / (1.0 - r);
    const double right_dd = h / ((1.0 - r) * (1.0 - r));
    rep.at_zero = std::max({std::abs(left_v - right_v), std::abs(left_d - right_d),
                            std::abs(left_dd - right_dd)});
  }
  // r = 1 - lambda: logarithmic branch against the quadratic continuation.
  {
    const double r = 1.0 - l;
    const double s = 1.0 - r;
    const double left_v = -h * std::log(s);
    const double left_d = h / s;
    const double right_v = -h * std::log(l) + 1.5 * h - 2.0 * h * s / l + h * s * s / (2.0 * l * l);
    const double right_d = 2.0 * h / l - h * s / (l * l);
    // Relative to the slope scale h/lambda so that tiny lambda does not
    // inflate the rounding of 1 - (1 - lambda).
    const double scale = std::max(1.0, h / l);
    rep.at_one_minus_lambda =
        std::max(std::abs(left_v - right_v), std::abs(left_d - right_d) / scale);
  }
  // r = 1: F2 polynomial against its quadratic continuation.
  {
    const double r = 1.0;
    const double d = r - 1.0;
    const double cont_v = -1.0 / 3.0 - 1.5 * h + (-1.0 - 2.0 * h) * d + 0.5 * (-2.0 - h) * d * d;
    const double cont_d = (-1.0 - 2.0 * h) + (-2.0 - h) * d;
    const double cont_dd = -2.0 - h;
    rep.at_one = std::max({std::abs(f2_poly(r, h) - cont_v), std::abs(df2_poly(r, h) - cont_d),
                           std::abs(ddf2_poly(r, h) - cont_dd)});
  }
  return rep;
}

BoundReport verify_growth_bound(const PotentialParams& p, double eps, const SamplingPlan& plan) {
  if (!(eps > 0.0 && eps < 0.5)) throw PreconditionError("growth bound requires eps in (0, 1/2)");
  require_lambda(p);
  BoundReport rep;
  rep.r_bar = std::max(p.phi_bar(), 1.0 - eps / 2.0);
  if (!(p.lambda() < 1.0 - rep.r_bar)) {
    throw PreconditionError("growth bound requires lambda < 1 - r_bar so that F_lambda = F on [0, r_bar]");
  }
  rep.C1 = 2.0 / eps;

  // C2 = max |F'| on [0, r_bar]. F' vanishes at 0 and phi_bar, dips in
  // between and increases past phi_bar.
  const auto dip = golden_section_minimize([&](double r) { return eval_dF(r, p); }, 0.0, p.phi_bar());
  rep.C2 = std::max(std::abs(dip.value), std::abs(eval_dF(rep.r_bar, p)));

  const int nr = std::max(plan.r_samples, 2);
  const int n0 = std::max(plan.r0_samples, 2);
  rep.worst_slack = std::numeric_limits<double>::infinity();
  for (int i = 0; i < nr; ++i) {
    const double r = -plan.radius + 2.0 * plan.radius * i / (nr - 1);
    const double d = eval_dF_lambda(r, p);
    for (int j = 0; j < n0; ++j) {
      const double r0 = eps + (1.0 - 2.0 * eps) * j / (n0 - 1);
      const double slack = rep.C1 * d * (r - r0) + rep.C2 - std::abs(d);
      rep.worst_slack = std::min(rep.worst_slack, slack);
      if (slack < 0.0) ++rep.violations;
      ++rep.samples;
    }
  }
  return rep;
}

CurvatureMinimum curvature_minimum(const PotentialParams& p) {
  const auto res = golden_section_minimize([&](double r) { return eval_ddF(r, p); }, 0.0, 1.0 - 1e-6, 1e-12);
  return {res.argmin, res.value};
}

double minorant_slope_limit(const PotentialParams& p) {
  require_lambda(p);
  const double l = p.lambda();
  // Leading r^2 coefficient of F_lambda for r >= 1.
  return p.h() / (2.0 * l * l) - (2.0 + p.h()) / 2.0;
}

double minorant_offset(const PotentialParams& p, double q) {
  if (!(q < minorant_slope_limit(p))) throw PreconditionError("quadratic minorant slope too large");
  const auto g = [&](double r) { return eval_F_lambda(r, p) - q * r * r; };

  // Left of r = 1 the minimum lies in a bounded window: the cubic branch
  // dominates any quadratic for r -> -inf. Scan, then refine.
  const double left = -2.0 - 4.0 * std::sqrt(std::max(q, 0.0) * p.lambda());
  const int n = 20000;
  double best_r = left;
  double best = g(left);
  for (int i = 1; i <= n; ++i) {
    const double r = left + (1.0 - left) * i / n;
    const double v = g(r);
    if (v < best) {
      best = v;
      best_r = r;
    }
  }
  const double step = (1.0 - left) / n;
  const auto refined = golden_section_minimize(g, std::max(left, best_r - step), std::min(1.0, best_r + step), 1e-13);
  best = std::min(best, refined.value);

  // On [1, inf) g is an exact quadratic with positive leading coefficient.
  const double A = minorant_slope_limit(p) - q;
  const double B1 = eval_dF_lambda(1.0, p) - 2.0 * q;  // slope at r = 1
  const double r_star = 1.0 + std::max(0.0, -B1 / (2.0 * A));
  best = std::min(best, g(r_star));
  return std::max(0.0, -best);
}

QuadraticMinorant quadratic_minorant(const PotentialParams& p, double a_star, double a_sup) {
  const double base = 0.5 * (a_sup - a_star);
  const double limit = minorant_slope_limit(p);
  if (!(base < limit)) throw PreconditionError("lambda too large for a quadratic minorant with these kernel statistics");
  QuadraticMinorant m;
  m.eps_hat = std::min(1.0, 0.5 * (limit - base));
  m.q = base + m.eps_hat;
  m.c2 = minorant_offset(p, m.q);
  return m;
}

}  // namespace nlch
