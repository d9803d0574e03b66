#pragma once

#include "nlch/grid.hpp"

namespace nlch {

/// Solution snapshot (t, phi, mu, sigma).
struct State {
  double t = 0.0;
  Field phi;
  Field mu;
  Field sigma;
};

enum class Splitting {
  convex_split,        // F1_lambda and a*phi implicit; J*phi and F2_bar explicit
  implicit_potential,  // whole F_lambda implicit; J*phi explicit
};

struct SchemeConfig {
  double dt = 1e-3;
  double newton_tol = 1e-10;
  int newton_max_iter = 50;
  Splitting splitting = Splitting::convex_split;
  int max_halvings = 10;
};

}  // namespace nlch
