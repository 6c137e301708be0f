#pragma once

#include <vector>

namespace zfw {

struct GLRule {
  std::vector<double> x;
  std::vector<double> w;
};

// n-point Gauss-Legendre rule on [-1, 1]. Rules are computed once and cached.
const GLRule& gauss_legendre(int n);

struct Axis {
  double lo = -1.0;
  double hi = 1.0;
  int nodes = 64;
};

// Nodes and weights of the rule mapped to [axis.lo, axis.hi].
void mapped_rule(const Axis& axis, std::vector<double>& x, std::vector<double>& w);

}  // namespace zfw
