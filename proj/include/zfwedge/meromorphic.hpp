#pragma once

#include <vector>

#include "zfwedge/common.hpp"

namespace zfw {

// Pole or zero of a sinh-ratio product, offsets taken modulo 2*pi*i.
struct PoleEntry {
  cplx location;
  int order = 1;
};

struct ResidueValue {
  cplx location;
  int order = 1;
  cplx value;          // from factor extraction (simple poles) or the circle rule
  cplx circle_value;   // 64-point trapezoid on |z - p| = 1e-3
  bool consistent = true;
};

class NotAPole : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// c * prod_j sinh((z - a_j)/2) / sinh((z - b_j)/2). Offsets are reduced to
// Im in (-pi, pi] and matched zero/pole pairs are cancelled, so two equal
// functions built along different routes end up with the same structure.
class MeromorphicExpr {
 public:
  MeromorphicExpr() = default;

  static MeromorphicExpr constant(cplx c);
  static MeromorphicExpr block(cplx zero, cplx pole);

  MeromorphicExpr operator*(const MeromorphicExpr& other) const;
  MeromorphicExpr& operator*=(const MeromorphicExpr& other);
  MeromorphicExpr inverse() const;
  // g(z) = f(z + s)
  MeromorphicExpr shifted(cplx s) const;

  cplx operator()(cplx z) const;
  // Evaluates without the pole guard; returns inf near poles.
  cplx eval_unguarded(cplx z) const;

  const std::vector<cplx>& zeros() const { return zeros_; }
  const std::vector<cplx>& poles() const { return poles_; }
  cplx prefactor() const { return constant_; }
  bool is_constant() const { return poles_.empty(); }

  // Poles with lo < Im p < hi (all 2*pi*i translates), with multiplicity.
  std::vector<PoleEntry> poles_in_strip(double lo, double hi) const;
  std::vector<PoleEntry> zeros_in_strip(double lo, double hi) const;
  int pole_order(cplx p) const;
  ResidueValue residue(cplx p) const;

  static constexpr double kGuard = 1e-9;
  static constexpr double kCancel = 1e-12;

 private:
  void canonicalize();

  cplx constant_{1.0, 0.0};
  std::vector<cplx> zeros_;
  std::vector<cplx> poles_;
};

// Reduces an offset to Im in (-pi, pi]; returns the number of 2*pi*i steps removed.
int reduce_offset(cplx& a);

}  // namespace zfw
