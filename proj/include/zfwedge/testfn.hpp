#pragma once

#include <array>
#include <map>
#include <memory>
#include <vector>

#include "zfwedge/common.hpp"
#include "zfwedge/scattering.hpp"

namespace zfw {

enum class Wedge { Left, Right };

Wedge opposite(Wedge w);
const char* wedge_name(Wedge w);

using Point2 = std::array<double, 2>;  // (t, x)

// One separable summand c * b^(dt)(s_t) * b^(dx)(s_x) of the bump profile.
struct BumpTerm {
  cplx coeff{1.0, 0.0};
  int dt = 0;
  int dx = 0;
};

struct FourierQuad {
  int nodes_t = 128;
  int nodes_x = 128;
};

// Standard bump exp(-1/(1 - s^2)) and its first two derivatives, at complex s.
cplx bump(cplx s, int derivative = 0);

// Log-scaled 1D transform: int_{-1}^{1} b^(d)(s) e^{i k s} ds = exp(exponent) * mantissa.
struct ScaledValue {
  cplx exponent;
  cplx mantissa;
  cplx value() const;
};
ScaledValue bump_transform(cplx k, int derivative, int min_nodes);

class FourierCache;

// Multi-component wedge-localized test function
//   f_a(x) = w_a * sum_terms c * b^(dt)(y_t / r_t) b^(dx)(y_x / r_x),  y = L(boost)^{-1} (x - center).
class TestFunction {
 public:
  Wedge wedge = Wedge::Left;
  Point2 center{0.0, -3.0};
  Point2 radii{1.0, 1.0};
  double boost = 0.0;
  std::vector<cplx> weights;  // index a - 1
  std::vector<double> masses;  // index a - 1
  std::vector<BumpTerm> terms{BumpTerm{}};
  FourierQuad quad;

  int count() const { return static_cast<int>(weights.size()); }
  cplx weight(int a) const { return weights.at(a - 1); }

  // f^{sign}_a(z) = (1/2pi) int d^2x f_a(x) exp(sign * i p_a(z).x)
  cplx fourier(int a, int sign, cplx z) const;
  // Same without the strip check; may overflow far outside it.
  cplx fourier_unchecked(int a, int sign, cplx z) const;
  cplx value(int a, double t, double x) const;

  bool is_real() const;
  bool in_wedge() const;
  // Imaginary-part window where f^{sign} is bounded.
  std::pair<double, double> bounded_strip(int sign) const;

  std::shared_ptr<FourierCache> cache;
};

TestFunction make_wedge_bump(const ScatteringData& s, Wedge wedge, Point2 center, Point2 radii,
                             const std::map<int, cplx>& weights, FourierQuad quad = {});
// Keeps geometry and masses, re-validates support.
TestFunction with_geometry(const TestFunction& f, Point2 center, Point2 radii, double boost);

cplx fourier(const TestFunction& f, int a, int sign, cplx z);

// (f_j)_a(x) = conj(f_{bar a}(-x)); bar a = K + 1 - a.
TestFunction act_cpt(const TestFunction& f);
// f_{(a, lambda)}(x) = f(L(lambda)^{-1}(x - a)); throws DomainError if support leaves the wedge.
TestFunction act_poincare(const TestFunction& f, Point2 a, double lambda);
// (box + mass^2) f, box = d_t^2 - d_x^2.
TestFunction klein_gordon(const TestFunction& f, double mass);
TestFunction scaled(const TestFunction& f, cplx factor);
// Keeps only the listed components.
TestFunction restricted(const TestFunction& f, const std::vector<int>& components);

// Lorentz boost acting on (t, x).
Point2 boost_point(double lambda, Point2 y);
// Minkowski product p_m(z).x with p_m(z) = m (cosh z, sinh z).
cplx momentum_dot(double m, cplx z, Point2 x);

}  // namespace zfw
