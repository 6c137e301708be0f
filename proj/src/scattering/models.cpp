#include <cmath>
#include <string>

#include "zfwedge/scattering.hpp"

namespace zfw {

std::string family_name(Family f) {
  switch (f) {
    case Family::ZN: return "zn";
    case Family::CDD: return "cdd";
    case Family::Toda: return "toda";
  }
  return "zn";
}

Family parse_family(const std::string& s) {
  if (s == "zn") return Family::ZN;
  if (s == "cdd") return Family::CDD;
  if (s == "toda") return Family::Toda;
  throw ConfigError("unknown model family '" + s + "'");
}

MeromorphicExpr zn_base_factor(int N) {
  const double x = 2 * kPi / N;
  return MeromorphicExpr::block(cplx(0.0, -x), cplx(0.0, x));
}

namespace {

// Zero positions of the Blaschke product in units of i*pi/N.
std::vector<cplx> blaschke_zero_params(const BlaschkeSpec& spec) {
  const cplx B = spec.B;
  const cplx Bc = std::conj(B);
  const double twok = 2.0 * spec.k;
  switch (spec.kind) {
    case 1: return {B, Bc, twok - B, twok - Bc};
    case 2: return {B, Bc};
    case 3: return {B, twok - B};
    default: throw ConfigError("Blaschke kind must be 1, 2 or 3");
  }
}

}  // namespace

void validate_blaschke(int N, const BlaschkeSpec& spec) {
  const double re = spec.B.real();
  if (spec.k < 1 || spec.k > N - 1) throw ConfigError("Blaschke k must lie in 1..N-1");
  switch (spec.kind) {
    case 1:
      if (!(spec.k - 1 < re && re < spec.k)) throw ConfigError("kind 1 needs k-1 < Re B < k");
      break;
    case 2:
      if (std::fabs(re - spec.k) > 1e-12) throw ConfigError("kind 2 needs Re B = k");
      break;
    case 3:
      if (spec.k % 2 == 0) throw ConfigError("kind 3 needs odd k");
      if (std::fabs(spec.B.imag()) > 0.0) throw ConfigError("kind 3 needs real B");
      if (!(spec.k - 1 < re && re <= spec.k)) throw ConfigError("kind 3 needs k-1 < B <= k");
      break;
    default:
      throw ConfigError("Blaschke kind must be 1, 2 or 3");
  }
  for (cplx w : blaschke_zero_params(spec)) {
    const double half = w.real() / 2.0;
    if (std::fabs(w.imag()) < 1e-12 && std::fabs(half - std::round(half)) < 1e-12) {
      throw ConfigError("Blaschke zero at 2*pi*k*i/N is not allowed");
    }
  }
}

MeromorphicExpr blaschke_factor(int N, const BlaschkeSpec& spec) {
  MeromorphicExpr e;
  for (cplx w : blaschke_zero_params(spec)) {
    const cplx a = kI * kPi * w / static_cast<double>(N);
    e *= MeromorphicExpr::block(a, -a);
  }
  return e;
}

ScatteringData assemble(int N, double m1, Family family, const MeromorphicExpr& base) {
  ScatteringData s;
  s.N = N;
  s.m1 = m1;
  s.family = family;
  s.elementary = 1;
  s.theta0 = kPi / N;
  s.base_ = base;
  const int K = N - 1;

  for (int a = 1; a <= K; ++a) s.masses_.push_back(m1 * std::sin(a * kPi / N) / std::sin(kPi / N));

  for (int a = 1; a <= K; ++a) {
    for (int b = 1; b <= K; ++b) {
      if (a + b == N) continue;
      FusionProcess f;
      f.left = a;
      f.right = b;
      if (a + b < N) {
        f.result = a + b;
        f.angle_left = b * kPi / N;
        f.angle_right = a * kPi / N;
      } else {
        f.result = a + b - N;
        f.angle_left = (N - b) * kPi / N;
        f.angle_right = (N - a) * kPi / N;
      }
      s.fusions_.push_back(f);
    }
  }

  // S^{kl}(z) = prod over m in steps(l), n in steps(k) of S^{11}(z + i pi (m + n)/N)
  s.components_.resize(static_cast<std::size_t>(K) * K);
  for (int k = 1; k <= K; ++k) {
    for (int l = 1; l <= K; ++l) {
      MeromorphicExpr e;
      for (int m = -(l - 1); m <= l - 1; m += 2) {
        for (int n = -(k - 1); n <= k - 1; n += 2) {
          e *= base.shifted(cplx(0.0, kPi * (m + n) / N));
        }
      }
      s.components_[(k - 1) * K + (l - 1)] = e;
    }
  }
  return s;
}

const FusionProcess* ScatteringData::fusion(int a, int b) const {
  for (const auto& f : fusions_) {
    if (f.left == a && f.right == b) return &f;
  }
  return nullptr;
}

const MeromorphicExpr& ScatteringData::component(int a, int b) const {
  const int K = count();
  if (a < 1 || a > K || b < 1 || b > K) throw ConfigError("particle index out of range");
  return components_[(a - 1) * K + (b - 1)];
}

cplx ScatteringData::fusion_residue(int a, int b, int c) const {
  const FusionProcess* f = fusion(a, b);
  if (f == nullptr || f->result != c) return 0.0;
  const cplx p(0.0, f->angle());
  const MeromorphicExpr& e = component(a, b);
  if (e.pole_order(p) == 0) return 0.0;
  return e.residue(p).value;
}

ScatteringData build_zn(int N, double m1) {
  return build_cdd(N, m1, {});
}

ScatteringData build_cdd(int N, double m1, const std::vector<BlaschkeSpec>& specs) {
  if (N < 3) throw ConfigError("N must be at least 3");
  if (!(m1 > 0.0)) throw ConfigError("m1 must be positive");
  MeromorphicExpr base = zn_base_factor(N);
  for (const auto& spec : specs) {
    validate_blaschke(N, spec);
    base *= blaschke_factor(N, spec);
  }
  ScatteringData s = assemble(N, m1, specs.empty() ? Family::ZN : Family::CDD, base);
  s.specs = specs;
  return s;
}

ScatteringData build_toda(int N, double m1, double B) {
  if (N < 3) throw ConfigError("N must be at least 3");
  if (!(m1 > 0.0)) throw ConfigError("m1 must be positive");
  if (!(B >= 0.0 && B <= 1.0)) throw ConfigError("Toda coupling B must lie in [0, 1]");
  // B = 0 puts a zero at the origin, outside the kind 3 range; the factor is taken as written.
  const BlaschkeSpec spec{3, 1, cplx(B, 0.0)};
  ScatteringData s = assemble(N, m1, Family::Toda, zn_base_factor(N) * blaschke_factor(N, spec));
  s.specs = {spec};
  s.toda_B = B;
  return s;
}

cplx eval_component(const ScatteringData& s, int a, int b, cplx z) {
  return s.component(a, b)(z);
}

Residue residue_at(const ScatteringData& s, int a, int b, cplx pole_location) {
  const ResidueValue r = s.component(a, b).residue(pole_location);
  return Residue{r.location, r.order, r.value, r.circle_value, r.consistent};
}

std::vector<int> elementary_chain(const ScatteringData& s) {
  std::vector<int> chain{s.elementary};
  for (;;) {
    const FusionProcess* f = s.fusion(chain.back(), s.elementary);
    if (f == nullptr) break;
    bool seen = false;
    for (int c : chain) seen = seen || c == f->result;
    if (seen) break;
    chain.push_back(f->result);
  }
  return chain;
}

}  // namespace zfw
