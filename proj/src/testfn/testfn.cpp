#include "zfwedge/testfn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <unordered_map>

#include "zfwedge/gauss_legendre.hpp"

namespace zfw {

namespace {

struct CacheKey {
  int a;
  int sign;
  std::uint64_t re;
  std::uint64_t im;
  bool operator==(const CacheKey& o) const { return a == o.a && sign == o.sign && re == o.re && im == o.im; }
};

struct CacheKeyHash {
  std::size_t operator()(const CacheKey& k) const {
    std::uint64_t h = k.re * 0x9E3779B97F4A7C15ull;
    h ^= k.im + 0x7F4A7C159E3779B9ull + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(k.a * 31 + k.sign + 7) * 0xC2B2AE3D27D4EB4Full;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

std::uint64_t bits(double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, sizeof u);
  return u;
}

// Bump derivatives at the nodes of an n-point rule, computed once per n.
struct NodeTable {
  const GLRule* rule = nullptr;
  std::vector<double> b[3];
};

const NodeTable& node_table(int n) {
  static std::mutex mu;
  static std::unordered_map<int, std::unique_ptr<NodeTable>> tables;
  std::lock_guard<std::mutex> lock(mu);
  auto it = tables.find(n);
  if (it != tables.end()) return *it->second;
  auto t = std::make_unique<NodeTable>();
  t->rule = &gauss_legendre(n);
  for (int d = 0; d < 3; ++d) {
    t->b[d].resize(n);
    for (int i = 0; i < n; ++i) t->b[d][i] = bump(cplx(t->rule->x[i], 0.0), d).real();
  }
  return *tables.emplace(n, std::move(t)).first->second;
}

// Bound on the mantissa integral along s(u) = u + i c (1 - u^2), which bends
// into the half plane where e^{iks} decays.
double deformed_path_bound(cplx k, int d, double s0) {
  const cplx c = 0.25 * std::conj(k) / std::abs(k);
  constexpr int kSamples = 4001;
  double peak = 0.0;
  for (int j = 0; j < kSamples; ++j) {
    const double u = std::cos(kPi * (j + 0.5) / kSamples);
    const cplx s = u + kI * c * (1.0 - u * u);
    const cplx ds = 1.0 - 2.0 * kI * c * u;
    const double v = std::abs(bump(s, d)) * std::exp(-(k * (s - s0)).imag()) * std::abs(ds);
    peak = std::max(peak, v);
  }
  return 2.0 * peak;
}

}  // namespace

class FourierCache {
 public:
  static constexpr int kShards = 32;
  static constexpr std::size_t kShardCapacity = 1 << 15;

  bool find(const CacheKey& k, cplx& out) {
    Shard& s = shard(k);
    std::lock_guard<std::mutex> lock(s.mu);
    auto it = s.map.find(k);
    if (it == s.map.end()) return false;
    out = it->second;
    return true;
  }
  void insert(const CacheKey& k, cplx v) {
    Shard& s = shard(k);
    std::lock_guard<std::mutex> lock(s.mu);
    if (s.map.size() < kShardCapacity) s.map.emplace(k, v);
  }

 private:
  struct Shard {
    std::mutex mu;
    std::unordered_map<CacheKey, cplx, CacheKeyHash> map;
  };
  Shard& shard(const CacheKey& k) { return shards_[CacheKeyHash{}(k) % kShards]; }
  Shard shards_[kShards];
};

Wedge opposite(Wedge w) { return w == Wedge::Left ? Wedge::Right : Wedge::Left; }
const char* wedge_name(Wedge w) { return w == Wedge::Left ? "left" : "right"; }

cplx bump(cplx s, int derivative) {
  if (s.imag() == 0.0 && std::fabs(s.real()) >= 1.0) return 0.0;
  const cplx u = 1.0 - s * s;
  if (u == 0.0) return 0.0;
  const cplx b = std::exp(-1.0 / u);
  if (b == 0.0) return 0.0;
  switch (derivative) {
    case 0: return b;
    case 1: return b * (-2.0 * s / (u * u));
    case 2: {
      const cplx h1 = -2.0 * s / (u * u);
      const cplx h2 = -2.0 / (u * u) - 8.0 * s * s / (u * u * u);
      return b * (h1 * h1 + h2);
    }
    default: throw std::invalid_argument("bump derivative order above 2");
  }
}

cplx ScaledValue::value() const { return mantissa == 0.0 ? cplx(0.0) : std::exp(exponent) * mantissa; }

ScaledValue bump_transform(cplx k, int derivative, int min_nodes) {
  // |e^{iks}| = e^{-s Im k} peaks at the endpoint s0; the mantissa stays bounded.
  const double s0 = k.imag() >= 0.0 ? -1.0 : 1.0;
  ScaledValue out{kI * k * s0, 0.0};
  const double mag = std::abs(k);
  if (mag > 2000.0 && deformed_path_bound(k, derivative, s0) < 1e-40) return out;

  int n = std::max(min_nodes, 8);
  while (n < 1.3 * mag + 96.0 && n < 65536) n *= 2;
  const NodeTable& t = node_table(n);
  std::vector<cplx> terms(n);
  for (int i = 0; i < n; ++i) {
    terms[i] = t.rule->w[i] * t.b[derivative][i] * std::exp(kI * k * (t.rule->x[i] - s0));
  }
  out.mantissa = pairwise_sum(terms.data(), terms.size());
  return out;
}

Point2 boost_point(double lambda, Point2 y) {
  const double ch = std::cosh(lambda), sh = std::sinh(lambda);
  return {ch * y[0] + sh * y[1], sh * y[0] + ch * y[1]};
}

cplx momentum_dot(double m, cplx z, Point2 x) { return m * (std::cosh(z) * x[0] - std::sinh(z) * x[1]); }

std::pair<double, double> TestFunction::bounded_strip(int sign) const {
  const bool upper = (wedge == Wedge::Left) == (sign > 0);
  return upper ? std::pair{0.0, kPi} : std::pair{-kPi, 0.0};
}

cplx TestFunction::fourier_unchecked(int a, int sign, cplx z) const {
  const cplx w = weight(a);
  if (w == 0.0) return 0.0;
  CacheKey key{a, sign, bits(z.real()), bits(z.imag())};
  cplx cached;
  if (cache && cache->find(key, cached)) return cached;

  const double m = masses.at(a - 1);
  const double sg = sign > 0 ? 1.0 : -1.0;
  const cplx zb = z - boost;
  const cplx kt = sg * m * std::cosh(zb) * radii[0];
  const cplx kx = -sg * m * std::sinh(zb) * radii[1];
  const cplx phase = sg * kI * momentum_dot(m, z, center);

  ScaledValue bt[3], bx[3];
  bool have_t[3] = {false, false, false}, have_x[3] = {false, false, false};
  cplx sum = 0.0;
  cplx exponent = phase;
  for (const BumpTerm& term : terms) {
    if (!have_t[term.dt]) {
      bt[term.dt] = bump_transform(kt, term.dt, quad.nodes_t);
      have_t[term.dt] = true;
    }
    if (!have_x[term.dx]) {
      bx[term.dx] = bump_transform(kx, term.dx, quad.nodes_x);
      have_x[term.dx] = true;
    }
    sum += term.coeff * bt[term.dt].mantissa * bx[term.dx].mantissa;
    exponent = phase + bt[term.dt].exponent + bx[term.dx].exponent;
  }
  cplx v = 0.0;
  if (sum != 0.0) v = w * radii[0] * radii[1] / (2 * kPi) * std::exp(exponent) * sum;
  if (cache) cache->insert(key, v);
  return v;
}

cplx TestFunction::fourier(int a, int sign, cplx z) const {
  const auto [lo, hi] = bounded_strip(sign);
  if (z.imag() < lo - 1e-9 || z.imag() > hi + 1e-9) {
    throw DomainError(std::string("Fourier transform requested outside its bounded strip at ") + format_cplx(z));
  }
  return fourier_unchecked(a, sign, z);
}

cplx fourier(const TestFunction& f, int a, int sign, cplx z) { return f.fourier(a, sign, z); }

cplx TestFunction::value(int a, double t, double x) const {
  const Point2 y = boost_point(-boost, {t - center[0], x - center[1]});
  const cplx st(y[0] / radii[0], 0.0), sx(y[1] / radii[1], 0.0);
  cplx v = 0.0;
  for (const BumpTerm& term : terms) v += term.coeff * bump(st, term.dt) * bump(sx, term.dx);
  return weight(a) * v;
}

bool TestFunction::is_real() const {
  for (const BumpTerm& t : terms) {
    if (t.coeff.imag() != 0.0) return false;
  }
  const int K = count();
  for (int a = 1; a <= K; ++a) {
    const cplx wa = weight(a), wb = weight(K + 1 - a);
    if (std::abs(wb - std::conj(wa)) > 1e-14 * (1.0 + std::abs(wa))) return false;
  }
  return true;
}

bool TestFunction::in_wedge() const {
  for (double st : {-1.0, 1.0}) {
    for (double sx : {-1.0, 1.0}) {
      const Point2 y = boost_point(boost, {st * radii[0], sx * radii[1]});
      const double t = center[0] + y[0], x = center[1] + y[1];
      const bool inside = wedge == Wedge::Left ? x < -std::fabs(t) : x > std::fabs(t);
      if (!inside) return false;
    }
  }
  return true;
}

TestFunction make_wedge_bump(const ScatteringData& s, Wedge wedge, Point2 center, Point2 radii,
                             const std::map<int, cplx>& weights, FourierQuad quad) {
  if (!(radii[0] > 0.0 && radii[1] > 0.0)) throw ConfigError("bump radii must be positive");
  TestFunction f;
  f.wedge = wedge;
  f.center = center;
  f.radii = radii;
  f.quad = quad;
  f.masses = s.masses();
  f.weights.assign(s.count(), 0.0);
  for (const auto& [a, w] : weights) {
    if (a < 1 || a > s.count()) throw ConfigError("test function weight for unknown index");
    f.weights[a - 1] = w;
  }
  if (!f.in_wedge()) throw DomainError("bump support is not inside the " + std::string(wedge_name(wedge)) + " wedge");
  f.cache = std::make_shared<FourierCache>();
  return f;
}

TestFunction with_geometry(const TestFunction& f, Point2 center, Point2 radii, double boost) {
  TestFunction g = f;
  g.center = center;
  g.radii = radii;
  g.boost = boost;
  if (!g.in_wedge()) throw DomainError("bump support is not inside the declared wedge");
  g.cache = std::make_shared<FourierCache>();
  return g;
}

TestFunction act_cpt(const TestFunction& f) {
  TestFunction g = f;
  g.wedge = opposite(f.wedge);
  g.center = {-f.center[0], -f.center[1]};
  const int K = f.count();
  for (int a = 1; a <= K; ++a) g.weights[a - 1] = std::conj(f.weight(K + 1 - a));
  // b^(d)(-s) = (-1)^d b^(d)(s)
  for (BumpTerm& t : g.terms) t.coeff = std::conj(t.coeff) * (((t.dt + t.dx) % 2 == 0) ? 1.0 : -1.0);
  g.cache = std::make_shared<FourierCache>();
  return g;
}

TestFunction act_poincare(const TestFunction& f, Point2 a, double lambda) {
  const Point2 bt = boost_point(lambda, f.center);
  return with_geometry(f, {a[0] + bt[0], a[1] + bt[1]}, f.radii, f.boost + lambda);
}

TestFunction klein_gordon(const TestFunction& f, double mass) {
  TestFunction g = f;
  g.terms.clear();
  for (const BumpTerm& t : f.terms) {
    if (t.dt > 0 || t.dx > 0) throw ConfigError("Klein-Gordon operator applies to undifferentiated bumps only");
    g.terms.push_back({t.coeff / (f.radii[0] * f.radii[0]), t.dt + 2, t.dx});
    g.terms.push_back({-t.coeff / (f.radii[1] * f.radii[1]), t.dt, t.dx + 2});
    g.terms.push_back({t.coeff * mass * mass, t.dt, t.dx});
  }
  g.cache = std::make_shared<FourierCache>();
  return g;
}

TestFunction scaled(const TestFunction& f, cplx factor) {
  TestFunction g = f;
  for (cplx& w : g.weights) w *= factor;
  g.cache = std::make_shared<FourierCache>();
  return g;
}

TestFunction restricted(const TestFunction& f, const std::vector<int>& components) {
  TestFunction g = f;
  for (int a = 1; a <= f.count(); ++a) {
    if (std::find(components.begin(), components.end(), a) == components.end()) g.weights[a - 1] = 0.0;
  }
  g.cache = std::make_shared<FourierCache>();
  return g;
}

}  // namespace zfw
