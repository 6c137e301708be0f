#include "zfwedge/wavefn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <mutex>
#include <random>
#include <unordered_map>

namespace zfw {

namespace {

class FnKernel : public Kernel {
 public:
  explicit FnKernel(KernelFn fn) : fn_(std::move(fn)) {}
  cplx eval(const int* idx, const cplx* z) const override { return fn_(idx, z); }

 private:
  KernelFn fn_;
};

constexpr int kMaxArity = 8;

void require_arity(int n) {
  if (n < 0 || n > kMaxArity) throw ConfigError("particle number " + std::to_string(n) + " not supported");
}

struct MemoKey {
  int n;
  std::array<int, kMaxArity> idx{};
  std::array<std::uint64_t, 2 * kMaxArity> z{};
  bool operator==(const MemoKey& o) const { return n == o.n && idx == o.idx && z == o.z; }
};

struct MemoHash {
  std::size_t operator()(const MemoKey& k) const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](std::uint64_t v) {
      h ^= v;
      h *= 1099511628211ull;
      h ^= h >> 31;
    };
    for (int i = 0; i < k.n; ++i) {
      mix(static_cast<std::uint64_t>(k.idx[i]));
      mix(k.z[2 * i]);
      mix(k.z[2 * i + 1]);
    }
    return static_cast<std::size_t>(h);
  }
};

std::uint64_t bits(double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, sizeof u);
  return u;
}

class MemoKernel : public Kernel {
 public:
  MemoKernel(KernelPtr inner, int n) : inner_(std::move(inner)), n_(n) {}

  cplx eval(const int* idx, const cplx* z) const override {
    MemoKey key{n_};
    for (int i = 0; i < n_; ++i) {
      key.idx[i] = idx[i];
      key.z[2 * i] = bits(z[i].real());
      key.z[2 * i + 1] = bits(z[i].imag());
    }
    const std::size_t h = MemoHash{}(key);
    Shard& sh = shards_[h % kShards];
    {
      std::lock_guard<std::mutex> lock(sh.mu);
      auto it = sh.map.find(key);
      if (it != sh.map.end()) return it->second;
    }
    const cplx v = inner_->eval(idx, z);
    std::lock_guard<std::mutex> lock(sh.mu);
    if (sh.map.size() < kShardCapacity) sh.map.emplace(key, v);
    return v;
  }

 private:
  static constexpr std::size_t kShards = 64;
  // keeps the table near 200 MB; later points are evaluated without caching
  static constexpr std::size_t kShardCapacity = 1 << 14;
  struct Shard {
    std::mutex mu;
    std::unordered_map<MemoKey, cplx, MemoHash> map;
  };
  KernelPtr inner_;
  int n_;
  mutable std::array<Shard, kShards> shards_;
};

// Applies D(tau_{w_0}) D(tau_{w_1}) ... to w at (idx, z): each letter contributes
// its S factor at the current arguments and then swaps them.
cplx eval_word(const WaveFunction& w, const std::vector<int>& word, const int* idx, const cplx* z) {
  std::array<int, kMaxArity> a;
  std::array<cplx, kMaxArity> t;
  std::copy(idx, idx + w.n, a.begin());
  std::copy(z, z + w.n, t.begin());
  cplx factor = 1.0;
  const ScatteringData& s = *w.model;
  for (int k : word) {
    factor *= s.S(a[k - 1], a[k], t[k] - t[k - 1]);
    std::swap(a[k - 1], a[k]);
    std::swap(t[k - 1], t[k]);
  }
  return factor * w.eval(a.data(), t.data());
}

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Model share(const ScatteringData& s) { return std::make_shared<const ScatteringData>(s); }

KernelPtr make_kernel(KernelFn fn) { return std::make_shared<FnKernel>(std::move(fn)); }

Extent Extent::merged(const Extent& o) const {
  Extent e;
  e.lo = std::min(lo, o.lo);
  e.hi = std::max(hi, o.hi);
  e.width = std::max(width, o.width);
  e.fine = fine || o.fine;
  if (fine && o.fine) {
    e.fine_lo = std::min(fine_lo, o.fine_lo);
    e.fine_hi = std::max(fine_hi, o.fine_hi);
  } else if (fine) {
    e.fine_lo = fine_lo;
    e.fine_hi = fine_hi;
  } else if (o.fine) {
    e.fine_lo = o.fine_lo;
    e.fine_hi = o.fine_hi;
  }
  return e;
}

Extent Extent::shifted(double s) const {
  Extent e = *this;
  e.lo += s;
  e.hi += s;
  e.fine_lo += s;
  e.fine_hi += s;
  return e;
}

std::pair<double, double> Extent::window(double L_widths) const {
  double a = lo - L_widths * width, b = hi + L_widths * width;
  if (fine) {
    a = std::min(a, fine_lo);
    b = std::max(b, fine_hi);
  }
  return {a, b};
}

Extent fine_extent(double lo, double hi) {
  Extent e;
  e.lo = e.hi = 0.5 * (lo + hi);
  e.width = 0.0;
  e.fine = true;
  e.fine_lo = lo;
  e.fine_hi = hi;
  return e;
}

cplx WaveFunction::operator()(const std::vector<int>& idx, const std::vector<cplx>& z) const {
  if (static_cast<int>(idx.size()) != n || static_cast<int>(z.size()) != n)
    throw ConfigError("argument length does not match particle number");
  for (int a : idx) {
    if (a < 1 || a > species()) throw ConfigError("component index out of range");
  }
  return eval(idx.data(), z.data());
}

WaveFunction vacuum_wave(Model m) {
  WaveFunction w;
  w.n = 0;
  w.model = std::move(m);
  w.kernel = make_kernel([](const int*, const cplx*) { return cplx(1.0, 0.0); });
  w.band = kPi;
  w.zero_flag = true;
  w.symmetric = true;
  return w;
}

WaveFunction gaussian_product(Model m, const std::vector<GaussianSlot>& slots) {
  const int n = static_cast<int>(slots.size());
  require_arity(n);
  if (n == 0) return vacuum_wave(std::move(m));
  std::vector<std::vector<cplx>> weights(n, std::vector<cplx>(m->count(), 0.0));
  Extent ext{slots[0].center, slots[0].center, slots[0].width};
  for (int i = 0; i < n; ++i) {
    const GaussianSlot& g = slots[i];
    if (!(g.width > 0)) throw ConfigError("gaussian width must be positive");
    for (const auto& [a, c] : g.weights) {
      if (a < 1 || a > m->count()) throw ConfigError("gaussian weight for unknown component");
      weights[i][a - 1] = c;
    }
    ext = ext.merged(Extent{g.center, g.center, g.width});
  }
  WaveFunction w;
  w.n = n;
  w.model = std::move(m);
  w.kernel = make_kernel([slots, weights, n](const int* idx, const cplx* z) {
    cplx v = 1.0;
    for (int i = 0; i < n; ++i) {
      const cplx c = weights[i][idx[i] - 1];
      if (c == 0.0) return cplx(0.0);
      const cplx d = (z[i] - slots[i].center) / slots[i].width;
      v *= c * std::exp(-d * d);
    }
    return v;
  });
  w.band = kPi;
  w.extent = ext;
  return w;
}

WaveFunction with_kernel(const WaveFunction& base, KernelPtr kernel) {
  WaveFunction w = base;
  w.kernel = std::move(kernel);
  w.d0.reset();
  return w;
}

WaveFunction scaled(const WaveFunction& w, cplx c) {
  const KernelPtr k = w.kernel;
  return with_kernel(w, make_kernel([k, c](const int* idx, const cplx* z) { return c * k->eval(idx, z); }));
}

WaveFunction memoized(const WaveFunction& w) {
  WaveFunction out = w;
  out.kernel = std::make_shared<MemoKernel>(w.kernel, w.n);
  return out;
}

WaveFunction tensor_product(const WaveFunction& a, const WaveFunction& b) {
  require_arity(a.n + b.n);
  WaveFunction out = with_kernel(a, nullptr);
  out.n = a.n + b.n;
  out.band = std::min(a.band, b.band);
  out.zero_flag = false;
  out.symmetric = a.n + b.n <= 1;
  out.extent = a.extent.merged(b.extent);
  const WaveFunction left = a, right = b;
  out.kernel = make_kernel([left, right](const int* idx, const cplx* z) {
    const cplx u = left.eval(idx, z);
    if (u == 0.0) return cplx(0.0);
    return u * right.eval(idx + left.n, z + left.n);
  });
  return out;
}

WaveFunction apply_transposition(const WaveFunction& w, int k) { return apply_word(w, {k}); }

WaveFunction apply_word(const WaveFunction& w, const std::vector<int>& word) {
  for (int k : word) {
    if (k < 1 || k >= w.n) throw ConfigError("transposition index out of range");
  }
  WaveFunction out = with_kernel(w, nullptr);
  const WaveFunction inner = w;
  out.kernel = make_kernel([inner, word](const int* idx, const cplx* z) { return eval_word(inner, word, idx, z); });
  return out;
}

const std::vector<std::vector<int>>& permutation_words(int n) {
  require_arity(n);
  static std::mutex mu;
  static std::map<int, std::vector<std::vector<int>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  // Breadth-first search over the Cayley graph gives a reduced word for every permutation.
  std::vector<int> id(n);
  for (int i = 0; i < n; ++i) id[i] = i;
  std::map<std::vector<int>, std::vector<int>> seen{{id, {}}};
  std::vector<std::vector<int>> frontier{id}, words{{}};
  while (!frontier.empty()) {
    std::vector<std::vector<int>> next;
    for (const auto& p : frontier) {
      for (int k = 1; k < n; ++k) {
        std::vector<int> q = p;
        std::swap(q[k - 1], q[k]);
        if (seen.count(q)) continue;
        std::vector<int> word = seen[p];
        word.push_back(k);
        seen[q] = word;
        words.push_back(word);
        next.push_back(q);
      }
    }
    frontier = std::move(next);
  }
  return cache.emplace(n, std::move(words)).first->second;
}

std::vector<int> cyclic_word(int k) {
  std::vector<int> w;
  for (int j = k - 1; j >= 1; --j) w.push_back(j);
  return w;
}

std::vector<int> cyclic_word_prime(int n, int k) {
  std::vector<int> w;
  for (int j = n - k + 1; j <= n - 1; ++j) w.push_back(j);
  return w;
}

WaveFunction symmetrize(const WaveFunction& base, int n_max) {
  if (base.n > n_max)
    throw ConfigError("symmetrization of " + std::to_string(base.n) + " particles exceeds the limit " +
                      std::to_string(n_max));
  WaveFunction out = with_kernel(base, nullptr);
  out.symmetric = true;
  if (base.n <= 1) {
    out.kernel = base.kernel;
    return out;
  }
  const auto& words = permutation_words(base.n);
  const double inv = 1.0 / static_cast<double>(words.size());
  const WaveFunction inner = base;
  out.kernel = make_kernel([inner, &words, inv](const int* idx, const cplx* z) {
    std::vector<cplx> terms;
    terms.reserve(words.size());
    for (const auto& word : words) terms.push_back(eval_word(inner, word, idx, z));
    return inv * pairwise_sum(terms.data(), terms.size());
  });
  return out;
}

std::vector<cplx> strip_pole_inventory(const ScatteringData& s) {
  std::vector<cplx> out;
  const int K = s.count();
  for (int a = 1; a <= K; ++a) {
    for (int b = 1; b <= K; ++b) {
      const MeromorphicExpr& c = s.component(a, b);
      for (const auto& list : {c.poles_in_strip(0.0, kPi), c.zeros_in_strip(0.0, kPi)}) {
        for (const PoleEntry& p : list) {
          // open strip only
          if (p.location.imag() <= 1e-12 || p.location.imag() >= kPi - 1e-12) continue;
          for (int r = 0; r < p.order; ++r) out.push_back(-kI * p.location);
        }
      }
    }
  }
  return out;
}

cplx CnFactor::pair(cplx d) const {
  cplx v = 1.0;
  const cplx d2 = d * d;
  for (std::size_t p = 0; p < poles.size(); ++p) v *= (d2 + poles[p] * poles[p]) / (d2 + mirrors[p] * mirrors[p]);
  return v;
}

cplx CnFactor::operator()(const cplx* z, int n) const {
  cplx v = 1.0;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) v *= pair(z[k] - z[j]);
  return v;
}

cplx ZeroFactor::pair(cplx d) const { return -d * d / (d * d + lambda * lambda); }

cplx ZeroFactor::operator()(const cplx* z, int n) const {
  cplx v = 1.0;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) v *= pair(z[k] - z[j]);
  return v;
}

CnFactor cn_factor(const ScatteringData& s, const std::vector<double>& shift_targets) {
  CnFactor c;
  c.poles = strip_pole_inventory(s);
  if (!shift_targets.empty() && shift_targets.size() != c.poles.size())
    throw ConfigError("cn factor: " + std::to_string(shift_targets.size()) + " shift targets for " +
                      std::to_string(c.poles.size()) + " poles");
  for (std::size_t p = 0; p < c.poles.size(); ++p) {
    const double m = shift_targets.empty() ? kDefaultMirror : shift_targets[p];
    if (!(m > -kPi && m < 0.0)) throw ConfigError("cn factor: shift target must lie in (-pi, 0)");
    c.mirrors.push_back(m);
  }
  return c;
}

ZeroFactor zero_factor(const ScatteringData& s, double lambda) {
  if (!(lambda > 2.0 * s.theta0))
    throw ConfigError("zero factor: lambda must exceed twice the universal angle");
  return ZeroFactor{lambda};
}

WaveFunction multiply(const WaveFunction& w, const CnFactor& c) {
  const KernelPtr k = w.kernel;
  const int n = w.n;
  return with_kernel(w, make_kernel([k, c, n](const int* idx, const cplx* z) {
                       const cplx f = c(z, n);
                       if (f == 0.0) return cplx(0.0);
                       return f * k->eval(idx, z);
                     }));
}

WaveFunction multiply(const WaveFunction& w, const ZeroFactor& zf) {
  const KernelPtr k = w.kernel;
  const int n = w.n;
  WaveFunction out = with_kernel(w, make_kernel([k, zf, n](const int* idx, const cplx* z) {
                                   const cplx f = zf(z, n);
                                   if (f == 0.0) return cplx(0.0);
                                   return f * k->eval(idx, z);
                                 }));
  out.zero_flag = true;
  return out;
}

WaveFunction make_d0_vector(const ScatteringData& s, const std::vector<GaussianSlot>& slots,
                            const D0Options& options) {
  const int n = static_cast<int>(slots.size());
  if (n > kMaxParticles) throw ConfigError("particle number exceeds the limit " + std::to_string(kMaxParticles));
  const Model m = share(s);
  WaveFunction w = symmetrize(gaussian_product(m, slots));
  auto spec = std::make_shared<D0Spec>();
  spec->gaussians = slots;
  if (options.cn) {
    const CnFactor c = options.cn_override ? *options.cn_override : cn_factor(s, options.mirrors);
    for (cplx mr : c.mirrors) {
      if (mr.imag() != 0.0 || !(mr.real() > -kPi && mr.real() < 0.0)) throw ConfigError("cn factor: shift target must lie in (-pi, 0)");
    }
    w = multiply(w, c);
    spec->cn = c;
  }
  if (options.zero_factor) {
    const double lam = options.lambda.value_or(2.0 * s.theta0 + 0.5);
    w = multiply(w, zero_factor(s, lam));
    spec->lambda = lam;
  }
  w.band = s.theta0;
  w.zero_flag = options.zero_factor || n <= 1;
  w.symmetric = true;
  w.d0 = spec;
  return w;
}

WaveFunction apply_j(const WaveFunction& w) {
  const WaveFunction inner = w;
  const int n = w.n;
  const int N = w.model->N;
  WaveFunction out = with_kernel(w, make_kernel([inner, n, N](const int* idx, const cplx* z) {
                                   std::array<int, kMaxArity> a;
                                   std::array<cplx, kMaxArity> t;
                                   for (int l = 0; l < n; ++l) {
                                     a[l] = N - idx[n - 1 - l];
                                     t[l] = std::conj(z[n - 1 - l]);
                                   }
                                   return std::conj(inner.eval(a.data(), t.data()));
                                 }));
  return out;
}

namespace {

WaveFunction transformed(const WaveFunction& w, Point2 a, double lambda, double sign) {
  const WaveFunction inner = w;
  const int n = w.n;
  WaveFunction out = with_kernel(w, make_kernel([inner, n, a, lambda, sign](const int* idx, const cplx* z) {
                                   std::array<cplx, kMaxArity> t;
                                   cplx phase = 0.0;
                                   for (int l = 0; l < n; ++l) {
                                     t[l] = z[l] - sign * lambda;
                                     const cplx at = sign > 0 ? z[l] : t[l];
                                     phase += momentum_dot(inner.model->mass(idx[l]), at, a);
                                   }
                                   return std::exp(sign * kI * phase) * inner.eval(idx, t.data());
                                 }));
  out.extent = w.extent.shifted(sign * lambda);
  return out;
}

}  // namespace

WaveFunction apply_u(const WaveFunction& w, Point2 a, double lambda) { return transformed(w, a, lambda, 1.0); }

// (U^{-1} Psi)(z) = exp(-i sum p(z + lambda).a) Psi(z + lambda)
WaveFunction apply_u_inverse(const WaveFunction& w, Point2 a, double lambda) {
  return transformed(w, a, lambda, -1.0);
}

double s_symmetry_residual(const WaveFunction& w, int samples, std::uint64_t seed) {
  if (w.n < 2) return 0.0;
  std::mt19937_64 rng(seed);
  const auto [lo, hi] = w.extent.window(2.0);
  double worst = 0.0;
  std::vector<cplx> z(w.n);
  for (int s = 0; s < samples; ++s) {
    for (auto& v : z) v = lo + (hi - lo) * uniform(rng);
    for_each_tuple(w.n, w.species(), [&](const int* idx) {
      const cplx a = w.eval(idx, z.data());
      for (int k = 1; k < w.n; ++k) {
        const cplx b = eval_word(w, {k}, idx, z.data());
        const double scale = std::max(std::abs(a), std::abs(b));
        if (scale < 1e-300) continue;
        worst = std::max(worst, std::abs(a - b) / scale);
      }
    });
  }
  return worst;
}

void for_each_tuple(int n, int K, const std::function<void(const int*)>& fn) {
  require_arity(n);
  std::array<int, kMaxArity> idx;
  idx.fill(1);
  if (n == 0) {
    fn(idx.data());
    return;
  }
  for (;;) {
    fn(idx.data());
    int p = n - 1;
    while (p >= 0 && idx[p] == K) idx[p--] = 1;
    if (p < 0) return;
    ++idx[p];
  }
}

FockVector FockVector::vacuum(Model m) {
  FockVector v;
  v.add(vacuum_wave(m));
  v.model = std::move(m);
  return v;
}

FockVector FockVector::of(const WaveFunction& w, cplx c) {
  FockVector v;
  v.add(w, c);
  return v;
}

FockVector& FockVector::add(const WaveFunction& w, cplx c) {
  if (!model) model = w.model;
  sectors[w.n].emplace_back(w, c);
  return *this;
}

FockVector& FockVector::add(const FockVector& other, cplx c) {
  for (const auto& [n, list] : other.sectors)
    for (const auto& [w, a] : list) add(w, c * a);
  return *this;
}

std::vector<int> FockVector::sector_list() const {
  std::vector<int> out;
  for (const auto& kv : sectors) out.push_back(kv.first);
  return out;
}

WaveFunction FockVector::sector(int n) const {
  auto it = sectors.find(n);
  if (it == sectors.end() || it->second.empty()) throw ConfigError("no sector with " + std::to_string(n) + " particles");
  const auto& list = it->second;
  if (list.size() == 1 && list[0].second == 1.0) return list[0].first;
  WaveFunction out = list[0].first;
  out.d0.reset();
  for (std::size_t i = 1; i < list.size(); ++i) {
    const WaveFunction& w = list[i].first;
    out.band = std::min(out.band, w.band);
    out.zero_flag = out.zero_flag && w.zero_flag;
    out.symmetric = out.symmetric && w.symmetric;
    out.extent = out.extent.merged(w.extent);
  }
  const auto terms = list;
  out.kernel = make_kernel([terms](const int* idx, const cplx* z) {
    cplx v = 0.0;
    for (const auto& [w, c] : terms) v += c * w.eval(idx, z);
    return v;
  });
  return out;
}

FockVector apply_j(const FockVector& v) {
  FockVector out;
  out.model = v.model;
  for (const auto& [n, list] : v.sectors)
    for (const auto& [w, c] : list) out.add(apply_j(w), std::conj(c));
  return out;
}

FockVector apply_u(const FockVector& v, Point2 a, double lambda) {
  FockVector out;
  out.model = v.model;
  for (const auto& [n, list] : v.sectors)
    for (const auto& [w, c] : list) out.add(apply_u(w, a, lambda), c);
  return out;
}

}  // namespace zfw
