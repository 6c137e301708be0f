#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "zfwedge/common.hpp"
#include "zfwedge/gauss_legendre.hpp"
#include "zfwedge/scattering.hpp"
#include "zfwedge/testfn.hpp"

namespace zfw {

using Model = std::shared_ptr<const ScatteringData>;
Model share(const ScatteringData& s);

// Component tuple idx (1-based species) and rapidities z, both of length n.
class Kernel {
 public:
  virtual ~Kernel() = default;
  virtual cplx eval(const int* idx, const cplx* z) const = 0;
};
using KernelPtr = std::shared_ptr<const Kernel>;
using KernelFn = std::function<cplx(const int*, const cplx*)>;
KernelPtr make_kernel(KernelFn fn);

// Where a function lives on the real line. The Gaussian part grows with the
// truncation radius; the fine window (test-function transforms) is fixed and
// needs many nodes.
struct Extent {
  double lo = 0.0;
  double hi = 0.0;
  double width = 1.0;
  bool fine = false;
  double fine_lo = 0.0;
  double fine_hi = 0.0;
  Extent merged(const Extent& other) const;
  Extent shifted(double s) const;
  std::pair<double, double> window(double L_widths) const;
};
Extent fine_extent(double lo, double hi);

struct GaussianSlot {
  double center = 0.0;
  double width = 1.0;
  std::map<int, cplx> weights;
};

// Symmetric pair factor prod_{j<k} r(z_j - z_k) with r even.
class CnFactor {
 public:
  std::vector<cplx> poles;    // lambda_p: strip poles sit at i * lambda_p
  std::vector<cplx> mirrors;  // lambda'_p in the lower strip
  cplx pair(cplx d) const;
  cplx operator()(const cplx* z, int n) const;
};

class ZeroFactor {
 public:
  double lambda = 1.0;
  cplx pair(cplx d) const;
  cplx operator()(const cplx* z, int n) const;
};

struct D0Spec {
  std::vector<GaussianSlot> gaussians;
  bool symmetrized = true;
  std::optional<CnFactor> cn;
  std::optional<double> lambda;
};

class WaveFunction {
 public:
  int n = 0;
  Model model;
  KernelPtr kernel;
  double band = 0.0;
  bool zero_flag = false;
  bool symmetric = false;
  Extent extent;
  std::shared_ptr<const D0Spec> d0;

  cplx eval(const int* idx, const cplx* z) const { return kernel->eval(idx, z); }
  cplx operator()(const std::vector<int>& idx, const std::vector<cplx>& z) const;
  int species() const { return model->count(); }
};

inline constexpr int kMaxParticles = 3;

WaveFunction vacuum_wave(Model m);
WaveFunction gaussian_product(Model m, const std::vector<GaussianSlot>& slots);
// Same model and metadata, new kernel.
WaveFunction with_kernel(const WaveFunction& base, KernelPtr kernel);
WaveFunction scaled(const WaveFunction& w, cplx c);
WaveFunction memoized(const WaveFunction& w);
// (a (x) b)(z_1..z_{n+m}) = a(z_1..z_n) b(z_{n+1}..z_{n+m}); not symmetrized.
WaveFunction tensor_product(const WaveFunction& a, const WaveFunction& b);

// Adjacent transposition tau_k (1 <= k < n) and words in them.
WaveFunction apply_transposition(const WaveFunction& w, int k);
WaveFunction apply_word(const WaveFunction& w, const std::vector<int>& word);
// One word per element of S_n, identity first.
const std::vector<std::vector<int>>& permutation_words(int n);
// rho_k = tau_{k-1} ... tau_1 and rho'_k = tau_{n-k+1} ... tau_{n-1}, as words applied right to left.
std::vector<int> cyclic_word(int k);
std::vector<int> cyclic_word_prime(int n, int k);

// (1/n!) sum_sigma D_n(sigma) base
WaveFunction symmetrize(const WaveFunction& base, int n_max = kMaxParticles);

// Pole inventory of all components in the open physical strip, with multiplicity,
// plus upper-strip zeros (they mirror lower-strip poles).
std::vector<cplx> strip_pole_inventory(const ScatteringData& s);
inline constexpr double kDefaultMirror = -(kPi - 0.01);
// Empty shift_targets selects kDefaultMirror for every pole.
CnFactor cn_factor(const ScatteringData& s, const std::vector<double>& shift_targets = {});
ZeroFactor zero_factor(const ScatteringData& s, double lambda);
WaveFunction multiply(const WaveFunction& w, const CnFactor& c);
WaveFunction multiply(const WaveFunction& w, const ZeroFactor& z);

struct D0Options {
  bool cn = true;
  bool zero_factor = true;
  std::optional<double> lambda;  // default 2 theta0 + 0.5
  std::vector<double> mirrors;
  std::optional<CnFactor> cn_override;
};
WaveFunction make_d0_vector(const ScatteringData& s, const std::vector<GaussianSlot>& slots,
                            const D0Options& options = {});

// (J Psi)^{a_1..a_n}(z_1..z_n) = conj(Psi^{bar a_n..bar a_1}(conj z_n, .., conj z_1))
WaveFunction apply_j(const WaveFunction& w);
// (U(a, lambda) Psi)(z) = exp(i sum p_{a_l}(z_l).a) Psi(z - lambda)
WaveFunction apply_u(const WaveFunction& w, Point2 a, double lambda);
WaveFunction apply_u_inverse(const WaveFunction& w, Point2 a, double lambda);

// Largest relative deviation from S-symmetry over random real tuples, all index tuples and all k.
double s_symmetry_residual(const WaveFunction& w, int samples, std::uint64_t seed);

struct QuadSpec {
  int nodes_per_axis = 128;
  double L_widths = 8.0;
  int fine_nodes = 320;
  int inner_nodes = 192;
};

struct QuadResult {
  cplx value;
  double error = 0.0;
};

Axis axis_for(const Extent& e, const QuadSpec& q, bool inner = false);
// Tensor Gauss-Legendre sum of F over the axes, with |I(n) - I(n/2)| as error.
QuadResult integrate_grid(const std::vector<Axis>& axes, const std::function<cplx(const cplx*)>& F);
// Calls fn for every index tuple in {1..K}^n.
void for_each_tuple(int n, int K, const std::function<void(const int*)>& fn);

QuadResult inner_product(const WaveFunction& phi, const WaveFunction& psi, const QuadSpec& q = {});

class FockVector {
 public:
  Model model;
  std::map<int, std::vector<std::pair<WaveFunction, cplx>>> sectors;

  static FockVector vacuum(Model m);
  static FockVector of(const WaveFunction& w, cplx c = 1.0);

  FockVector& add(const WaveFunction& w, cplx c = 1.0);
  FockVector& add(const FockVector& other, cplx c = 1.0);
  bool empty() const { return sectors.empty(); }
  std::vector<int> sector_list() const;
  // Sum kernel of one sector; throws if the sector is absent.
  WaveFunction sector(int n) const;
};

FockVector apply_j(const FockVector& v);
FockVector apply_u(const FockVector& v, Point2 a, double lambda);
QuadResult inner_product(const FockVector& a, const FockVector& b, const QuadSpec& q = {});

}  // namespace zfw
