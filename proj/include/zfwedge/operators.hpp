#pragma once

#include <array>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "zfwedge/testfn.hpp"
#include "zfwedge/wavefn.hpp"

namespace zfw {

inline constexpr double kFineHalfWidth = 6.5;

// f^{sign} as a one-particle wavefunction on a fine window around the boost rapidity.
WaveFunction transform_wave(const Model& m, const TestFunction& f, int sign);

// Creators: z†(phi) inserts phi on the left, z'†(phi) on the right. Both equal
// sqrt(n+1) P_{n+1} of the tensor product; symmetric inputs use the closed sums.
FockVector apply_zdag(const WaveFunction& phi, const FockVector& v);
FockVector apply_zdag_prime(const WaveFunction& phi, const FockVector& v);
// (z(phi) Psi)^g(t) = sqrt(n) sum_nu int conj(phi^nu(t')) Psi^{nu g}(t', t)
// (z'(phi) Psi)^g(t) = sqrt(n) sum_nu int conj(phi^nu(t')) Psi^{g nu}(t, t')
FockVector apply_z(const WaveFunction& phi, const FockVector& v, const QuadSpec& q = {});
FockVector apply_z_prime(const WaveFunction& phi, const FockVector& v, const QuadSpec& q = {});

// phi(f) = z†(f+) + z(J1 f-); phi'(g) = J phi(g_j) J.
FockVector apply_phi(const TestFunction& f, const FockVector& v, const QuadSpec& q = {});
FockVector apply_phi_prime(const TestFunction& g, const FockVector& v, const QuadSpec& q = {});

// i sqrt(2 pi |R^c_{ab}|), zero when (ab) does not fuse to c.
cplx eta(const ScatteringData& s, int a, int b, int c);

class ContributionLog {
 public:
  void record(int a, int b, int c);
  std::set<std::array<int, 3>> triples() const;

 private:
  mutable std::mutex mu_;
  std::set<std::array<int, 3>> triples_;
};

// What was asserted about the inputs before a bound-state operator was applied.
struct Certificate {
  std::string op;
  double required_band = 0.0;
  double available_band = 0.0;
  bool zero_flag = true;
  std::vector<int> sectors;
};

struct ChiOptions {
  bool allow_other_components = false;
  ContributionLog* log = nullptr;
  Certificate* certificate = nullptr;
};

// Closed n-particle form: sum over k, fusing (a b_k) -> g_k, of
//   sqrt(2 pi |R|) prod_{j<k} S^{g_j a}(t_k - t_j + i th_(ab)) f+_a(t_k + i th_(ab)) Psi(.. b_k ..)(.. t_k - i th_(ba) ..)
FockVector apply_chi(const TestFunction& f, const FockVector& v, const ChiOptions& opt = {});
// J chi(g_j) J
FockVector apply_chi_prime(const TestFunction& g, const FockVector& v, const ChiOptions& opt = {});
// Same operator from its own closed form (shifts in the opposite direction, S products over j > k).
FockVector apply_chi_prime_direct(const TestFunction& g, const FockVector& v, const ChiOptions& opt = {});

FockVector apply_fct(const TestFunction& f, const FockVector& v, const QuadSpec& q = {},
                     const ChiOptions& opt = {});
FockVector apply_fct_prime(const TestFunction& g, const FockVector& v, const QuadSpec& q = {},
                           const ChiOptions& opt = {});

struct WeakCommOptions {
  QuadSpec quad{160, 8.0, 640, 192};
  bool allow_other_components = false;
  // Skip the second evaluation at 3/4 of the node counts; error is then reported as 0.
  bool skip_error_estimate = false;
};

struct WeakCommResult {
  cplx value;
  double error = 0.0;
  double scale = 0.0;
  double normalized = 0.0;
  double normalized_error = 0.0;
  cplx creator_part;
  cplx bound_state_part;
  cplx annihilator_part;
};

// <phi~(f) Phi, phi~'(g) Psi> - <phi~'(g) Phi, phi~(f) Psi>, scale
// ||phi~ Phi|| ||phi~' Psi|| + ||phi~' Phi|| ||phi~ Psi||.
WeakCommResult weak_commutator(const TestFunction& f, const TestFunction& g, const FockVector& Phi,
                               const FockVector& Psi, const WeakCommOptions& opt = {});

// Independent closed form of [chi(f), z'(J1 g-)] Psi after the contour shift.
FockVector oracle_chi_zprime(const TestFunction& f, const TestFunction& g, const FockVector& v,
                             const QuadSpec& q = {});

// [phi'(g), phi(f)] acts by multiplication; residue form of the multiplier.
cplx phi_commutator_multiplier(const ScatteringData& s, const TestFunction& f, const TestFunction& g,
                               const int* idx, const double* theta, int n);
struct ContourLegs {
  double left = 0.0;
  double right = 0.0;
};
// Same multiplier from the real-line integral of the two literal terms; legs of
// the rectangle to Im = pi are integrated and reported.
cplx phi_commutator_direct(const ScatteringData& s, const TestFunction& f, const TestFunction& g,
                           const int* idx, const double* theta, int n, int nodes, ContourLegs* legs = nullptr);
FockVector oracle_phi_phiprime(const TestFunction& f, const TestFunction& g, const FockVector& v);

// || ((box + m^2) f)+ restricted to component a0 || / || f+_a0 ||
double kg_residual(const ScatteringData& s, const TestFunction& f, int a0, int nodes = 640);
// || U chi1(f) U* xi - chi1(f_(a, lambda)) xi || / || chi1(f_(a, lambda)) xi || on one-particle xi.
double covariance_residual(const TestFunction& f, Point2 a, double lambda, const WaveFunction& xi,
                           const QuadSpec& q = {});
// |<psi, chi xi> - <chi psi, xi>| / (||psi|| ||chi xi|| + ||chi psi|| ||xi||)
double chi_symmetry_residual(const TestFunction& f, const WaveFunction& psi, const WaveFunction& xi,
                             const QuadSpec& q = {});

void require_weak_comm_inputs(const ScatteringData& s, const TestFunction& f, const TestFunction& g,
                              bool allow_other_components);

}  // namespace zfw
