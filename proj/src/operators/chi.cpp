#include <array>
#include <cmath>

#include "detail.hpp"
#include "zfwedge/operators.hpp"

namespace zfw {

using detail::FusionTerm;
using detail::kMaxArgs;

namespace detail {

std::vector<std::vector<FusionTerm>> fusion_terms(const ScatteringData& s, const TestFunction& f) {
  const int K = s.count();
  std::vector<std::vector<FusionTerm>> out(K);
  for (int a = 1; a <= K; ++a) {
    if (f.weight(a) == 0.0) continue;
    for (int b = 1; b <= K; ++b) {
      const FusionProcess* p = s.fusion(a, b);
      if (!p) continue;
      const double coeff = std::abs(eta(s, a, b, p->result));
      out[p->result - 1].push_back({a, b, p->angle_left, p->angle_right, coeff});
    }
  }
  return out;
}

}  // namespace detail

cplx eta(const ScatteringData& s, int a, int b, int c) {
  const FusionProcess* p = s.fusion(a, b);
  if (!p || p->result != c) return 0.0;
  return kI * std::sqrt(2 * kPi * std::abs(s.fusion_residue(a, b, c)));
}

void ContributionLog::record(int a, int b, int c) {
  std::lock_guard<std::mutex> lock(mu_);
  triples_.insert({a, b, c});
}

std::set<std::array<int, 3>> ContributionLog::triples() const {
  std::lock_guard<std::mutex> lock(mu_);
  return triples_;
}

namespace {

void require_components(const ScatteringData& s, const TestFunction& f, bool allow_other) {
  if (allow_other) return;
  const int u = s.elementary, ubar = s.conj(s.elementary);
  for (int a = 1; a <= f.count(); ++a) {
    if (a != u && a != ubar && f.weight(a) != 0.0)
      throw DomainError("test function has a component outside the elementary pair");
  }
}

// Shared driver for chi (down = true: Psi shifted downwards) and the direct chi'.
FockVector bound_state(const TestFunction& f, const FockVector& v, const ChiOptions& opt, bool down) {
  if (!v.model) return v;
  const ScatteringData& s = *v.model;
  detail::require_model(f, s);
  if (f.wedge != (down ? Wedge::Left : Wedge::Right))
    throw DomainError(down ? "chi(f) needs a left-wedge test function" : "chi'(g) needs a right-wedge test function");
  require_components(s, f, opt.allow_other_components);
  const auto terms = detail::fusion_terms(s, f);
  double required = 0.0;
  for (const auto& list : terms)
    for (const FusionTerm& t : list) required = std::max(required, t.angle_ba);
  if (opt.certificate) {
    opt.certificate->op = down ? "chi" : "chi_prime";
    opt.certificate->required_band = required;
    opt.certificate->available_band = kPi;
  }
  const TestFunction fc = f;
  const Model m = v.model;
  ContributionLog* log = opt.log;
  return detail::map_terms(v, [&](const WaveFunction& w) -> std::optional<WaveFunction> {
    if (w.n == 0) return std::nullopt;
    if (w.n > kMaxArgs) throw ConfigError("particle number too large");
    if (w.band + 1e-12 < required)
      throw DomainError("bound-state operator: input band " + std::to_string(w.band) + " below required shift " +
                        std::to_string(required));
    if (opt.certificate) {
      opt.certificate->available_band = std::min(opt.certificate->available_band, w.band);
      opt.certificate->zero_flag = opt.certificate->zero_flag && w.zero_flag;
      opt.certificate->sectors.push_back(w.n);
    }
    WaveFunction out = with_kernel(w, nullptr);
    out.band = std::max(0.0, w.band - required);
    out.zero_flag = false;
    out.symmetric = w.symmetric;
    const int n = w.n;
    const WaveFunction psi = w;
    const double dir = down ? 1.0 : -1.0;
    out.kernel = make_kernel([psi, terms, fc, m, n, dir, down, log](const int* idx, const cplx* z) {
      const ScatteringData& sd = *m;
      std::array<int, kMaxArgs> a;
      std::array<cplx, kMaxArgs> t;
      cplx sum = 0.0;
      for (int k = 0; k < n; ++k) {
        for (const FusionTerm& ft : terms[idx[k] - 1]) {
          const cplx up = kI * ft.angle_ab;
          cplx fac = ft.coeff * fc.fourier(ft.a, +1, z[k] + dir * up);
          if (fac == 0.0) continue;
          if (down) {
            for (int j = 0; j < k; ++j) fac *= sd.S(idx[j], ft.a, z[k] - z[j] + up);
          } else {
            for (int j = k + 1; j < n; ++j) fac *= sd.S(idx[j], ft.a, z[j] - z[k] + up);
          }
          std::copy(idx, idx + n, a.begin());
          std::copy(z, z + n, t.begin());
          a[k] = ft.b;
          t[k] = z[k] - dir * kI * ft.angle_ba;
          const cplx val = fac * psi.eval(a.data(), t.data());
          if (log && val != 0.0) log->record(ft.a, ft.b, idx[k]);
          sum += val;
        }
      }
      return sum;
    });
    return out;
  });
}

}  // namespace

FockVector apply_chi(const TestFunction& f, const FockVector& v, const ChiOptions& opt) {
  return bound_state(f, v, opt, true);
}

FockVector apply_chi_prime_direct(const TestFunction& g, const FockVector& v, const ChiOptions& opt) {
  return bound_state(g, v, opt, false);
}

FockVector apply_chi_prime(const TestFunction& g, const FockVector& v, const ChiOptions& opt) {
  if (g.wedge != Wedge::Right) throw DomainError("chi'(g) needs a right-wedge test function");
  ChiOptions inner = opt;
  FockVector r = apply_j(apply_chi(act_cpt(g), apply_j(v), inner));
  if (opt.certificate) opt.certificate->op = "chi_prime";
  return r;
}

FockVector apply_fct(const TestFunction& f, const FockVector& v, const QuadSpec& q, const ChiOptions& opt) {
  FockVector out = apply_phi(f, v, q);
  out.add(apply_chi(f, v, opt));
  return out;
}

FockVector apply_fct_prime(const TestFunction& g, const FockVector& v, const QuadSpec& q, const ChiOptions& opt) {
  FockVector out = apply_phi_prime(g, v, q);
  out.add(apply_chi_prime(g, v, opt));
  return out;
}

}  // namespace zfw
