#include <array>
#include <cmath>

#include "detail.hpp"
#include "zfwedge/operators.hpp"

namespace zfw {

using detail::kMaxArgs;

FockVector oracle_chi_zprime(const TestFunction& f, const TestFunction& g, const FockVector& v, const QuadSpec& q) {
  if (!v.model) return v;
  const ScatteringData& s = *v.model;
  detail::require_model(f, s);
  detail::require_model(g, s);
  if (f.wedge != Wedge::Left || g.wedge != Wedge::Right)
    throw DomainError("oracle needs f in the left wedge and g in the right wedge");
  const auto terms = detail::fusion_terms(s, f);
  const Model m = v.model;
  const TestFunction fc = f, gc = g;
  const Extent fine = transform_wave(m, f, +1).extent.merged(transform_wave(m, g, +1).extent);
  return detail::map_terms(v, [&](const WaveFunction& w) -> std::optional<WaveFunction> {
    if (w.n == 0) return std::nullopt;
    const Axis axis = axis_for(fine.merged(w.extent), q, true);
    std::vector<double> x, wt;
    mapped_rule(axis, x, wt);
    const int n = w.n;
    const WaveFunction psi = w;
    WaveFunction out = with_kernel(w, nullptr);
    out.band = 0.0;
    out.zero_flag = false;
    out.kernel = make_kernel([psi, terms, fc, gc, m, n, x, wt](const int* idx, const cplx* z) {
      const ScatteringData& sd = *m;
      std::array<int, kMaxArgs> a;
      std::array<cplx, kMaxArgs> t;
      std::vector<cplx> vals;
      vals.reserve(x.size());
      cplx total = 0.0;
      // (alpha kappa) -> beta, f supported at alpha
      for (int beta = 1; beta <= sd.count(); ++beta) {
        for (const detail::FusionTerm& ft : terms[beta - 1]) {
          const int kappa = ft.b;
          const cplx up_ka = kI * ft.angle_ba;
          const cplx up_tot = kI * (ft.angle_ab + ft.angle_ba);
          vals.clear();
          for (std::size_t i = 0; i < x.size(); ++i) {
            const cplx tt = x[i];
            cplx fac = gc.fourier(sd.conj(beta), +1, tt + up_ka - kI * kPi);
            if (fac == 0.0) continue;
            fac *= fc.fourier(ft.a, +1, tt + up_tot);
            for (int j = 0; j < n - 1; ++j) fac *= sd.S(idx[j], beta, tt - z[j] + up_ka);
            a[0] = kappa;
            t[0] = tt;
            for (int j = 0; j < n - 1; ++j) {
              a[j + 1] = idx[j];
              t[j + 1] = z[j];
            }
            vals.push_back(wt[i] * fac * psi.eval(a.data(), t.data()));
          }
          total += ft.coeff * pairwise_sum(vals.data(), vals.size());
        }
      }
      return -std::sqrt(double(n)) * total;
    });
    out.n = n - 1;
    return out;
  });
}

namespace {

// h(x) = g-_{bar nu}(x) f+_nu(x) prod_j S^{g_j nu}(x - t_j)
cplx multiplier_integrand(const ScatteringData& s, const TestFunction& f, const TestFunction& g, int nu,
                          const int* idx, const double* theta, int n, cplx x) {
  cplx v = g.fourier(s.conj(nu), -1, x);
  if (v == 0.0) return v;
  v *= f.fourier(nu, +1, x);
  for (int j = 0; j < n; ++j) v *= s.S(idx[j], nu, x - theta[j]);
  return v;
}

void require_distinct(const double* theta, int n) {
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k)
      if (std::abs(theta[j] - theta[k]) < 1e-12) throw DomainError("coincident rapidities");
}

}  // namespace

cplx phi_commutator_multiplier(const ScatteringData& s, const TestFunction& f, const TestFunction& g, const int* idx,
                               const double* theta, int n) {
  require_distinct(theta, n);
  cplx total = 0.0;
  for (int nu = 1; nu <= s.count(); ++nu) {
    if (f.weight(nu) == 0.0 || g.weight(s.conj(nu)) == 0.0) continue;
    for (int j = 0; j < n; ++j) {
      const MeromorphicExpr& c = s.component(idx[j], nu);
      for (const PoleEntry& p : c.poles_in_strip(0.0, kPi)) {
        const cplx at = theta[j] + p.location;
        if (p.order == 1) {
          cplx v = c.residue(p.location).value;
          v *= g.fourier(s.conj(nu), -1, at) * f.fourier(nu, +1, at);
          for (int k = 0; k < n; ++k)
            if (k != j) v *= s.S(idx[k], nu, at - theta[k]);
          total += v;
        } else {
          // circle rule on the whole integrand
          constexpr int kPoints = 64;
          constexpr double r = 1e-3;
          cplx sum = 0.0;
          for (int i = 0; i < kPoints; ++i) {
            const cplx e = std::polar(r, 2 * kPi * (i + 0.5) / kPoints);
            sum += multiplier_integrand(s, f, g, nu, idx, theta, n, at + e) * e;
          }
          total += sum / double(kPoints);
        }
      }
    }
  }
  return 2 * kPi * kI * total;
}

cplx phi_commutator_direct(const ScatteringData& s, const TestFunction& f, const TestFunction& g, const int* idx,
                           const double* theta, int n, int nodes, ContourLegs* legs) {
  require_distinct(theta, n);
  const double lo = std::min(f.boost, g.boost) - kFineHalfWidth;
  const double hi = std::max(f.boost, g.boost) + kFineHalfWidth;
  std::vector<double> x, w;
  mapped_rule(Axis{lo, hi, nodes}, x, w);
  std::vector<cplx> vals;
  vals.reserve(x.size() * s.count());
  for (int nu = 1; nu <= s.count(); ++nu) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      // g-_{bar nu} f+_nu prod S(x - t) - g+_nu f-_{bar nu} prod S(t - x)
      cplx a = g.fourier(s.conj(nu), -1, x[i]) * f.fourier(nu, +1, x[i]);
      cplx b = g.fourier(nu, +1, x[i]) * f.fourier(s.conj(nu), -1, x[i]);
      for (int j = 0; j < n; ++j) {
        if (a != 0.0) a *= s.S(idx[j], nu, x[i] - theta[j]);
        if (b != 0.0) b *= s.S(idx[j], nu, theta[j] - x[i]);
      }
      vals.push_back(w[i] * (a - b));
    }
  }
  if (legs) {
    std::vector<double> y, wy;
    mapped_rule(Axis{0.0, kPi, 64}, y, wy);
    double left = 0.0, right = 0.0;
    for (int nu = 1; nu <= s.count(); ++nu) {
      cplx vl = 0.0, vr = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) {
        vl += wy[i] * kI * multiplier_integrand(s, f, g, nu, idx, theta, n, cplx(lo, y[i]));
        vr += wy[i] * kI * multiplier_integrand(s, f, g, nu, idx, theta, n, cplx(hi, y[i]));
      }
      left += std::abs(vl);
      right += std::abs(vr);
    }
    legs->left = left;
    legs->right = right;
  }
  return pairwise_sum(vals.data(), vals.size());
}

FockVector oracle_phi_phiprime(const TestFunction& f, const TestFunction& g, const FockVector& v) {
  if (!v.model) return v;
  detail::require_model(f, *v.model);
  detail::require_model(g, *v.model);
  const Model m = v.model;
  const TestFunction fc = f, gc = g;
  return detail::map_terms(v, [&](const WaveFunction& w) -> std::optional<WaveFunction> {
    WaveFunction out = with_kernel(w, nullptr);
    out.band = 0.0;
    out.zero_flag = false;
    const WaveFunction psi = w;
    const int n = w.n;
    out.kernel = make_kernel([psi, fc, gc, m, n](const int* idx, const cplx* z) {
      std::array<double, kMaxArgs> t;
      for (int j = 0; j < n; ++j) {
        if (z[j].imag() != 0.0) throw DomainError("multiplier is defined for real rapidities only");
        t[j] = z[j].real();
      }
      const cplx mult = phi_commutator_multiplier(*m, fc, gc, idx, t.data(), n);
      return mult * psi.eval(idx, z);
    });
    return out;
  });
}

double kg_residual(const ScatteringData& s, const TestFunction& f, int a0, int nodes) {
  detail::require_model(f, s);
  const TestFunction h = restricted(f, {a0});
  const TestFunction k = klein_gordon(h, s.mass(a0));
  std::vector<double> x, w;
  mapped_rule(Axis{f.boost - kFineHalfWidth, f.boost + kFineHalfWidth, nodes}, x, w);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += w[i] * std::norm(k.fourier(a0, +1, x[i]));
    den += w[i] * std::norm(h.fourier(a0, +1, x[i]));
  }
  return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

double covariance_residual(const TestFunction& f, Point2 a, double lambda, const WaveFunction& xi, const QuadSpec& q) {
  const FockVector v = FockVector::of(xi);
  const FockVector inv = FockVector::of(apply_u_inverse(xi, a, lambda));
  FockVector left = apply_u(apply_chi(f, inv), a, lambda);
  const FockVector right = apply_chi(act_poincare(f, a, lambda), v);
  const double nr = std::sqrt(std::max(0.0, inner_product(right, right, q).value.real()));
  left.add(right, -1.0);
  const double nd = std::sqrt(std::max(0.0, inner_product(left, left, q).value.real()));
  return nr > 0 ? nd / nr : nd;
}

double chi_symmetry_residual(const TestFunction& f, const WaveFunction& psi, const WaveFunction& xi,
                             const QuadSpec& q) {
  const FockVector p = FockVector::of(psi), x = FockVector::of(xi);
  const FockVector cp = apply_chi(f, p), cx = apply_chi(f, x);
  const cplx lhs = inner_product(p, cx, q).value;
  const cplx rhs = inner_product(cp, x, q).value;
  auto norm = [&](const FockVector& u) { return std::sqrt(std::max(0.0, inner_product(u, u, q).value.real())); };
  const double scale = norm(p) * norm(cx) + norm(cp) * norm(x);
  return scale > 0 ? std::abs(lhs - rhs) / scale : std::abs(lhs - rhs);
}

}  // namespace zfw
