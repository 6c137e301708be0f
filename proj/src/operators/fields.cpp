#include <array>
#include <cmath>

#include "detail.hpp"
#include "zfwedge/operators.hpp"

namespace zfw {

namespace detail {

FockVector map_terms(const FockVector& v, const std::function<std::optional<WaveFunction>(const WaveFunction&)>& op) {
  FockVector out;
  out.model = v.model;
  for (const auto& [n, list] : v.sectors) {
    for (const auto& [w, c] : list) {
      if (auto r = op(w)) out.add(*r, c);
    }
  }
  return out;
}

void require_model(const TestFunction& f, const ScatteringData& s) {
  if (f.count() != s.count()) throw ConfigError("test function and model have different species counts");
  for (int a = 1; a <= s.count(); ++a) {
    if (std::abs(f.masses[a - 1] - s.mass(a)) > 1e-12 * s.mass(a))
      throw ConfigError("test function masses do not match the model");
  }
}

}  // namespace detail

using detail::kMaxArgs;

WaveFunction transform_wave(const Model& m, const TestFunction& f, int sign) {
  detail::require_model(f, *m);
  WaveFunction w;
  w.n = 1;
  w.model = m;
  const TestFunction fc = f;
  w.kernel = make_kernel([fc, sign](const int* idx, const cplx* z) {
    if (fc.weight(idx[0]) == 0.0) return cplx(0.0);
    return fc.fourier(idx[0], sign, z[0]);
  });
  w.band = kPi;
  w.symmetric = true;
  w.zero_flag = true;
  w.extent = fine_extent(f.boost - kFineHalfWidth, f.boost + kFineHalfWidth);
  return w;
}

namespace {

WaveFunction creator(const WaveFunction& phi, const WaveFunction& psi, bool left) {
  if (phi.n != 1) throw ConfigError("creator needs a one-particle function");
  const int n = psi.n;
  if (!psi.symmetric) {
    // literal sqrt(n+1) P (phi (x) psi) or sqrt(n+1) P (psi (x) phi)
    WaveFunction t = symmetrize(left ? tensor_product(phi, psi) : tensor_product(psi, phi), kMaxArgs);
    WaveFunction out = scaled(t, std::sqrt(double(n + 1)));
    out.band = 0.0;
    out.zero_flag = false;
    return out;
  }
  WaveFunction out = with_kernel(psi, nullptr);
  out.n = n + 1;
  out.band = 0.0;
  out.zero_flag = false;
  out.symmetric = true;
  out.extent = psi.extent.merged(phi.extent);
  const double norm = 1.0 / std::sqrt(double(n + 1));
  const WaveFunction p = phi, q = psi;
  const Model m = psi.model;
  out.kernel = make_kernel([p, q, m, n, norm, left](const int* idx, const cplx* z) {
    const ScatteringData& s = *m;
    std::array<int, kMaxArgs> a;
    std::array<cplx, kMaxArgs> t;
    cplx sum = 0.0;
    for (int k = 0; k <= n; ++k) {
      const cplx h = p.eval(idx + k, z + k);
      if (h == 0.0) continue;
      cplx fac = h;
      if (left) {
        for (int j = 0; j < k; ++j) fac *= s.S(idx[j], idx[k], z[k] - z[j]);
      } else {
        for (int j = k + 1; j <= n; ++j) fac *= s.S(idx[k], idx[j], z[j] - z[k]);
      }
      for (int j = 0, l = 0; j <= n; ++j) {
        if (j == k) continue;
        a[l] = idx[j];
        t[l++] = z[j];
      }
      sum += fac * q.eval(a.data(), t.data());
    }
    return norm * sum;
  });
  return out;
}

// conj(phi^nu) on the inner nodes; the integrand slot is first (left) or last.
WaveFunction annihilator(const WaveFunction& phi, const WaveFunction& psi, const QuadSpec& q, bool left) {
  if (phi.n != 1) throw ConfigError("annihilator needs a one-particle function");
  const int n = psi.n;
  const int K = psi.species();
  const Axis axis = axis_for(phi.extent.merged(psi.extent), q, true);
  std::vector<double> x, w;
  mapped_rule(axis, x, w);
  // weights times conj(phi) per component, nu-major
  std::vector<cplx> cw(static_cast<std::size_t>(K) * x.size());
  for (int nu = 1; nu <= K; ++nu) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const cplx z = x[i];
      cw[(nu - 1) * x.size() + i] = w[i] * std::conj(phi.eval(&nu, &z));
    }
  }
  const double root = std::sqrt(double(n));
  const WaveFunction ps = psi;
  auto integral = [ps, x, cw, K, n, root, left](const int* idx, const cplx* z) {
    std::array<int, kMaxArgs> a;
    std::array<cplx, kMaxArgs> t;
    const int slot = left ? 0 : n - 1;
    for (int j = 0, l = 0; j < n; ++j) {
      if (j == slot) continue;
      a[j] = idx[l];
      t[j] = z[l++];
    }
    std::vector<cplx> terms;
    terms.reserve(x.size() * K);
    for (int nu = 1; nu <= K; ++nu) {
      a[slot] = nu;
      const cplx* c = cw.data() + (nu - 1) * x.size();
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (c[i] == 0.0) continue;
        t[slot] = x[i];
        terms.push_back(c[i] * ps.eval(a.data(), t.data()));
      }
    }
    return root * pairwise_sum(terms.data(), terms.size());
  };
  WaveFunction out = with_kernel(psi, nullptr);
  out.n = n - 1;
  out.extent = psi.extent;
  if (n == 1) {
    const cplx v = integral(nullptr, nullptr);
    out.kernel = make_kernel([v](const int*, const cplx*) { return v; });
    out.band = kPi;
    out.zero_flag = true;
  } else {
    out.kernel = make_kernel(integral);
  }
  return out;
}

}  // namespace

FockVector apply_zdag(const WaveFunction& phi, const FockVector& v) {
  return detail::map_terms(v, [&](const WaveFunction& w) -> std::optional<WaveFunction> {
    if (w.n + 1 > kMaxArgs) throw ConfigError("particle number too large");
    return creator(phi, w, true);
  });
}

FockVector apply_zdag_prime(const WaveFunction& phi, const FockVector& v) {
  return detail::map_terms(v, [&](const WaveFunction& w) -> std::optional<WaveFunction> {
    if (w.n + 1 > kMaxArgs) throw ConfigError("particle number too large");
    return creator(phi, w, false);
  });
}

FockVector apply_z(const WaveFunction& phi, const FockVector& v, const QuadSpec& q) {
  return detail::map_terms(v, [&](const WaveFunction& w) -> std::optional<WaveFunction> {
    if (w.n == 0) return std::nullopt;
    return annihilator(phi, w, q, true);
  });
}

FockVector apply_z_prime(const WaveFunction& phi, const FockVector& v, const QuadSpec& q) {
  return detail::map_terms(v, [&](const WaveFunction& w) -> std::optional<WaveFunction> {
    if (w.n == 0) return std::nullopt;
    return annihilator(phi, w, q, false);
  });
}

FockVector apply_phi(const TestFunction& f, const FockVector& v, const QuadSpec& q) {
  if (f.wedge != Wedge::Left) throw DomainError("phi(f) needs a left-wedge test function");
  const Model& m = v.model;
  FockVector out = apply_zdag(transform_wave(m, f, +1), v);
  out.add(apply_z(apply_j(transform_wave(m, f, -1)), v, q));
  return out;
}

FockVector apply_phi_prime(const TestFunction& g, const FockVector& v, const QuadSpec& q) {
  if (g.wedge != Wedge::Right) throw DomainError("phi'(g) needs a right-wedge test function");
  return apply_j(apply_phi(act_cpt(g), apply_j(v), q));
}

}  // namespace zfw
