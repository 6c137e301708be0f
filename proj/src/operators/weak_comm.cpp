#include <array>
#include <cmath>

#include "detail.hpp"
#include "zfwedge/operators.hpp"

namespace zfw {

using detail::kMaxArgs;

void require_weak_comm_inputs(const ScatteringData& s, const TestFunction& f, const TestFunction& g,
                              bool allow_other_components) {
  detail::require_model(f, s);
  detail::require_model(g, s);
  if (f.wedge != Wedge::Left) throw DomainError("f must be supported in the left wedge");
  if (g.wedge != Wedge::Right) throw DomainError("g must be supported in the right wedge");
  if (!f.is_real() || !g.is_real()) throw DomainError("f and g must be real");
  if (allow_other_components) return;
  const int u = s.elementary, ubar = s.conj(s.elementary);
  for (const TestFunction* h : {&f, &g}) {
    for (int a = 1; a <= h->count(); ++a) {
      if (a != u && a != ubar && h->weight(a) != 0.0)
        throw DomainError("test functions may only carry the elementary pair of components");
    }
  }
}

namespace {

// Node ids [0, nc) are coarse, [nc, nc + nf) fine.
struct Grid {
  std::vector<double> x, w;
  int nc = 0, nf = 0;
  int size() const { return nc + nf; }
};

Grid make_grid(const Axis& coarse, const Axis& fine) {
  Grid g;
  std::vector<double> cx, cw, fx, fw;
  mapped_rule(coarse, cx, cw);
  mapped_rule(fine, fx, fw);
  g.nc = static_cast<int>(cx.size());
  g.nf = static_cast<int>(fx.size());
  g.x = cx;
  g.x.insert(g.x.end(), fx.begin(), fx.end());
  g.w = cw;
  g.w.insert(g.w.end(), fw.begin(), fw.end());
  return g;
}

cplx guarded_eval(const WaveFunction& w, const int* idx, const cplx* z) {
  try {
    return w.eval(idx, z);
  } catch (const PoleHit&) {
    std::array<cplx, kMaxArgs> t;
    cplx sum = 0.0;
    for (double sg : {1.0, -1.0}) {
      for (int k = 0; k < w.n; ++k) t[k] = z[k] + sg * 1e-6 * (1.0 + 0.37 * k);
      sum += w.eval(idx, t.data());
    }
    return 0.5 * sum;
  }
}

// Values of an n-particle function (n <= 2) on node tuples with at most one fine node.
class NodeTable {
 public:
  NodeTable(const WaveFunction& w, const Grid& g) : n_(w.n), K_(w.species()), NU_(g.size()) {
    std::size_t span = 1;
    for (int i = 0; i < n_; ++i) span *= NU_;
    span_ = span;
    std::size_t tuples = 1;
    for (int i = 0; i < n_; ++i) tuples *= K_;
    v_.assign(tuples * span_, 0.0);
    std::vector<std::array<int, 2>> cells;
    if (n_ == 1) {
      for (int i = 0; i < NU_; ++i) cells.push_back({i, 0});
    } else if (n_ == 2) {
      for (int i = 0; i < NU_; ++i)
        for (int j = 0; j < NU_; ++j)
          if (i < g.nc || j < g.nc) cells.push_back({i, j});
    }
    if (n_ == 0) {
      v_[0] = w.eval(nullptr, nullptr);
      return;
    }
    parallel_for(cells.size(), [&](std::size_t c) {
      const std::array<int, 2>& cell = cells[c];
      cplx z[2] = {g.x[cell[0]], g.x[cell[1]]};
      int idx[2];
      for (std::size_t t = 0; t < tuples; ++t) {
        std::size_t r = t;
        for (int p = n_ - 1; p >= 0; --p) {
          idx[p] = static_cast<int>(r % K_) + 1;
          r /= K_;
        }
        const std::size_t at = n_ == 1 ? cell[0] : static_cast<std::size_t>(cell[0]) * NU_ + cell[1];
        v_[t * span_ + at] = guarded_eval(w, idx, z);
      }
    });
  }

  std::size_t span() const { return span_; }
  const cplx* data() const { return v_.data(); }
  std::size_t tuple_offset(const int* gamma) const {
    std::size_t t = 0;
    for (int i = 0; i < n_; ++i) t = t * K_ + (gamma[i] - 1);
    return t * span_;
  }
  std::size_t point_offset(const int* ids) const {
    std::size_t p = 0;
    for (int i = 0; i < n_; ++i) p = p * NU_ + ids[i];
    return p;
  }

  // gamma and ids of length n
  cplx at(const int* gamma, const int* ids) const {
    std::size_t t = 0, p = 0;
    for (int i = 0; i < n_; ++i) {
      t = t * K_ + (gamma[i] - 1);
      p = p * NU_ + ids[i];
    }
    return v_[t * span_ + p];
  }

 private:
  int n_, K_, NU_;
  std::size_t span_ = 1;
  std::vector<cplx> v_;
};

class STable {
 public:
  STable(const ScatteringData& s, const Grid& g) : K_(s.count()), NU_(g.size()) {
    v_.assign(static_cast<std::size_t>(K_) * K_ * NU_ * NU_, 0.0);
    parallel_for(NU_, [&](std::size_t i) {
      for (int j = 0; j < NU_; ++j) {
        const cplx d = g.x[j] - g.x[i];
        for (int a = 1; a <= K_; ++a)
          for (int b = 1; b <= K_; ++b) v_[index(a, b, static_cast<int>(i), j)] = s.S(a, b, d);
      }
    });
  }
  // S^{ab}(x_j - x_i)
  cplx operator()(int a, int b, int i, int j) const { return v_[index(a, b, i, j)]; }
  const cplx* data() const { return v_.data(); }
  std::size_t species_offset(int a, int b) const { return index(a, b, 0, 0); }
  std::size_t node_offset(int i, int j) const { return static_cast<std::size_t>(i) * NU_ + j; }

 private:
  std::size_t index(int a, int b, int i, int j) const {
    return ((static_cast<std::size_t>(a - 1) * K_ + (b - 1)) * NU_ + i) * NU_ + j;
  }
  int K_, NU_;
  std::vector<cplx> v_;
};

struct OneTable {
  std::vector<cplx> v;
  int NU = 0;
  cplx operator()(int a, int id) const { return v[static_cast<std::size_t>(a - 1) * NU + id]; }
};

OneTable one_table(const WaveFunction& w, const Grid& g) {
  OneTable t;
  t.NU = g.size();
  t.v.resize(static_cast<std::size_t>(w.species()) * t.NU);
  parallel_for(t.NU, [&](std::size_t i) {
    const cplx z = g.x[i];
    for (int a = 1; a <= w.species(); ++a) t.v[(a - 1) * t.NU + i] = w.eval(&a, &z);
  });
  return t;
}

// sum_gamma int conj(u_{g_s}(x_s) U(x\\s)) sum_k prod_k h_{g_k}(x_k) V(x\\k). Term k puts the slots s and k,
// where the test-function transforms sit, on the fine axis.
cplx creator_pairing(int n, int K, const Grid& g, const STable& S, int s, const OneTable& u, const NodeTable& U,
                     bool left_side, const OneTable& h, const NodeTable& V) {
  const int d = n + 1;
  std::vector<std::array<int, kMaxArgs>> tuples;
  for_each_tuple(d, K, [&](const int* idx) {
    std::array<int, kMaxArgs> t{};
    std::copy(idx, idx + d, t.begin());
    tuples.push_back(t);
  });
  const auto skip = [d](const int* v, int drop) {
    std::array<int, kMaxArgs> out{};
    for (int p = 0, l = 0; p < d; ++p)
      if (p != drop) out[l++] = v[p];
    return out;
  };
  std::vector<cplx> terms(d);
  for (int k = 0; k < d; ++k) {
    auto range_of = [&](int p) { return p == s || p == k ? std::pair{g.nc, g.nf} : std::pair{0, g.nc}; };
    const auto [first_lo, first_len] = range_of(0);
    std::size_t inner = 1;
    for (int p = 1; p < d; ++p) inner *= range_of(p).second;
    // S factors of term k as (slot i, slot j) pairs, S^{g_i g_j}(x_j - x_i)
    std::vector<int> pair_i, pair_j;
    if (left_side) {
      for (int j = 0; j < k; ++j) pair_i.push_back(j), pair_j.push_back(k);
    } else {
      for (int j = k + 1; j < d; ++j) pair_i.push_back(k), pair_j.push_back(j);
    }
    const int npairs = static_cast<int>(pair_i.size());
    std::vector<std::size_t> tu(tuples.size()), tv(tuples.size()), sab(tuples.size() * npairs);
    for (std::size_t t = 0; t < tuples.size(); ++t) {
      tu[t] = U.tuple_offset(skip(tuples[t].data(), s).data());
      tv[t] = V.tuple_offset(skip(tuples[t].data(), k).data());
      for (int q = 0; q < npairs; ++q) sab[t * npairs + q] = S.species_offset(tuples[t][pair_i[q]], tuples[t][pair_j[q]]);
    }
    const cplx* Ud = U.data();
    const cplx* Vd = V.data();
    const cplx* Sd = S.data();
    std::vector<cplx> partial(first_len);
    parallel_for(first_len, [&](std::size_t i0) {
      std::vector<cplx> vals(inner);
      std::array<int, kMaxArgs> ids{};
      std::array<std::size_t, kMaxArgs> soff{};
      ids[0] = first_lo + static_cast<int>(i0);
      for (std::size_t r = 0; r < inner; ++r) {
        std::size_t rr = r;
        double wt = g.w[ids[0]];
        for (int p = d - 1; p >= 1; --p) {
          const auto [lo, len] = range_of(p);
          ids[p] = lo + static_cast<int>(rr % len);
          rr /= len;
          wt *= g.w[ids[p]];
        }
        const std::size_t pu = U.point_offset(skip(ids.data(), s).data());
        const std::size_t pv = V.point_offset(skip(ids.data(), k).data());
        for (int q = 0; q < npairs; ++q) soff[q] = S.node_offset(ids[pair_i[q]], ids[pair_j[q]]);
        const int is = ids[s], ik = ids[k];
        cplx acc = 0.0;
        for (std::size_t t = 0; t < tuples.size(); ++t) {
          const auto& gam = tuples[t];
          const cplx uv = u(gam[s], is);
          if (uv == 0.0) continue;
          const cplx hv = h(gam[k], ik);
          if (hv == 0.0) continue;
          cplx fac = std::conj(uv * Ud[tu[t] + pu]) * hv;
          const std::size_t* so = sab.data() + t * npairs;
          for (int q = 0; q < npairs; ++q) fac *= Sd[so[q] + soff[q]];
          acc += fac * Vd[tv[t] + pv];
        }
        vals[r] = wt * acc;
      }
      partial[i0] = pairwise_sum(vals.data(), vals.size());
    });
    terms[k] = pairwise_sum(partial.data(), partial.size());
  }
  return pairwise_sum(terms.data(), terms.size());
}

// Sum over node tuples of M integrand outputs computed together.
std::vector<cplx> grid_multi(const std::vector<Axis>& axes, int M,
                             const std::function<void(const cplx*, cplx*)>& fn) {
  const std::size_t d = axes.size();
  std::vector<cplx> out(M, 0.0);
  if (d == 0) {
    fn(nullptr, out.data());
    return out;
  }
  std::vector<std::vector<double>> x(d), w(d);
  for (std::size_t k = 0; k < d; ++k) mapped_rule(axes[k], x[k], w[k]);
  std::size_t inner = 1;
  for (std::size_t k = 1; k < d; ++k) inner *= axes[k].nodes;
  const std::size_t outer = axes[0].nodes;
  std::vector<cplx> partial(outer * M);
  parallel_for(outer, [&](std::size_t i) {
    std::vector<cplx> vals(inner * M);
    std::vector<cplx> pt(d), tmp(M);
    pt[0] = x[0][i];
    for (std::size_t r = 0; r < inner; ++r) {
      std::size_t rr = r;
      double wt = w[0][i];
      for (std::size_t k = d - 1; k >= 1; --k) {
        const std::size_t j = rr % axes[k].nodes;
        rr /= axes[k].nodes;
        pt[k] = x[k][j];
        wt *= w[k][j];
      }
      fn(pt.data(), tmp.data());
      for (int m = 0; m < M; ++m) vals[m * inner + r] = wt * tmp[m];
    }
    for (int m = 0; m < M; ++m) partial[m * outer + i] = pairwise_sum(vals.data() + m * inner, inner);
  });
  for (int m = 0; m < M; ++m) out[m] = pairwise_sum(partial.data() + m * outer, outer);
  return out;
}

// The four vectors X1..X4 of one sector; returns <X1,X2>, <X3,X4>, |X1|^2, |X2|^2, |X3|^2, |X4|^2.
std::array<cplx, 6> sector_pairings(const std::array<WaveFunction, 4>& X, const Axis& axis) {
  const int n = X[0].n;
  std::vector<int> tuples;
  for_each_tuple(n, X[0].species(), [&](const int* idx) { tuples.insert(tuples.end(), idx, idx + n); });
  const std::size_t count = n == 0 ? 1 : tuples.size() / n;
  if (n == 0) tuples.push_back(1);
  const auto sums = grid_multi(std::vector<Axis>(n, axis), 6, [&](const cplx* z, cplx* out) {
    for (int m = 0; m < 6; ++m) out[m] = 0.0;
    for (std::size_t t = 0; t < count; ++t) {
      const int* idx = tuples.data() + t * n;
      cplx v[4];
      for (int k = 0; k < 4; ++k) v[k] = guarded_eval(X[k], idx, z);
      out[0] += std::conj(v[0]) * v[1];
      out[1] += std::conj(v[2]) * v[3];
      for (int k = 0; k < 4; ++k) out[2 + k] += std::norm(v[k]);
    }
  });
  std::array<cplx, 6> r;
  std::copy(sums.begin(), sums.end(), r.begin());
  return r;
}

WaveFunction only_term(const FockVector& v, int n) {
  auto it = v.sectors.find(n);
  if (it == v.sectors.end() || it->second.empty()) return WaveFunction{};
  return v.sector(n);
}

struct Parts {
  cplx up, mid, down;
  double nf_phi, nfp_psi, nfp_phi, nf_psi;  // squared norms
};

Parts diagonal_sector(const TestFunction& f, const TestFunction& g, const WaveFunction& phi, const WaveFunction& psi,
                      const WeakCommOptions& opt, bool norms) {
  const Model m = psi.model;
  const ScatteringData& s = *m;
  const int n = psi.n;
  const int K = s.count();
  const QuadSpec& q = opt.quad;
  const WaveFunction fp = transform_wave(m, f, +1), gp = transform_wave(m, g, +1);
  const Extent gauss = phi.extent.merged(psi.extent);
  const Axis coarse = axis_for(gauss, q);
  const Extent fine_ext = fp.extent.merged(gp.extent);
  const Axis fine = axis_for(fine_ext, q);
  Parts r{};

  // creators, sector n + 1
  {
    const Grid grid = make_grid(coarse, fine);
    const STable S(s, grid);
    const OneTable ft = one_table(fp, grid), gt = one_table(gp, grid);
    const NodeTable Ph(phi, grid), Ps(psi, grid);
    if (norms) {
      r.nf_phi = creator_pairing(n, K, grid, S, 0, ft, Ph, true, ft, Ph).real();
      r.nfp_psi = creator_pairing(n, K, grid, S, n, gt, Ps, false, gt, Ps).real();
      r.nf_psi = creator_pairing(n, K, grid, S, 0, ft, Ps, true, ft, Ps).real();
      r.nfp_phi = creator_pairing(n, K, grid, S, n, gt, Ph, false, gt, Ph).real();
    } else {
      const cplx a = creator_pairing(n, K, grid, S, 0, ft, Ph, false, gt, Ps);
      const cplx b = creator_pairing(n, K, grid, S, n, gt, Ph, true, ft, Ps);
      r.up = a - b;
    }
  }
  if (n == 0) return r;

  // bound-state operators, sector n
  {
    ChiOptions co;
    co.allow_other_components = opt.allow_other_components;
    const FockVector vphi = FockVector::of(phi), vpsi = FockVector::of(psi);
    const std::array<WaveFunction, 4> X{only_term(apply_chi(f, vphi, co), n),
                                        only_term(apply_chi_prime_direct(g, vpsi, co), n),
                                        only_term(apply_chi_prime_direct(g, vphi, co), n),
                                        only_term(apply_chi(f, vpsi, co), n)};
    if (X[0].kernel && X[1].kernel && X[2].kernel && X[3].kernel) {
      // shifted test-function transforms make this integrand fine-scale
      const auto p = sector_pairings(X, axis_for(gauss.merged(fine_ext), q));
      r.mid = p[0] - p[1];
      r.nf_phi += p[2].real();
      r.nfp_psi += p[3].real();
      r.nfp_phi += p[4].real();
      r.nf_psi += p[5].real();
    } else {
      // no fusing component in the support; every term is zero
      r.mid = 0.0;
    }
  }

  // annihilators, sector n - 1
  {
    const WaveFunction fm = apply_j(transform_wave(m, f, -1)), gm = apply_j(transform_wave(m, g, -1));
    const FockVector vphi = FockVector::of(phi), vpsi = FockVector::of(psi);
    const std::array<WaveFunction, 4> X{only_term(apply_z(fm, vphi, q), n - 1), only_term(apply_z_prime(gm, vpsi, q), n - 1),
                                        only_term(apply_z_prime(gm, vphi, q), n - 1), only_term(apply_z(fm, vpsi, q), n - 1)};
    const auto p = sector_pairings(X, coarse);
    r.down = p[0] - p[1];
    r.nf_phi += p[2].real();
    r.nfp_psi += p[3].real();
    r.nfp_phi += p[4].real();
    r.nf_psi += p[5].real();
  }
  return r;
}

QuadSpec scaled_spec(const QuadSpec& q, int num, int den) {
  QuadSpec r = q;
  r.nodes_per_axis = std::max(2, q.nodes_per_axis * num / den);
  r.fine_nodes = std::max(2, q.fine_nodes * num / den);
  r.inner_nodes = std::max(2, q.inner_nodes * num / den);
  return r;
}

bool fast_path(const FockVector& Phi, const FockVector& Psi) {
  const auto sp = Phi.sector_list(), ss = Psi.sector_list();
  return sp.size() == 1 && ss == sp && sp[0] <= 2;
}

// Diagonal single-sector inputs: value parts at the given spec.
WeakCommResult diagonal_value(const TestFunction& f, const TestFunction& g, const FockVector& Phi,
                              const FockVector& Psi, const WeakCommOptions& opt) {
  const int n = Phi.sector_list()[0];
  const Parts p = diagonal_sector(f, g, Phi.sector(n), Psi.sector(n), opt, false);
  WeakCommResult res;
  res.creator_part = p.up;
  res.bound_state_part = p.mid;
  res.annihilator_part = p.down;
  res.value = p.up + p.mid + p.down;
  return res;
}

double diagonal_scale(const TestFunction& f, const TestFunction& g, const FockVector& Phi, const FockVector& Psi,
                      const WeakCommOptions& opt) {
  const int n = Phi.sector_list()[0];
  const Parts p = diagonal_sector(f, g, Phi.sector(n), Psi.sector(n), opt, true);
  return std::sqrt(std::max(0.0, p.nf_phi) * std::max(0.0, p.nfp_psi)) +
         std::sqrt(std::max(0.0, p.nfp_phi) * std::max(0.0, p.nf_psi));
}

// General vectors: literal pairings of the lazily composed outputs.
WeakCommResult generic(const TestFunction& f, const TestFunction& g, const FockVector& Phi, const FockVector& Psi,
                       const WeakCommOptions& opt) {
  WeakCommResult res;
  ChiOptions co;
  co.allow_other_components = opt.allow_other_components;
  const FockVector a = apply_fct(f, Phi, opt.quad, co), b = apply_fct_prime(g, Psi, opt.quad, co);
  const FockVector c = apply_fct_prime(g, Phi, opt.quad, co), d = apply_fct(f, Psi, opt.quad, co);
  res.value = inner_product(a, b, opt.quad).value - inner_product(c, d, opt.quad).value;
  const double na = inner_product(a, a, opt.quad).value.real(), nb = inner_product(b, b, opt.quad).value.real();
  const double nc = inner_product(c, c, opt.quad).value.real(), nd = inner_product(d, d, opt.quad).value.real();
  res.scale = std::sqrt(std::max(0.0, na * nb)) + std::sqrt(std::max(0.0, nc * nd));
  return res;
}

}  // namespace

WeakCommResult weak_commutator(const TestFunction& f, const TestFunction& g, const FockVector& Phi,
                               const FockVector& Psi, const WeakCommOptions& opt) {
  if (!Phi.model || !Psi.model) throw ConfigError("weak commutator needs nonempty vectors");
  require_weak_comm_inputs(*Psi.model, f, g, opt.allow_other_components);
  WeakCommResult r;
  const bool fast = fast_path(Phi, Psi);
  if (fast) {
    r = diagonal_value(f, g, Phi, Psi, opt);
    // the scale only normalizes, so its quadrature runs at half the nodes
    WeakCommOptions half = opt;
    half.quad = scaled_spec(opt.quad, 1, 2);
    r.scale = diagonal_scale(f, g, Phi, Psi, half);
  } else {
    r = generic(f, g, Phi, Psi, opt);
  }
  if (!opt.skip_error_estimate) {
    WeakCommOptions ref = opt;
    ref.quad = scaled_spec(opt.quad, 3, 4);
    const cplx other = fast ? diagonal_value(f, g, Phi, Psi, ref).value : generic(f, g, Phi, Psi, ref).value;
    r.error = std::abs(r.value - other);
  }
  r.normalized = r.scale > 0 ? std::abs(r.value) / r.scale : std::abs(r.value);
  r.normalized_error = r.scale > 0 ? r.error / r.scale : r.error;
  return r;
}

}  // namespace zfw
