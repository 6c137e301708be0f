#include <cmath>

#include "zfwedge/wavefn.hpp"

namespace zfw {

namespace {

constexpr double kPoleNudge = 1e-6;

// On a pole hit, average over a small symmetric nudge along a direction that
// differs per coordinate, so coincident-difference poles are avoided too.
cplx guarded(const std::function<cplx(const cplx*)>& F, std::vector<cplx>& pt) {
  try {
    return F(pt.data());
  } catch (const PoleHit&) {
    const std::vector<cplx> base = pt;
    cplx sum = 0.0;
    for (double s : {1.0, -1.0}) {
      for (std::size_t k = 0; k < pt.size(); ++k) pt[k] = base[k] + s * kPoleNudge * (1.0 + 0.37 * k);
      sum += F(pt.data());
    }
    pt = base;
    return 0.5 * sum;
  }
}

cplx grid_sum(const std::vector<Axis>& axes, const std::function<cplx(const cplx*)>& F) {
  const std::size_t d = axes.size();
  if (d == 0) return F(nullptr);
  std::vector<std::vector<double>> x(d), w(d);
  for (std::size_t k = 0; k < d; ++k) mapped_rule(axes[k], x[k], w[k]);
  std::size_t inner = 1;
  for (std::size_t k = 1; k < d; ++k) inner *= static_cast<std::size_t>(axes[k].nodes);
  std::vector<cplx> partial(axes[0].nodes);
  parallel_for(partial.size(), [&](std::size_t i) {
    std::vector<cplx> vals(inner);
    std::vector<cplx> pt(d);
    std::vector<int> ix(d, 0);
    pt[0] = x[0][i];
    for (std::size_t j = 0; j < inner; ++j) {
      double wt = 1.0;
      for (std::size_t k = 1; k < d; ++k) {
        pt[k] = x[k][ix[k]];
        wt *= w[k][ix[k]];
      }
      vals[j] = wt * guarded(F, pt);
      for (std::size_t k = d - 1; k >= 1; --k) {
        if (++ix[k] < axes[k].nodes) break;
        ix[k] = 0;
      }
    }
    partial[i] = w[0][i] * pairwise_sum(vals.data(), vals.size());
  });
  return pairwise_sum(partial.data(), partial.size());
}

}  // namespace

Axis axis_for(const Extent& e, const QuadSpec& q, bool inner) {
  const auto [lo, hi] = e.window(q.L_widths);
  const int nodes = e.fine ? q.fine_nodes : (inner ? q.inner_nodes : q.nodes_per_axis);
  return Axis{lo, hi, nodes};
}

QuadResult integrate_grid(const std::vector<Axis>& axes, const std::function<cplx(const cplx*)>& F) {
  std::vector<Axis> half = axes;
  for (Axis& a : half) a.nodes = std::max(2, a.nodes / 2);
  const cplx full = grid_sum(axes, F);
  const cplx coarse = axes.empty() ? full : grid_sum(half, F);
  return {full, std::abs(full - coarse)};
}

QuadResult inner_product(const WaveFunction& phi, const WaveFunction& psi, const QuadSpec& q) {
  if (phi.n != psi.n) throw ConfigError("inner product of different particle numbers");
  const int n = psi.n;
  if (n == 0) return {std::conj(phi.eval(nullptr, nullptr)) * psi.eval(nullptr, nullptr), 0.0};
  std::vector<int> tuples;
  for_each_tuple(n, psi.species(), [&](const int* idx) { tuples.insert(tuples.end(), idx, idx + n); });
  const std::size_t count = tuples.size() / n;
  const Axis axis = axis_for(phi.extent.merged(psi.extent), q);
  auto F = [&](const cplx* z) {
    cplx s = 0.0;
    for (std::size_t t = 0; t < count; ++t) {
      const int* idx = tuples.data() + t * n;
      const cplx b = psi.eval(idx, z);
      if (b == 0.0) continue;
      s += std::conj(phi.eval(idx, z)) * b;
    }
    return s;
  };
  return integrate_grid(std::vector<Axis>(n, axis), F);
}

QuadResult inner_product(const FockVector& a, const FockVector& b, const QuadSpec& q) {
  QuadResult r{0.0, 0.0};
  for (const auto& [n, list] : a.sectors) {
    if (!b.sectors.count(n) || list.empty() || b.sectors.at(n).empty()) continue;
    const QuadResult s = inner_product(a.sector(n), b.sector(n), q);
    r.value += s.value;
    r.error += s.error;
  }
  return r;
}

}  // namespace zfw
