#include "zfwedge/scenario.hpp"

#include <random>

namespace zfw {

namespace {

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  // 53-bit uniform in [lo, hi); the mapping is fixed so draws agree across builds.
  double uniform(double lo, double hi) { return lo + (hi - lo) * double(rng_() >> 11) * 0x1.0p-53; }
  cplx phase_weight() { return std::polar(uniform(0.5, 1.0), uniform(-kPi, kPi)); }

 private:
  std::mt19937_64 rng_;
};

std::pair<TestFunction, TestFunction> draw_bumps(const ScatteringData& s, Draw& d) {
  const int u = s.elementary, ub = s.conj(u);
  const cplx w = d.phase_weight(), v = d.phase_weight();
  // support stays at least 0.8 away from the wedge edges
  const Point2 fc{d.uniform(-0.3, 0.3), d.uniform(-3.4, -2.8)};
  const Point2 fr{d.uniform(0.6, 0.9), d.uniform(0.7, 1.0)};
  const Point2 gc{d.uniform(-0.3, 0.3), d.uniform(2.8, 3.4)};
  const Point2 gr{d.uniform(0.6, 0.9), d.uniform(0.7, 1.0)};
  std::map<int, cplx> fw{{u, w}}, gw{{u, v}};
  if (ub != u) {
    fw[ub] = std::conj(w);
    gw[ub] = std::conj(v);
  }
  return {make_wedge_bump(s, Wedge::Left, fc, fr, fw), make_wedge_bump(s, Wedge::Right, gc, gr, gw)};
}

GaussianSlot draw_slot(const ScatteringData& s, Draw& d, const std::vector<int>& species) {
  GaussianSlot g;
  g.center = d.uniform(-0.6, 0.6);
  g.width = d.uniform(0.7, 1.2);
  for (int a : species) {
    if (a >= 1 && a <= s.count()) g.weights[a] = d.phase_weight();
  }
  return g;
}

}  // namespace

CommutatorCase draw_commutator_case(const ScatteringData& s, int n, std::uint64_t seed, bool zero_factor) {
  if (n < 1 || n > kMaxParticles) throw ConfigError("particle number out of range");
  Draw d(seed);
  auto [f, g] = draw_bumps(s, d);
  std::vector<int> all;
  for (int a = 1; a <= s.count(); ++a) all.push_back(a);
  std::vector<GaussianSlot> a, b;
  for (int k = 0; k < n; ++k) a.push_back(draw_slot(s, d, all));
  for (int k = 0; k < n; ++k) b.push_back(draw_slot(s, d, all));
  D0Options o;
  o.zero_factor = zero_factor;
  return {f, g, make_d0_vector(s, a, o), make_d0_vector(s, b, o)};
}

CommutatorCase pair_component_case(const ScatteringData& s, std::uint64_t seed, bool zero_factor) {
  Draw d(seed);
  auto [f, g] = draw_bumps(s, d);
  const int u = s.elementary, ub = s.conj(u);
  // one slot per species; symmetrization then fills only (u, ub) and (ub, u)
  const std::vector<GaussianSlot> a{draw_slot(s, d, {u}), draw_slot(s, d, {ub})};
  const std::vector<GaussianSlot> b{draw_slot(s, d, {u}), draw_slot(s, d, {ub})};
  D0Options o;
  o.zero_factor = zero_factor;
  return {f, g, make_d0_vector(s, a, o), make_d0_vector(s, b, o)};
}

WeakCommResult run_case(const CommutatorCase& c, const WeakCommOptions& opt) {
  return weak_commutator(c.f, c.g, FockVector::of(c.phi), FockVector::of(c.psi), opt);
}

json commutator_manifest(const ScatteringData& s, const CommutatorCase& c, const WeakCommOptions& opt,
                         const WeakCommResult& r) {
  json j;
  j["model"] = model_to_json(s);
  j["f_spec"] = testfn_to_json(c.f);
  j["g_spec"] = testfn_to_json(c.g);
  j["phi_spec"] = wavefn_to_json(c.phi);
  j["psi_spec"] = wavefn_to_json(c.psi);
  j["quad"] = quad_to_json(opt.quad);
  j["results"] = {{"value", cplx_json(r.value)},
                  {"error_estimate", r.error},
                  {"scale", r.scale},
                  {"normalized", r.normalized},
                  {"normalized_error", r.normalized_error},
                  {"creator_part", cplx_json(r.creator_part)},
                  {"bound_state_part", cplx_json(r.bound_state_part)},
                  {"annihilator_part", cplx_json(r.annihilator_part)}};
  return j;
}

}  // namespace zfw
