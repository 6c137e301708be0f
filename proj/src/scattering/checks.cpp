#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "zfwedge/scattering.hpp"

namespace zfw {

double rel_residual(cplx a, cplx b) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) / scale;
}

void VerificationReport::record(cplx point, double residual) {
  if (!(residual <= max_residual)) max_residual = residual;
  if ((!(residual <= tolerance)) && witnesses.size() < 8) witnesses.emplace_back(point, residual);
}

void VerificationReport::finish() { passed = max_residual <= tolerance; }

namespace {

VerificationReport make_report(const std::string& id, double tol) {
  VerificationReport r;
  r.check_id = id;
  r.tolerance = tol;
  return r;
}

std::vector<cplx> strip_grid(const GridSpec& g) {
  std::vector<cplx> pts;
  for (int i = 0; i < g.re_count; ++i) {
    const double x = g.re_min + (g.re_max - g.re_min) * i / (g.re_count - 1) + g.re_offset;
    for (int j = 0; j < g.im_count; ++j) {
      const double y = kPi * (j + 0.5) / g.im_count;
      pts.emplace_back(x, y);
    }
  }
  return pts;
}

// Runs an identity check over the grid; evaluation at a pole counts as a failure.
template <class F>
void grid_identity(VerificationReport& r, const std::vector<cplx>& grid, F&& pair_at) {
  for (cplx z : grid) {
    try {
      const auto [lhs, rhs] = pair_at(z);
      r.record(z, rel_residual(lhs, rhs));
    } catch (const PoleHit& e) {
      r.record(z, std::numeric_limits<double>::infinity());
      r.notes.push_back(std::string("pole hit: ") + e.what());
    }
  }
}

std::optional<cplx> try_residue(const ScatteringData& s, int a, int b, cplx p) {
  const MeromorphicExpr& e = s.component(a, b);
  if (e.pole_order(p) != 1) return std::nullopt;
  return e.residue(p).value;
}

bool has_simple_pole(const MeromorphicExpr& e, cplx p) { return e.pole_order(p) == 1; }

}  // namespace

std::vector<VerificationReport> check_axioms(const ScatteringData& s, const GridSpec& g) {
  const int K = s.count();
  const double tol = g.tolerance;
  const std::vector<cplx> grid = strip_grid(g);
  std::vector<VerificationReport> out;

  auto S = [&](int a, int b, cplx z) { return s.S(a, b, z); };

  VerificationReport s1 = make_report("S1", tol);
  VerificationReport s2 = make_report("S2", tol);
  VerificationReport s3 = make_report("S3", tol);
  VerificationReport s4 = make_report("S4", tol);
  VerificationReport s5 = make_report("S5", tol);
  for (int a = 1; a <= K; ++a) {
    for (int b = 1; b <= K; ++b) {
      grid_identity(s1, grid, [&](cplx z) {
        return std::pair{1.0 / S(a, b, z), std::conj(S(b, a, std::conj(z)))};
      });
      grid_identity(s2, grid, [&](cplx z) { return std::pair{S(a, b, z), S(b, a, z)}; });
      grid_identity(s3, grid, [&](cplx z) { return std::pair{S(a, b, z), 1.0 / S(b, a, -z)}; });
      grid_identity(s4, grid, [&](cplx z) {
        return std::pair{S(a, b, cplx(0.0, kPi) - z), S(s.conj(b), a, z)};
      });
      grid_identity(s5, grid, [&](cplx z) { return std::pair{S(a, b, z), S(s.conj(a), s.conj(b), z)}; });
    }
  }
  for (auto* r : {&s1, &s2, &s3, &s4, &s5}) {
    r->grid = grid;
    r->finish();
    out.push_back(std::move(*r));
  }

  VerificationReport s6 = make_report("S6", tol);
  for (const auto& f : s.fusions()) {
    for (int nu = 1; nu <= K; ++nu) {
      grid_identity(s6, grid, [&](cplx z) {
        return std::pair{S(f.result, nu, z),
                         S(f.left, nu, z + cplx(0.0, f.angle_left)) * S(f.right, nu, z - cplx(0.0, f.angle_right))};
      });
    }
  }
  s6.grid = grid;
  s6.finish();
  out.push_back(std::move(s6));

  // Pole inventory against the fusion table: s-channel and t-channel poles
  // are simple; every simple pole in the open strip is one of them.
  VerificationReport s7 = make_report("S7", tol);
  for (int a = 1; a <= K; ++a) {
    for (int b = 1; b <= K; ++b) {
      const MeromorphicExpr& e = s.component(a, b);
      std::vector<cplx> expected;
      if (const FusionProcess* f = s.fusion(a, b)) {
        const cplx p(0.0, f->angle());
        s7.record(p, has_simple_pole(e, p) ? 0.0 : 1.0);
        expected.push_back(p);
      }
      if (const FusionProcess* t = s.fusion(b, s.conj(a))) {
        const cplx p(0.0, kPi - t->angle());
        s7.record(p, has_simple_pole(e, p) ? 0.0 : 1.0);
        expected.push_back(p);
      }
      for (const PoleEntry& pe : e.poles_in_strip(0.0, kPi)) {
        if (pe.order != 1) continue;
        bool known = false;
        for (cplx p : expected) known = known || std::abs(p - pe.location) < 1e-9;
        s7.record(pe.location, known ? 0.0 : 1.0);
      }
    }
  }
  s7.finish();
  out.push_back(std::move(s7));

  VerificationReport s8 = make_report("S8", tol);
  for (int a = 1; a <= K; ++a) {
    grid_identity(s8, {cplx(0.0, 0.0)}, [&](cplx z) { return std::pair{S(a, a, z), cplx(-1.0, 0.0)}; });
  }
  s8.grid = {cplx(0.0, 0.0)};
  s8.finish();
  out.push_back(std::move(s8));

  // Finite surrogate of the band bound: no pole in the closed band and a finite
  // grid supremum. Zeros are counted inside |Re| <= band_re_max.
  VerificationReport s9 = make_report("S9", tol);
  const double eps = kPi / (4.0 * s.N);
  double sup = 0.0;
  int band_poles = 0;
  int zero_count = 0;
  for (int a = 1; a <= K; ++a) {
    for (int b = 1; b <= K; ++b) {
      const MeromorphicExpr& e = s.component(a, b);
      for (const PoleEntry& pe : e.poles_in_strip(-eps - 1e-12, eps + 1e-12)) {
        if (std::fabs(pe.location.real()) <= g.band_re_max) {
          band_poles += pe.order;
          s9.record(pe.location, 1.0);
        }
      }
      for (const PoleEntry& ze : e.zeros_in_strip(-kPi, kPi)) {
        if (std::fabs(ze.location.real()) <= g.band_re_max) zero_count += ze.order;
      }
      for (int i = 0; i < g.band_re_count; ++i) {
        const double x = -g.band_re_max + 2.0 * g.band_re_max * i / (g.band_re_count - 1);
        for (int j = 0; j < g.band_im_count; ++j) {
          const double y = -eps + 2.0 * eps * j / (g.band_im_count - 1);
          const double v = std::abs(e.eval_unguarded(cplx(x, y)));
          if (!std::isfinite(v)) {
            s9.record(cplx(x, y), std::numeric_limits<double>::infinity());
          } else {
            sup = std::max(sup, v);
          }
        }
      }
    }
  }
  s9.record(cplx(0.0, 0.0), 0.0);
  s9.extras["sup_norm"] = sup;
  s9.extras["band_halfwidth"] = eps;
  s9.extras["band_poles"] = band_poles;
  s9.extras["zero_count_window"] = zero_count;
  s9.finish();
  out.push_back(std::move(s9));
  return out;
}

std::vector<VerificationReport> check_relations(const ScatteringData& s, double tol) {
  const int K = s.count();
  std::vector<VerificationReport> out;
  auto angle_point = [](double a) { return cplx(0.0, a); };

  VerificationReport closure = make_report("fusion_closure", tol);
  VerificationReport parallelogram = make_report("mass_parallelogram", tol);
  VerificationReport p1 = make_report("P1", tol);
  VerificationReport p2 = make_report("P2", tol);
  VerificationReport p3 = make_report("P3", tol);
  VerificationReport p4 = make_report("P4", tol);
  VerificationReport p5 = make_report("P5", tol);
  VerificationReport rescheck = make_report("residue_crosscheck", 1e-8);

  auto residue_or_fail = [&](VerificationReport& r, int a, int b, cplx p) -> std::optional<cplx> {
    auto v = try_residue(s, a, b, p);
    if (!v) {
      r.record(p, 1.0);
      r.notes.push_back("no simple pole of S^{" + std::to_string(a) + "," + std::to_string(b) + "} at " +
                        format_cplx(p));
    }
    return v;
  };

  for (const auto& f : s.fusions()) {
    const int a = f.left, b = f.right, c = f.result;
    const cplx at = angle_point(f.angle());

    // closure of the table under the required moves
    auto present = [&](int x, int y, int z) {
      const FusionProcess* q = s.fusion(x, y);
      return q != nullptr && q->result == z;
    };
    closure.record(at, present(b, a, c) ? 0.0 : 1.0);
    closure.record(at, present(c, s.conj(a), b) ? 0.0 : 1.0);
    closure.record(at, present(c, s.conj(b), a) ? 0.0 : 1.0);
    closure.record(at, present(s.conj(a), s.conj(b), s.conj(c)) ? 0.0 : 1.0);
    closure.record(at, (f.angle_left > 0 && f.angle_left < kPi && f.angle_right > 0 && f.angle_right < kPi) ? 0.0 : 1.0);

    // p_{m_a}(i theta_(ab)) + p_{m_b}(-i theta_(ba)) = p_{m_c}(0), with p_m(z) = m (cosh z, sinh z)
    const cplx za(0.0, f.angle_left), zb(0.0, -f.angle_right);
    const cplx e0 = s.mass(a) * std::cosh(za) + s.mass(b) * std::cosh(zb);
    const cplx e1 = s.mass(a) * std::sinh(za) + s.mass(b) * std::sinh(zb);
    parallelogram.record(at, rel_residual(e0, s.mass(c)));
    parallelogram.record(at, rel_residual(e1, 0.0));

    const FusionProcess* fc = s.fusion(s.conj(a), s.conj(b));
    const FusionProcess* fg = s.fusion(c, s.conj(b));
    if (fc == nullptr || fg == nullptr) continue;  // already reported by closure

    p1.record(at, rel_residual(f.angle_left, fc->angle_left));
    p1.record(at, rel_residual(f.angle(), fc->angle()));
    p2.record(at, rel_residual(f.angle_left, fg->angle_left));
    p2.record(at, rel_residual(fg->angle(), kPi - f.angle_right));

    const auto R = residue_or_fail(p1, a, b, at);
    const auto Rc = residue_or_fail(p1, s.conj(a), s.conj(b), angle_point(fc->angle()));
    if (R && Rc) p1.record(at, rel_residual(*R, *Rc));

    const cplx tpole = cplx(0.0, kPi) - at;
    const auto Rp = residue_or_fail(p3, s.conj(b), a, tpole);
    if (R && Rp) p3.record(tpole, rel_residual(*Rp, -*R));

    const auto Rg = residue_or_fail(p4, c, s.conj(b), angle_point(fg->angle()));
    if (R && Rg) p4.record(at, rel_residual(*Rg, *R));

    if (s.component(a, b).pole_order(at) == 1) {
      const ResidueValue rv = s.component(a, b).residue(at);
      rescheck.record(at, std::abs(rv.value - rv.circle_value) / std::max(std::abs(rv.value), 1e-300));
    }
  }
  for (int a = 1; a <= K; ++a) {
    for (int b = 1; b <= K; ++b) {
      const FusionProcess* f = s.fusion(a, b);
      const bool self = f != nullptr && (f->result == a || f->result == b);
      p5.record(cplx(a, b), self ? 1.0 : 0.0);
    }
    p5.record(cplx(a, s.conj(a)), s.fusion(a, s.conj(a)) != nullptr ? 1.0 : 0.0);
  }

  // Elementary-particle relations along the chain v^k
  VerificationReport p6 = make_report("P6", tol);
  const int v = s.elementary;
  const std::vector<int> chain = elementary_chain(s);
  for (std::size_t k = 1; k <= chain.size(); ++k) {
    const int vk = chain[k - 1];
    const double expected_mass = s.mass(v) * std::sin(k * s.theta0) / std::sin(s.theta0);
    p6.record(cplx(static_cast<double>(k), 0.0), rel_residual(s.mass(vk), expected_mass));
    if (k < chain.size()) {
      const FusionProcess* f = s.fusion(vk, v);
      const FusionProcess* g = s.fusion(v, vk);
      p6.record(cplx(static_cast<double>(k), 1.0), f ? rel_residual(f->angle_left, s.theta0) : 1.0);
      p6.record(cplx(static_cast<double>(k), 2.0), g ? rel_residual(g->angle_left, k * s.theta0) : 1.0);
    }
  }
  p6.extras["chain_length"] = static_cast<double>(chain.size());

  VerificationReport e_simple = make_report("E_simple_poles", tol);
  VerificationReport e_max = make_report("E_maximal_analyticity", tol);
  VerificationReport e_angle = make_report("E_angle_constant", tol);
  VerificationReport e_sum = make_report("E_angle_sum", tol);
  VerificationReport e_comp = make_report("E_composite", tol);
  VerificationReport e_kappa = make_report("E_kappa_unique", tol);
  VerificationReport e_pos = make_report("E_positive_residue", tol);

  const int vb = s.conj(v);
  for (int b = 1; b <= K; ++b) {
    const MeromorphicExpr& e = s.component(v, b);
    for (const PoleEntry& pe : e.poles_in_strip(-kPi, kPi + 1e-12)) {
      e_simple.record(pe.location, pe.order == 1 ? 0.0 : 1.0);
    }
    const auto strip = e.poles_in_strip(0.0, kPi);
    for (const PoleEntry& pe : strip) {
      bool ok = false;
      if (const FusionProcess* f = s.fusion(v, b)) ok = ok || std::abs(pe.location - angle_point(f->angle())) < 1e-9;
      if (const FusionProcess* t = s.fusion(b, vb)) {
        ok = ok || std::abs(pe.location - angle_point(kPi - t->angle())) < 1e-9;
      }
      e_max.record(pe.location, ok && pe.order == 1 ? 0.0 : 1.0);
    }
    e_max.record(cplx(b, 0.0), strip.size() <= 2 ? 0.0 : 1.0);
  }

  for (int a = 1; a <= K; ++a) {
    const FusionProcess* fv = s.fusion(a, v);
    const FusionProcess* fvb = s.fusion(a, vb);
    if (fv) e_angle.record(cplx(a, 0.0), rel_residual(fv->angle_left, s.theta0));
    if (fv && fvb) e_angle.record(cplx(a, 1.0), rel_residual(fv->angle_left, fvb->angle_left));
    if (a != v && a != vb) {
      const FusionProcess* gv = s.fusion(v, a);
      const FusionProcess* gvb = s.fusion(vb, a);
      e_sum.record(cplx(a, 0.0), gv && gvb ? rel_residual(gv->angle_left + gvb->angle_left, kPi) : 1.0);
    }
    bool reached = false;
    for (int c : chain) reached = reached || c == a;
    e_comp.record(cplx(a, 0.0), reached ? 0.0 : 1.0);
  }

  if (const FusionProcess* vv = s.fusion(v, v)) {
    const int kappa = vv->result;
    // theta_(kappa v) equals the universal angle theta0 even when (kappa v) does not fuse
    const double top = s.theta0;
    for (int b = 1; b <= K; ++b) {
      const bool pole_here = !s.component(b, v).poles_in_strip(-1e-12, top + 1e-12).empty();
      e_kappa.record(cplx(b, 0.0), (pole_here == (b == kappa)) ? 0.0 : 1.0);
    }
  } else {
    e_kappa.record(cplx(v, v), 1.0);
  }

  for (const auto& f : s.fusions()) {
    const bool involves = f.right == v || f.right == vb || f.left == v || f.left == vb;
    if (!involves) continue;
    const cplx at = angle_point(f.angle());
    const auto R = residue_or_fail(e_pos, f.left, f.right, at);
    if (!R) continue;
    const double mag = std::abs(*R);
    const double resid = R->imag() > 0.0 ? std::fabs(R->real()) / std::max(mag, 1e-300) : 1.0;
    e_pos.record(at, resid);
  }

  for (auto* r : {&closure, &parallelogram, &p1, &p2, &p3, &p4, &p5, &p6, &e_simple, &e_max, &e_angle, &e_sum,
                  &e_comp, &e_kappa, &e_pos, &rescheck}) {
    r->finish();
    out.push_back(std::move(*r));
  }
  return out;
}

double bootstrap_identity_residual(const ScatteringData& s, const std::vector<cplx>& points) {
  const MeromorphicExpr& base = s.base_amplitude();
  double worst = 0.0;
  for (cplx z : points) {
    cplx prod = 1.0;
    for (int j = 0; j < s.N; ++j) prod *= base(z + cplx(0.0, 2 * kPi * j / s.N));
    worst = std::max(worst, std::abs(prod - 1.0));
  }
  return worst;
}

}  // namespace zfw
