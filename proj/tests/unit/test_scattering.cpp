#include <cmath>
#include <random>

#include "doctest.h"
#include "zfwedge/json_io.hpp"
#include "zfwedge/scattering.hpp"

using namespace zfw;

namespace {

// Product formula for the Z(N) components written out factor by factor,
// independent of the library's shifted-product construction.
cplx zn_literal(int N, int a, int b, cplx t) {
  cplx v = 1.0;
  const double u = kPi / N;
  for (int m = -(a - 1); m <= a - 1; m += 2) {
    v *= std::sinh(0.5 * (t + kI * u * double(b + m + 1))) * std::sinh(0.5 * (t + kI * u * double(b + m - 1)));
    v /= std::sinh(0.5 * (t - kI * u * double(b - m - 1))) * std::sinh(0.5 * (t - kI * u * double(b - m + 1)));
  }
  return v;
}

// lim_{z->p} (z - p) f(z) by symmetric differences and one Richardson step.
template <class F>
cplx limit_residue(F&& f, cplx p) {
  auto sym = [&](double h) {
    const cplx a = h * f(p + h);
    const cplx b = -h * f(p - h);
    return 0.5 * (a + b);
  };
  const double h = 1e-3;
  return (4.0 * sym(h / 2) - sym(h)) / 3.0;
}

std::vector<cplx> random_strip_points(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> re(-6.0, 6.0), im(0.05, kPi - 0.05);
  std::vector<cplx> pts;
  for (int i = 0; i < n; ++i) pts.emplace_back(re(rng), im(rng));
  return pts;
}

bool all_passed(const std::vector<VerificationReport>& rs) {
  bool ok = true;
  for (const auto& r : rs) {
    if (!r.passed) MESSAGE(r.check_id << " failed, max residual " << r.max_residual);
    ok = ok && r.passed;
  }
  return ok;
}

const VerificationReport& find_report(const std::vector<VerificationReport>& rs, const std::string& id) {
  for (const auto& r : rs) {
    if (r.check_id == id) return r;
  }
  throw std::runtime_error("missing report " + id);
}

}  // namespace

TEST_CASE("meromorphic expressions cancel, invert and shift") {
  const MeromorphicExpr f = MeromorphicExpr::block(cplx(0.3, 0.4), cplx(-0.2, 1.1));
  const MeromorphicExpr one = f * f.inverse();
  CHECK(one.is_constant());
  CHECK(std::abs(one.prefactor() - 1.0) < 1e-15);

  const cplx z(0.7, -0.25);
  CHECK(std::abs(f.shifted(cplx(0.1, 0.2))(z) - f(z + cplx(0.1, 0.2))) < 1e-14);

  // offsets far outside the fundamental strip reduce with a sign
  const MeromorphicExpr g = MeromorphicExpr::block(cplx(0.0, 0.5 + 2 * kPi), cplx(0.0, -0.9));
  const cplx direct = std::sinh(0.5 * (z - cplx(0.0, 0.5 + 2 * kPi))) / std::sinh(0.5 * (z - cplx(0.0, -0.9)));
  CHECK(std::abs(g(z) - direct) < 1e-14);
  for (cplx a : g.zeros()) CHECK(a.imag() <= kPi);
}

TEST_CASE("evaluation near a pole raises with the pole location") {
  const ScatteringData s = build_zn(3, 1.0);
  const cplx p(0.0, 2 * kPi / 3);
  try {
    (void)eval_component(s, 1, 1, p + 1e-11);
    FAIL("expected a pole hit");
  } catch (const PoleHit& e) {
    CHECK(std::abs(e.location - p) < 1e-9);
  }
  CHECK_NOTHROW((void)eval_component(s, 1, 1, p + 1e-6));
}

TEST_CASE("Z(N) components match the factor-by-factor product formula") {
  for (int N = 3; N <= 7; ++N) {
    const ScatteringData s = build_zn(N, 1.0);
    for (int a = 1; a < N; ++a) {
      for (int b = 1; b < N; ++b) {
        for (cplx z : random_strip_points(15, 100 + N)) {
          const cplx lit = zn_literal(N, a, b, z);
          CHECK(rel_residual(eval_component(s, a, b, z), lit) < 1e-11);
        }
      }
    }
  }
}

TEST_CASE("masses and fusion table of Z(N)") {
  const ScatteringData z3 = build_zn(3, 1.0);
  CHECK(std::fabs(z3.mass(1) - 1.0) < 1e-15);
  CHECK(std::fabs(z3.mass(2) - 1.0) < 1e-15);
  const ScatteringData z4 = build_zn(4, 1.0);
  CHECK(std::fabs(z4.mass(2) - std::sqrt(2.0)) < 1e-14);

  const FusionProcess* f = z3.fusion(1, 1);
  REQUIRE(f != nullptr);
  CHECK(f->result == 2);
  CHECK(std::fabs(f->angle_left - kPi / 3) < 1e-15);
  CHECK(std::fabs(f->angle() - 2 * kPi / 3) < 1e-15);
  const FusionProcess* g = z3.fusion(2, 2);
  REQUIRE(g != nullptr);
  CHECK(g->result == 1);

  CHECK(z4.fusion(1, 3) == nullptr);
  CHECK(z4.fusion(2, 2) == nullptr);

  // the third row of the table: charge conservation mod N
  const ScatteringData z5 = build_zn(5, 1.0);
  const FusionProcess* h = z5.fusion(3, 4);
  REQUIRE(h != nullptr);
  CHECK(h->result == 2);
  CHECK(std::fabs(h->angle() - 3 * kPi / 5) < 1e-14);
  CHECK(z5.component(3, 4).pole_order(cplx(0.0, 3 * kPi / 5)) == 1);
}

TEST_CASE("no-fusion pair of Z(4) has only the crossed-channel pole") {
  const ScatteringData s = build_zn(4, 1.0);
  const auto poles = s.component(1, 3).poles_in_strip(0.0, kPi);
  REQUIRE(poles.size() == 1);
  CHECK(std::abs(poles[0].location - cplx(0.0, kPi / 2)) < 1e-12);
  // (3 3) -> 2 fuses at i*pi/2, so the crossed pole sits at i*pi - i*pi/2
  REQUIRE(s.fusion(3, 3) != nullptr);
  CHECK(std::fabs(s.fusion(3, 3)->angle() - kPi / 2) < 1e-15);
}

TEST_CASE("elementary values of Z(3)") {
  const ScatteringData s = build_zn(3, 1.0);
  CHECK(std::abs(eval_component(s, 1, 1, 0.0) + 1.0) < 1e-15);
  for (cplx z : random_strip_points(20, 7)) {
    CHECK(rel_residual(eval_component(s, 1, 1, cplx(0.0, kPi) - z), eval_component(s, 2, 1, z)) < 1e-12);
  }
}

TEST_CASE("fusion residues against an independent limit") {
  for (int N = 3; N <= 8; ++N) {
    const ScatteringData s = build_zn(N, 1.0);
    const cplx p(0.0, 2 * kPi / N);
    const Residue r = residue_at(s, 1, 1, p);
    const cplx oracle = limit_residue([&](cplx z) { return zn_literal(N, 1, 1, z); }, p);
    CHECK(r.order == 1);
    CHECK(r.consistent);
    CHECK(std::abs(r.value - oracle) < 1e-8 * std::abs(oracle));
    // L'Hopital on the single vanishing denominator: 2 sinh(2 pi i / N)
    const cplx lhopital = 2.0 * std::sinh(cplx(0.0, 2 * kPi / N));
    CHECK(std::abs(r.value - lhopital) < 1e-12);
  }
  const ScatteringData z3 = build_zn(3, 1.0);
  const Residue r = residue_at(z3, 1, 1, cplx(0.0, 2 * kPi / 3));
  CHECK(std::abs(r.value - cplx(0.0, std::sqrt(3.0))) < 1e-12);

  // crossed channel: residue of S^{bar b a} at i pi - i theta_ab is -R
  const Residue rp = residue_at(z3, 2, 1, cplx(0.0, kPi / 3));
  CHECK(std::abs(rp.value + r.value) < 1e-12);
  CHECK_THROWS_AS(residue_at(z3, 1, 1, cplx(0.0, 0.5)), NotAPole);
}

TEST_CASE("higher-order poles fall back to the circle rule") {
  const ScatteringData s = build_zn(6, 1.0);
  // S^{22} of Z(6) has a double pole between the simple ones
  bool seen_double = false;
  for (const auto& pe : s.component(2, 2).poles_in_strip(0.0, kPi)) {
    if (pe.order == 2) {
      seen_double = true;
      const Residue r = residue_at(s, 2, 2, pe.location);
      CHECK(r.order == 2);
      // residue of a double pole = lim d/dz (z-p)^2 S; compare via a centred difference
      const double h = 1e-4;
      auto g = [&](cplx z) { return (z - pe.location) * (z - pe.location) * zn_literal(6, 2, 2, z); };
      const cplx deriv = (g(pe.location + h) - g(pe.location - h)) / (2 * h);
      CHECK(std::abs(r.value - deriv) < 1e-6 * std::max(1.0, std::abs(deriv)));
    }
  }
  CHECK(seen_double);
}

TEST_CASE("CDD dressing") {
  for (int N = 3; N <= 6; ++N) {
    const ScatteringData a = build_zn(N, 1.0);
    const ScatteringData b = build_cdd(N, 1.0, {});
    for (int i = 1; i < N; ++i) {
      for (int j = 1; j < N; ++j) {
        CHECK(a.component(i, j).zeros() == b.component(i, j).zeros());
        CHECK(a.component(i, j).poles() == b.component(i, j).poles());
        CHECK(a.component(i, j).prefactor() == b.component(i, j).prefactor());
      }
    }
  }
  const ScatteringData c = build_cdd(4, 1.0, {{3, 1, cplx(0.5, 0.0)}});
  CHECK(std::abs(eval_component(c, 1, 1, 0.0) + 1.0) < 1e-14);

  const ScatteringData d = build_cdd(5, 1.0, {{1, 2, cplx(1.4, 0.3)}});
  CHECK(bootstrap_identity_residual(d, random_strip_points(20, 3)) < 1e-10);

  CHECK_THROWS_AS(build_cdd(4, 1.0, {{1, 2, cplx(2.5, 0.1)}}), ConfigError);
  CHECK_THROWS_AS(build_cdd(4, 1.0, {{2, 2, cplx(2.0, 0.0)}}), ConfigError);
  CHECK_THROWS_AS(build_cdd(4, 1.0, {{3, 2, cplx(1.5, 0.0)}}), ConfigError);
  CHECK_THROWS_AS(build_cdd(4, 1.0, {{3, 1, cplx(0.5, 0.2)}}), ConfigError);
  CHECK_THROWS_AS(build_cdd(2, 1.0, {}), ConfigError);
  CHECK_THROWS_AS(build_zn(3, 0.0), ConfigError);
}

TEST_CASE("Toda amplitudes") {
  const ScatteringData t0 = build_toda(4, 1.0, 0.0);
  CHECK(t0.base_amplitude().is_constant());
  for (cplx z : random_strip_points(10, 9)) CHECK(std::abs(eval_component(t0, 1, 1, z) - 1.0) < 1e-14);

  const ScatteringData t = build_toda(3, 1.0, 0.4);
  for (int i = 0; i < 50; ++i) {
    const double x = -12.0 + 24.0 * i / 49.0;
    CHECK(std::fabs(std::abs(eval_component(t, 1, 1, x)) - 1.0) < 1e-12);
  }
  const auto poles = t.component(1, 1).poles_in_strip(0.0, kPi);
  REQUIRE(poles.size() == 1);
  CHECK(std::abs(poles[0].location - cplx(0.0, 2 * kPi / 3)) < 1e-12);

  CHECK_THROWS_AS(build_toda(3, 1.0, 1.2), ConfigError);
  CHECK_THROWS_AS(build_toda(3, 1.0, -0.1), ConfigError);
}

TEST_CASE("invariants hold across the model set") {
  std::vector<ScatteringData> models;
  for (int N = 3; N <= 6; ++N) models.push_back(build_zn(N, 1.0));
  models.push_back(build_toda(3, 1.0, 0.4));
  models.push_back(build_toda(4, 1.0, 1.0));
  models.push_back(build_cdd(5, 1.0, {{1, 2, cplx(1.4, 0.3)}}));
  for (const auto& s : models) {
    for (int a = 1; a < s.N; ++a) {
      for (int b = 1; b < s.N; ++b) {
        for (int i = 0; i < 25; ++i) {
          const double x = -15.0 + 30.0 * i / 24.0 + 0.01;
          CHECK(std::fabs(std::abs(s.S(a, b, x)) - 1.0) < 1e-12);
        }
        for (cplx z : random_strip_points(5, 11)) {
          CHECK(rel_residual(s.S(a, b, z + cplx(0.0, 2 * kPi)), s.S(a, b, z)) < 1e-13);
        }
      }
    }
    CHECK(bootstrap_identity_residual(s, random_strip_points(20, 21)) < 1e-10);
  }
}

TEST_CASE("axiom audits") {
  CHECK(all_passed(check_axioms(build_zn(3, 1.0))));
  const auto z4 = check_axioms(build_zn(4, 1.0));
  CHECK(all_passed(z4));
  CHECK(find_report(z4, "S6").passed);

  // the specific bootstrap instance for (1 1) -> 2 with spectator 1
  const ScatteringData s = build_zn(4, 1.0);
  for (cplx z : random_strip_points(10, 5)) {
    const cplx rhs = s.S(1, 1, z + cplx(0.0, kPi / 4)) * s.S(1, 1, z - cplx(0.0, kPi / 4));
    CHECK(rel_residual(s.S(2, 1, z), rhs) < 1e-10);
  }

  const ScatteringData t = build_toda(3, 1.0, 0.4);
  CHECK(all_passed(check_axioms(t)));
  CHECK(all_passed(check_axioms(build_toda(4, 1.0, 0.7))));
}

TEST_CASE("zero coupling Toda loses its bound-state pole") {
  const auto reports = check_axioms(build_toda(3, 1.0, 0.0));
  CHECK_FALSE(find_report(reports, "S7").passed);
  CHECK_FALSE(find_report(reports, "S8").passed);
  CHECK(find_report(reports, "S1").passed);
}

TEST_CASE("relation audits") {
  for (int N = 3; N <= 6; ++N) CHECK(all_passed(check_relations(build_zn(N, 1.0))));
  CHECK(all_passed(check_relations(build_toda(3, 1.0, 0.4))));
  CHECK(all_passed(check_relations(build_cdd(5, 1.0, {{1, 2, cplx(1.4, 0.3)}}))));

  const ScatteringData z4 = build_zn(4, 1.0);
  CHECK(std::fabs(z4.fusion(1, 2)->angle_left + z4.fusion(3, 2)->angle_left - kPi) < 1e-15);

  const ScatteringData z3 = build_zn(3, 1.0);
  CHECK(std::abs(z3.fusion_residue(1, 1, 2) - z3.fusion_residue(2, 2, 1)) < 1e-12);
  CHECK(std::abs(z3.fusion_residue(1, 1, 2) - 2.0 * kI * std::sin(2 * kPi / 3)) < 1e-12);
  CHECK(z3.fusion_residue(1, 2, 1) == cplx(0.0, 0.0));

  for (int N = 3; N <= 8; ++N) {
    const ScatteringData s = build_zn(N, 1.0);
    const auto chain = elementary_chain(s);
    CHECK(static_cast<int>(chain.size()) == N - 1);
    for (std::size_t k = 1; k <= chain.size(); ++k) {
      // sinh(i k x) / sinh(i x) = sin(k x) / sin(x)
      const cplx ratio = std::sinh(cplx(0.0, k * kPi / N)) / std::sinh(cplx(0.0, kPi / N));
      CHECK(std::abs(s.mass(chain[k - 1]) - s.mass(1) * ratio) < 1e-13);
    }
  }
}

TEST_CASE("model json round trip") {
  const ScatteringData s = build_cdd(5, 1.3, {{1, 2, cplx(1.4, 0.3)}});
  const json j = model_to_json(s);
  CHECK(j["family"] == "cdd");
  CHECK(j["derived"]["masses"].size() == 4);
  const ScatteringData back = model_from_json(j);
  CHECK(back.component(2, 3).poles() == s.component(2, 3).poles());
  CHECK_THROWS_AS(model_from_json(json{{"N", 4}, {"family", "bogus"}}), ConfigError);
}
