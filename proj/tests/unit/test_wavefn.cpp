#include <cmath>
#include <random>

#include "doctest.h"
#include "zfwedge/json_io.hpp"
#include "zfwedge/wavefn.hpp"

using namespace zfw;

namespace {

std::vector<GaussianSlot> two_slots() {
  return {{-0.4, 0.9, {{1, 1.0}, {2, cplx(0.3, 0.5)}}}, {0.7, 1.2, {{1, cplx(0.2, -0.4)}, {2, 0.8}}}};
}

std::vector<GaussianSlot> three_slots() {
  return {{-0.6, 0.8, {{1, 1.0}, {2, 0.5}}}, {0.2, 1.0, {{1, cplx(0.0, 0.7)}, {2, 1.0}}}, {0.9, 0.7, {{2, 1.0}}}};
}

std::vector<cplx> random_reals(std::mt19937_64& rng, int n, double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<cplx> z(n);
  for (auto& v : z) v = u(rng);
  return z;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max({1e-300, std::abs(a), std::abs(b)}); }

}  // namespace

TEST_CASE("symmetrizer on one and two particles") {
  const ScatteringData s = build_zn(3, 1.0);
  const Model m = share(s);
  const WaveFunction b1 = gaussian_product(m, {two_slots()[0]});
  const WaveFunction p1 = symmetrize(b1);
  CHECK(std::abs(p1({2}, {cplx(0.3, 0.1)}) - b1({2}, {cplx(0.3, 0.1)})) == 0.0);

  const WaveFunction b = gaussian_product(m, two_slots());
  const WaveFunction p = symmetrize(b);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    const auto z = random_reals(rng, 2);
    for (int a = 1; a <= 2; ++a) {
      for (int c = 1; c <= 2; ++c) {
        // written out for n = 2
        const cplx oracle = 0.5 * (b({a, c}, {z[0], z[1]}) + s.S(a, c, z[1] - z[0]) * b({c, a}, {z[1], z[0]}));
        CHECK(rel(p({a, c}, z), oracle) < 1e-14);
        const cplx swapped = s.S(a, c, z[1] - z[0]) * p({c, a}, {z[1], z[0]});
        CHECK(rel(p({a, c}, z), swapped) < 1e-10);
      }
    }
  }
}

TEST_CASE("symmetric group action") {
  const ScatteringData s = build_zn(4, 1.0);
  const Model m = share(s);
  const WaveFunction b = gaussian_product(m, three_slots());
  CHECK(permutation_words(3).size() == 6);
  CHECK(permutation_words(4).size() == 24);
  CHECK(cyclic_word(3) == std::vector<int>{2, 1});
  CHECK(cyclic_word_prime(4, 3) == std::vector<int>{2, 3});
  const WaveFunction yb1 = apply_word(b, {1, 2, 1});
  const WaveFunction yb2 = apply_word(b, {2, 1, 2});
  const WaveFunction sq = apply_word(b, {2, 2});
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10; ++i) {
    const auto z = random_reals(rng, 3);
    for_each_tuple(3, 3, [&](const int* idx) {
      const std::vector<int> a(idx, idx + 3);
      CHECK(rel(yb1(a, z), yb2(a, z)) < 1e-12);
      CHECK(rel(sq(a, z), b(a, z)) < 1e-12);
    });
  }
  CHECK_THROWS_AS(apply_transposition(b, 3), ConfigError);
}

TEST_CASE("projection is idempotent and bounded in size") {
  const ScatteringData s = build_zn(3, 1.0);
  const Model m = share(s);
  const WaveFunction p = symmetrize(gaussian_product(m, three_slots()));
  const WaveFunction pp = symmetrize(p);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 10; ++i) {
    const auto z = random_reals(rng, 3);
    for_each_tuple(3, 2, [&](const int* idx) {
      const std::vector<int> a(idx, idx + 3);
      CHECK(rel(pp(a, z), p(a, z)) < 1e-10);
    });
  }
  CHECK(s_symmetry_residual(p, 20, 1) < 1e-10);
  std::vector<GaussianSlot> four = three_slots();
  four.push_back(four[0]);
  CHECK_THROWS_AS(symmetrize(gaussian_product(m, four)), ConfigError);
}

TEST_CASE("projection is self-adjoint under the quadrature inner product") {
  const ScatteringData s = build_zn(3, 1.0);
  const Model m = share(s);
  const WaveFunction phi = gaussian_product(m, two_slots());
  const WaveFunction psi = gaussian_product(m, {{0.3, 0.8, {{1, cplx(0.4, 0.1)}, {2, 1.0}}}, {-0.5, 1.0, {{1, 1.0}}}});
  QuadSpec q;
  q.nodes_per_axis = 80;
  const QuadResult a = inner_product(symmetrize(phi), psi, q);
  const QuadResult b = inner_product(phi, symmetrize(psi), q);
  CHECK(std::abs(a.value - b.value) < 1e-8);
  CHECK(std::abs(a.value) > 1e-3);
}

TEST_CASE("pole inventory and the Cn factor") {
  const ScatteringData s = build_zn(3, 1.0);
  const auto inv = strip_pole_inventory(s);
  REQUIRE(!inv.empty());
  // every strip pole of every component appears
  for (int a = 1; a <= 2; ++a) {
    for (int b = 1; b <= 2; ++b) {
      for (const PoleEntry& p : s.component(a, b).poles_in_strip(1e-9, kPi - 1e-9)) {
        bool found = false;
        for (cplx l : inv) found = found || std::abs(kI * l - p.location) < 1e-12;
        CHECK(found);
      }
    }
  }
  const CnFactor c = cn_factor(s);
  CHECK(c.poles.size() == c.mirrors.size());
  for (cplx l : c.poles) {
    CHECK(std::abs(c.pair(kI * l)) < 1e-12);
    CHECK(std::abs(c.pair(-kI * l)) < 1e-12);
  }
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    auto z = random_reals(rng, 3);
    const cplx v = c(z.data(), 3);
    CHECK(std::abs(v) > 0.0);
    std::swap(z[0], z[2]);
    CHECK(rel(c(z.data(), 3), v) < 1e-14);
    std::swap(z[1], z[2]);
    CHECK(rel(c(z.data(), 3), v) < 1e-14);
  }
  CHECK_THROWS_AS(cn_factor(s, std::vector<double>(inv.size(), 0.2)), ConfigError);
  CHECK_THROWS_AS(cn_factor(s, {-1.0}), ConfigError);
  // mirrors at exactly minus the poles cancel every factor
  std::vector<double> neg;
  for (cplx l : inv) neg.push_back(-l.real());
  const CnFactor flat = cn_factor(s, neg);
  CHECK(std::abs(flat.pair(cplx(0.3, 0.2)) - 1.0) < 1e-14);
}

TEST_CASE("zero factor") {
  const ScatteringData s = build_zn(3, 1.0);
  CHECK_THROWS_AS(zero_factor(s, 2.0 * s.theta0), ConfigError);
  const ZeroFactor z = zero_factor(s, 2.0 * s.theta0 + 0.5);
  const cplx co[2] = {0.7, 0.7};
  CHECK(std::abs(z(co, 2)) == 0.0);
  for (int i = -20; i <= 20; ++i) CHECK(std::abs(z.pair(0.37 * i)) <= 1.0);
  for (int i = -10; i <= 10; ++i) {
    const cplx d(0.5 * i, 2.0 * s.theta0);
    CHECK(std::isfinite(std::abs(z.pair(d))));
    CHECK(std::isfinite(std::abs(z.pair(std::conj(d)))));
  }
}

TEST_CASE("generator vectors") {
  const ScatteringData s = build_zn(3, 1.0);
  const WaveFunction w = make_d0_vector(s, two_slots());
  CHECK(w.band == doctest::Approx(s.theta0));
  CHECK(w.zero_flag);
  CHECK(s_symmetry_residual(w, 20, 9) < 1e-10);
  for (int a = 1; a <= 2; ++a) {
    for (int b = 1; b <= 2; ++b) {
      const cplx v = w({a, b}, {cplx(0.3, -s.theta0), cplx(1.1, 0.0)});
      CHECK(std::isfinite(v.real()));
      CHECK(std::isfinite(v.imag()));
    }
  }
  // band certificate on a grid of single-variable shifts
  for (int k = 0; k < 2; ++k) {
    for (double mu : {-s.theta0, -0.5 * s.theta0, 0.5 * s.theta0, s.theta0}) {
      for (int i = -12; i <= 12; ++i) {
        std::vector<cplx> z{0.3, -0.2};
        z[k] = cplx(0.25 * i + 0.013, mu);
        CHECK_NOTHROW(w({1, 2}, z));
        CHECK(std::isfinite(std::abs(w({2, 2}, z))));
      }
    }
  }
  std::mt19937_64 rng(4);
  const QuadResult n2 = inner_product(w, w);
  CHECK(n2.value.real() > 0.0);
  CHECK(std::abs(n2.value.imag()) < 1e-12 * n2.value.real());
  const double scale = std::sqrt(n2.value.real());
  for (int i = 0; i < 10; ++i) {
    const double t = random_reals(rng, 1)[0].real();
    CHECK(std::abs(w({1, 2}, {t, t})) < 1e-12 * scale);
  }
  const WaveFunction w3 = make_d0_vector(s, three_slots());
  CHECK(s_symmetry_residual(w3, 10, 2) < 1e-10);
  for (int i = 0; i < 10; ++i) {
    auto z = random_reals(rng, 3);
    z[2] = z[0];
    CHECK(std::abs(w3({2, 1, 2}, z)) < 1e-12);
  }
}

TEST_CASE("inner products") {
  const ScatteringData s = build_zn(3, 1.0);
  const WaveFunction a = make_d0_vector(s, two_slots());
  const WaveFunction b = make_d0_vector(s, {{0.1, 1.0, {{1, 1.0}, {2, cplx(0, 1)}}}, {-0.8, 0.9, {{2, 1.0}}}});
  const cplx ab = inner_product(a, b).value, ba = inner_product(b, a).value;
  CHECK(std::abs(ab - std::conj(ba)) < 1e-12);
  QuadSpec wide;
  wide.L_widths = 10.0;
  const cplx ab10 = inner_product(a, b, wide).value;
  CHECK(std::abs(ab10 - ab) < 1e-8 * std::abs(ab));
  CHECK_THROWS_AS(inner_product(a, make_d0_vector(s, three_slots())), ConfigError);

  const QuadResult g = integrate_grid({{-8, 8, 96}, {-8, 8, 96}}, [](const cplx* z) {
    return std::exp(-z[0] * z[0] - z[1] * z[1]);
  });
  CHECK(std::abs(g.value - kPi) < 1e-13);
  CHECK(g.error < 1e-8);
  // a pole on a node is averaged out
  const QuadResult h = integrate_grid({{-1, 1, 3}}, [](const cplx* z) -> cplx {
    if (std::abs(z[0]) < 1e-9) throw PoleHit(z[0], "pole");
    return 1.0;
  });
  CHECK(std::abs(h.value - 2.0) < 1e-12);
}

TEST_CASE("CPT and Poincare actions") {
  const ScatteringData s = build_zn(4, 1.0);
  const WaveFunction w = make_d0_vector(s, {{-0.3, 1.0, {{1, 1.0}, {3, cplx(0.5, 0.5)}}}, {0.4, 0.8, {{2, 1.0}, {1, 0.3}}}});
  const WaveFunction jj = apply_j(apply_j(w));
  const WaveFunction j = apply_j(w);
  std::mt19937_64 rng(8);
  for (int i = 0; i < 10; ++i) {
    const auto z = random_reals(rng, 2);
    const std::vector<cplx> zc{cplx(z[0].real(), 0.3), cplx(z[1].real(), -0.2)};
    for_each_tuple(2, 3, [&](const int* idx) {
      const std::vector<int> a(idx, idx + 2);
      CHECK(rel(jj(a, zc), w(a, zc)) < 1e-14);
      CHECK(rel(j(a, zc), std::conj(w({4 - a[1], 4 - a[0]}, {std::conj(zc[1]), std::conj(zc[0])}))) < 1e-14);
    });
  }
  const Point2 x{0.4, -1.3};
  const WaveFunction tr = apply_u(w, x, 0.0);
  for (int i = 0; i < 10; ++i) {
    const auto z = random_reals(rng, 2);
    for_each_tuple(2, 3, [&](const int* idx) {
      const std::vector<int> a(idx, idx + 2);
      cplx p = 0.0;
      for (int l = 0; l < 2; ++l) p += s.mass(a[l]) * (std::cosh(z[l]) * x[0] - std::sinh(z[l]) * x[1]);
      CHECK(rel(tr(a, z), std::exp(kI * p) * w(a, z)) < 1e-13);
    });
  }
  const WaveFunction bo = apply_u(w, x, 0.35);
  CHECK(s_symmetry_residual(j, 20, 3) < 1e-10);
  CHECK(s_symmetry_residual(bo, 20, 4) < 1e-10);
  const WaveFunction back = apply_u_inverse(bo, x, 0.35);
  const std::vector<cplx> z{0.2, -0.6};
  CHECK(rel(back({1, 2}, z), w({1, 2}, z)) < 1e-12);
}

TEST_CASE("Fock vectors") {
  const ScatteringData s = build_zn(3, 1.0);
  const Model m = share(s);
  const WaveFunction w = make_d0_vector(s, two_slots());
  FockVector v = FockVector::vacuum(m);
  v.add(w, cplx(0.0, 2.0));
  CHECK(v.sector_list() == std::vector<int>{0, 2});
  const QuadResult nv = inner_product(v, v);
  const double w2 = inner_product(w, w).value.real();
  CHECK(std::abs(nv.value - (1.0 + 4.0 * w2)) < 1e-12 * (1.0 + 4.0 * w2));
  const FockVector jv = apply_j(v);
  CHECK(jv.sectors.at(2)[0].second == cplx(0.0, -2.0));
  CHECK(std::abs(inner_product(jv, jv).value - nv.value) < 1e-10 * nv.value.real());
  CHECK_THROWS_AS(v.sector(1), ConfigError);
}

TEST_CASE("generator json round trip") {
  const ScatteringData s = build_zn(3, 1.0);
  const WaveFunction w = make_d0_vector(s, two_slots());
  const json j = wavefn_to_json(w);
  CHECK(j["family"] == "d0");
  const WaveFunction r = wavefn_from_json(s, j);
  const std::vector<cplx> z{cplx(0.2, 0.1), cplx(-0.4, -0.3)};
  CHECK(r({1, 2}, z) == w({1, 2}, z));
  CHECK(wavefn_to_json(r) == j);
  D0Options plain;
  plain.zero_factor = false;
  plain.cn = false;
  const WaveFunction p = make_d0_vector(s, two_slots(), plain);
  CHECK_FALSE(p.zero_flag);
  CHECK(wavefn_from_json(s, wavefn_to_json(p))({2, 1}, z) == p({2, 1}, z));
  CHECK(quad_from_json(quad_to_json(QuadSpec{})).nodes_per_axis == 128);
}
