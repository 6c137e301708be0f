#include <cmath>
#include <random>

#include "doctest.h"
#include "zfwedge/operators.hpp"

using namespace zfw;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max({1e-300, std::abs(a), std::abs(b)}); }

struct Z3 {
  ScatteringData s = build_zn(3, 1.0);
  Model m = share(s);
  cplx w{0.7, 0.4};
  cplx v{0.3, -0.9};
  TestFunction f = make_wedge_bump(s, Wedge::Left, {0.2, -3.0}, {0.8, 0.9}, {{1, w}, {2, std::conj(w)}});
  TestFunction g = make_wedge_bump(s, Wedge::Right, {-0.3, 2.8}, {0.7, 1.0}, {{1, v}, {2, std::conj(v)}});
};

std::vector<GaussianSlot> slots_a() {
  return {{-0.4, 0.9, {{1, 1.0}, {2, cplx(0.3, 0.5)}}}, {0.7, 1.2, {{1, cplx(0.2, -0.4)}, {2, 0.8}}}};
}
std::vector<GaussianSlot> slots_b() {
  return {{0.3, 0.8, {{1, 0.6}, {2, cplx(0.1, 0.9)}}}, {-0.5, 1.0, {{1, cplx(0.5, 0.5)}, {2, 0.4}}}};
}
std::vector<GaussianSlot> first(const std::vector<GaussianSlot>& s, int n) { return {s.begin(), s.begin() + n}; }

// sum_nu int h^nu(x) k^nu(x) over a plain Gauss-Legendre rule
cplx line_sum(int K, double lo, double hi, int nodes, const std::function<cplx(int, double)>& fn) {
  std::vector<double> x, w;
  mapped_rule(Axis{lo, hi, nodes}, x, w);
  cplx sum = 0.0;
  for (int nu = 1; nu <= K; ++nu)
    for (std::size_t i = 0; i < x.size(); ++i) sum += w[i] * fn(nu, x[i]);
  return sum;
}

cplx at(const FockVector& v, int n, std::vector<int> idx, std::vector<cplx> z) { return v.sector(n)(idx, z); }

}  // namespace

TEST_CASE("creators match the literal symmetrized tensor") {
  Z3 c;
  const WaveFunction phi = gaussian_product(c.m, {{0.1, 0.7, {{1, 0.4}, {2, cplx(0.2, 0.9)}}}});
  const WaveFunction psi = symmetrize(gaussian_product(c.m, {{-0.3, 1.1, {{1, 1.0}, {2, cplx(0.5, -0.2)}}}}));
  const FockVector v = FockVector::of(psi);
  const WaveFunction left = apply_zdag(phi, v).sector(2), right = apply_zdag_prime(phi, v).sector(2);
  const WaveFunction lit_left = scaled(symmetrize(tensor_product(phi, psi)), std::sqrt(2.0));
  const WaveFunction lit_right = scaled(symmetrize(tensor_product(psi, phi)), std::sqrt(2.0));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 10; ++i) {
    const std::vector<cplx> z{u(rng), u(rng)};
    for (int a = 1; a <= 2; ++a)
      for (int b = 1; b <= 2; ++b) {
        CHECK(rel(left({a, b}, z), lit_left({a, b}, z)) < 1e-13);
        CHECK(rel(right({a, b}, z), lit_right({a, b}, z)) < 1e-13);
      }
  }
  // unsymmetrized input goes through the literal path
  const WaveFunction raw = gaussian_product(c.m, {{-0.3, 1.1, {{1, 1.0}, {2, 0.5}}}});
  CHECK_FALSE(raw.symmetric);
  const WaveFunction out = apply_zdag(phi, FockVector::of(raw)).sector(2);
  CHECK(s_symmetry_residual(out, 10, 3) < 1e-12);
}

TEST_CASE("annihilator on the vacuum and one-particle norm") {
  Z3 c;
  const WaveFunction phi = gaussian_product(c.m, {{0.1, 0.7, {{1, 0.4}, {2, cplx(0.2, 0.9)}}}});
  const FockVector vac = FockVector::vacuum(c.m);
  CHECK(apply_z(phi, vac).empty());
  CHECK(apply_z_prime(phi, vac).empty());
  const FockVector one = apply_zdag(phi, vac);
  CHECK(one.sector_list() == std::vector<int>{1});
  const cplx n1 = inner_product(one, one).value, n0 = inner_product(phi, phi).value;
  CHECK(rel(n1, n0) < 1e-14);
  // z(phi) z†(phi) Omega = ||phi||^2 Omega
  const FockVector back = apply_z(phi, one);
  CHECK(rel(back.sector(0).eval(nullptr, nullptr), n0) < 1e-10);
}

TEST_CASE("exchange relation of z and z-dagger on one particle") {
  Z3 c;
  const WaveFunction phi = gaussian_product(c.m, {{0.1, 0.7, {{1, 0.4}, {2, cplx(0.2, 0.9)}}}});
  const WaveFunction psi = gaussian_product(c.m, {{-0.2, 0.9, {{1, cplx(0.3, 0.3)}, {2, 1.0}}}});
  const WaveFunction xi = gaussian_product(c.m, {{0.5, 0.8, {{1, 1.0}, {2, cplx(-0.4, 0.6)}}}});
  QuadSpec q;
  const FockVector lhs = apply_z(phi, apply_zdag(psi, FockVector::of(xi)), q);
  const cplx overlap = inner_product(phi, psi).value;
  for (double t : {-0.7, 0.15, 1.3}) {
    for (int gam = 1; gam <= 2; ++gam) {
      // psi^g(t) sum_nu int conj(phi^nu(t')) S^{nu g}(t - t') xi^nu(t')
      const cplx twisted = psi({gam}, {t}) * line_sum(2, -8, 8, 400, [&](int nu, double x) {
                             return std::conj(phi({nu}, {x})) * c.s.S(nu, gam, t - x) * xi({nu}, {x});
                           });
      const cplx got = at(lhs, 1, {gam}, {t}) - twisted;
      CHECK(std::abs(got - overlap * xi({gam}, {t})) < 1e-8 * std::abs(overlap * xi({gam}, {t})) + 1e-14);
    }
  }
}

TEST_CASE("field on the vacuum and Klein-Gordon") {
  Z3 c;
  const FockVector vac = FockVector::vacuum(c.m);
  const FockVector one = apply_phi(c.f, vac);
  CHECK(one.sector_list() == std::vector<int>{1});
  for (double t : {-1.0, 0.0, 0.8})
    for (int a = 1; a <= 2; ++a) CHECK(at(one, 1, {a}, {t}) == c.f.fourier(a, +1, t));
  const cplx norm = inner_product(one, one).value;
  const cplx direct = line_sum(2, -6.5, 6.5, 640, [&](int a, double x) { return std::norm(c.f.fourier(a, +1, x)); });
  CHECK(rel(norm, direct) < 1e-10);
  CHECK_THROWS_AS(apply_phi(c.g, vac), DomainError);
  CHECK_THROWS_AS(apply_phi_prime(c.f, vac), DomainError);
  for (int a = 1; a <= 2; ++a) CHECK(kg_residual(c.s, c.f, a) < 1e-9);
}

TEST_CASE("chi on the vacuum and on one particle") {
  Z3 c;
  CHECK(apply_chi(c.f, FockVector::vacuum(c.m)).empty());
  CHECK(apply_chi_prime(c.g, FockVector::vacuum(c.m)).empty());
  // R^2_{11} from the residue extraction, compared with i sqrt(3)
  const cplx R = c.s.fusion_residue(1, 1, 2);
  CHECK(rel(R, cplx(0.0, std::sqrt(3.0))) < 1e-10);
  CHECK(rel(eta(c.s, 1, 1, 2), kI * std::sqrt(2 * kPi * std::sqrt(3.0))) < 1e-12);
  CHECK(eta(c.s, 1, 2, 2) == 0.0);
  const WaveFunction xi = make_d0_vector(c.s, first(slots_a(), 1));
  const FockVector out = apply_chi(c.f, FockVector::of(xi));
  const FockVector outp = apply_chi_prime_direct(c.g, FockVector::of(xi));
  const double third = kPi / 3;
  for (double t : {-0.6, 0.2, 1.1}) {
    const cplx want = std::sqrt(2 * kPi * std::sqrt(3.0)) * c.f.fourier(1, +1, t + kI * third) * xi({1}, {t - kI * third});
    CHECK(rel(at(out, 1, {2}, {t}), want) < 1e-13);
    const cplx wantp = std::sqrt(2 * kPi * std::sqrt(3.0)) * c.g.fourier(1, +1, t - kI * third) * xi({1}, {t + kI * third});
    CHECK(rel(at(outp, 1, {2}, {t}), wantp) < 1e-13);
  }
}

TEST_CASE("chi prime: conjugated and direct forms agree") {
  Z3 c;
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int n = 1; n <= 2; ++n) {
    const FockVector v = FockVector::of(make_d0_vector(c.s, first(slots_a(), n)));
    const FockVector a = apply_chi_prime(c.g, v), b = apply_chi_prime_direct(c.g, v);
    for (int i = 0; i < 20; ++i) {
      std::vector<cplx> z(n);
      for (auto& x : z) x = u(rng);
      std::vector<int> idx(n);
      for (auto& k : idx) k = 1 + static_cast<int>(rng() % 2);
      CHECK(rel(at(a, n, idx, z), at(b, n, idx, z)) < 1e-10);
    }
  }
}

TEST_CASE("chi symmetry and covariance") {
  Z3 c;
  const WaveFunction psi = make_d0_vector(c.s, {{0.2, 0.8, {{1, 1.0}, {2, cplx(0.0, 0.5)}}}});
  const WaveFunction xi = make_d0_vector(c.s, {{-0.4, 0.7, {{1, 0.3}, {2, 1.1}}}});
  CHECK(chi_symmetry_residual(c.f, psi, xi) < 1e-7);
  CHECK(covariance_residual(c.f, {0.0, -2.0}, 0.0, xi) < 1e-8);
  CHECK(covariance_residual(c.f, {0.3, -1.5}, 0.4, xi) < 1e-8);
}

TEST_CASE("candidate fields: sectors and the J relation") {
  Z3 c;
  const FockVector vac = FockVector::vacuum(c.m);
  const FockVector a = apply_fct(c.f, vac), b = apply_phi(c.f, vac);
  CHECK(a.sector_list() == b.sector_list());
  CHECK(at(a, 1, {1}, {0.3}) == at(b, 1, {1}, {0.3}));
  const FockVector two = FockVector::of(make_d0_vector(c.s, slots_a()));
  CHECK(apply_fct(c.f, two).sector_list() == std::vector<int>{1, 2, 3});
  CHECK(apply_fct_prime(c.g, two).sector_list() == std::vector<int>{1, 2, 3});
  // J fct(g_j) J against phi' + the directly written chi'
  const FockVector lhs = apply_j(apply_fct(act_cpt(c.g), apply_j(two)));
  FockVector rhs = apply_phi_prime(c.g, two);
  rhs.add(apply_chi_prime_direct(c.g, two));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 5; ++i) {
    const std::vector<cplx> z3{u(rng), u(rng), u(rng)}, z2{u(rng), u(rng)};
    CHECK(rel(at(lhs, 3, {1, 2, 1}, z3), at(rhs, 3, {1, 2, 1}, z3)) < 1e-10);
    CHECK(rel(at(lhs, 2, {2, 1}, z2), at(rhs, 2, {2, 1}, z2)) < 1e-10);
  }
}

TEST_CASE("bound-state contributions come from the fusion table") {
  const ScatteringData s = build_zn(4, 1.0);
  const TestFunction f = make_wedge_bump(s, Wedge::Left, {0.2, -3.0}, {0.8, 0.9}, {{1, 0.5}, {3, 0.5}});
  const WaveFunction psi = make_d0_vector(s, {{0.1, 0.8, {{1, 1.0}, {2, 0.5}, {3, 0.7}}}, {-0.3, 1.0, {{1, 0.4}, {3, 1.0}}}});
  ContributionLog log;
  Certificate cert;
  ChiOptions opt;
  opt.log = &log;
  opt.certificate = &cert;
  const FockVector out = apply_chi(f, FockVector::of(psi), opt);
  for (const double t : {-0.5, 0.4})
    for (int a = 1; a <= 3; ++a)
      for (int b = 1; b <= 3; ++b) (void)at(out, 2, {a, b}, {t, 0.3 - t});
  CHECK_FALSE(log.triples().empty());
  for (const auto& [a, b, g] : log.triples()) {
    const FusionProcess* p = s.fusion(a, b);
    REQUIRE(p != nullptr);
    CHECK(p->result == g);
  }
  CHECK(cert.op == "chi");
  CHECK(cert.required_band <= cert.available_band);
  CHECK(cert.sectors == std::vector<int>{2});
  // not enough band
  WaveFunction narrow = psi;
  narrow.band = 0.1;
  CHECK_THROWS_AS(apply_chi(f, FockVector::of(narrow)), DomainError);
  // species 2 needs the override
  const TestFunction f2 = make_wedge_bump(s, Wedge::Left, {0.2, -3.0}, {0.8, 0.9}, {{2, 1.0}});
  CHECK_THROWS_AS(apply_chi(f2, FockVector::of(psi)), DomainError);
}

TEST_CASE("J is antilinear on Fock vectors") {
  Z3 c;
  const WaveFunction psi = make_d0_vector(c.s, slots_a());
  const cplx k(0.4, -1.3);
  const FockVector a = apply_j(FockVector::of(psi, k)), b = apply_j(FockVector::of(psi));
  for (double t : {-0.3, 0.9}) CHECK(rel(at(a, 2, {1, 2}, {t, 0.2}), std::conj(k) * at(b, 2, {1, 2}, {t, 0.2})) < 1e-14);
}

TEST_CASE("chi and z-prime commutator against its closed form") {
  Z3 c;
  QuadSpec q;
  const WaveFunction gm = apply_j(transform_wave(c.m, c.g, -1));
  const WaveFunction fm = apply_j(transform_wave(c.m, c.f, -1));
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int n = 1; n <= 2; ++n) {
    const FockVector P = FockVector::of(make_d0_vector(c.s, first(slots_a(), n)));
    FockVector comp = apply_chi(c.f, apply_z_prime(gm, P, q));
    comp.add(apply_z_prime(gm, apply_chi(c.f, P), q), -1.0);
    const FockVector orc = oracle_chi_zprime(c.f, c.g, P, q);
    FockVector other = apply_z(fm, apply_chi_prime_direct(c.g, P), q);
    other.add(apply_chi_prime_direct(c.g, apply_z(fm, P, q)), -1.0);
    const int points = n == 1 ? 1 : 10;
    for (int i = 0; i < points; ++i) {
      std::vector<cplx> z(n - 1);
      for (auto& x : z) x = u(rng);
      std::vector<int> idx(n - 1);
      for (auto& k : idx) k = 1 + static_cast<int>(rng() % 2);
      const cplx a = at(comp, n - 1, idx, z), b = at(orc, n - 1, idx, z), d = at(other, n - 1, idx, z);
      CHECK(rel(a, b) < 1e-7);
      CHECK(rel(b, -d) < 1e-7);
    }
  }
  // (1 3) does not fuse in Z(4)
  const ScatteringData s4 = build_zn(4, 1.0);
  const TestFunction f4 = make_wedge_bump(s4, Wedge::Left, {0.2, -3.0}, {0.8, 0.9}, {{1, 1.0}});
  const TestFunction g4 = make_wedge_bump(s4, Wedge::Right, {-0.3, 2.8}, {0.7, 1.0}, {{3, 1.0}});
  const FockVector P4 = FockVector::of(make_d0_vector(s4, {{0.1, 0.8, {{3, 1.0}}}}));
  CHECK(oracle_chi_zprime(f4, g4, P4, q).sector(0).eval(nullptr, nullptr) == 0.0);
}

TEST_CASE("field commutator multiplier") {
  Z3 c;
  for (int n = 1; n <= 2; ++n) {
    const int idx[2] = {1, 2};
    const double th[2] = {0.3, -0.5};
    ContourLegs legs;
    const cplx res = phi_commutator_multiplier(c.s, c.f, c.g, idx, th, n);
    const cplx direct = phi_commutator_direct(c.s, c.f, c.g, idx, th, n, 1600, &legs);
    CHECK(rel(res, direct) < 1e-6);
    CHECK(legs.left < 1e-10);
    CHECK(legs.right < 1e-10);
  }
  // pole terms of j and k cancel as the rapidities meet
  const int idx[2] = {1, 1};
  std::vector<cplx> seq;
  for (double d : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    const double th[2] = {0.2 + d, 0.2};
    seq.push_back(phi_commutator_multiplier(c.s, c.f, c.g, idx, th, 2));
    CHECK(std::isfinite(std::abs(seq.back())));
  }
  // differences shrink with the gap, so the limit is finite
  for (std::size_t k = 2; k < seq.size(); ++k) CHECK(std::abs(seq[k] - seq[k - 1]) < 0.2 * std::abs(seq[k - 1] - seq[k - 2]));
  const double same[2] = {0.2, 0.2};
  CHECK_THROWS_AS(phi_commutator_multiplier(c.s, c.f, c.g, idx, same, 2), DomainError);
}

TEST_CASE("field commutator oracle against the composed fields") {
  Z3 c;
  const QuadSpec q{128, 8.0, 640, 192};
  const FockVector P = FockVector::of(make_d0_vector(c.s, first(slots_a(), 1)));
  FockVector comp = apply_phi_prime(c.g, apply_phi(c.f, P, q), q);
  comp.add(apply_phi(c.f, apply_phi_prime(c.g, P, q), q), -1.0);
  const FockVector orc = oracle_phi_phiprime(c.f, c.g, P);
  for (double t : {-0.8, 0.1, 0.9})
    for (int a = 1; a <= 2; ++a) CHECK(rel(at(comp, 1, {a}, {t}), at(orc, 1, {a}, {t})) < 1e-6);
  // it cancels the bound-state part of the weak commutator
  const WaveFunction phi = make_d0_vector(c.s, first(slots_b(), 1));
  WeakCommOptions o;
  o.skip_error_estimate = true;
  const WeakCommResult r = weak_commutator(c.f, c.g, FockVector::of(phi), P, o);
  const cplx mult = inner_product(FockVector::of(phi), orc).value;
  CHECK(std::abs(mult - r.bound_state_part) < 1e-6 * r.scale);
}

TEST_CASE("weak commutator on one-particle vectors") {
  Z3 c;
  const FockVector Phi = FockVector::of(make_d0_vector(c.s, first(slots_a(), 1)));
  const FockVector Psi = FockVector::of(make_d0_vector(c.s, first(slots_b(), 1)));
  const WeakCommResult r = weak_commutator(c.f, c.g, Phi, Psi);
  CHECK(r.scale > 0);
  CHECK(r.normalized < 1e-6);
  CHECK(r.normalized_error < 1e-7);
  // linear in f
  WeakCommOptions o;
  o.skip_error_estimate = true;
  const WeakCommResult a = weak_commutator(c.f, c.g, Phi, Psi, o);
  const WeakCommResult b = weak_commutator(scaled(c.f, 2.5), c.g, Phi, Psi, o);
  CHECK(rel(b.creator_part, 2.5 * a.creator_part) < 1e-10);
  CHECK(rel(b.bound_state_part, 2.5 * a.bound_state_part) < 1e-10);
  CHECK(rel(b.annihilator_part, 2.5 * a.annihilator_part) < 1e-10);
  CHECK(std::abs(b.value - 2.5 * a.value) < 1e-10 * std::abs(2.5 * a.creator_part));
}

TEST_CASE("weak commutator preconditions") {
  Z3 c;
  const FockVector Phi = FockVector::of(make_d0_vector(c.s, first(slots_a(), 1)));
  CHECK_THROWS_AS(weak_commutator(c.g, c.g, Phi, Phi), DomainError);
  CHECK_THROWS_AS(weak_commutator(c.f, c.f, Phi, Phi), DomainError);
  const TestFunction complex_f = make_wedge_bump(c.s, Wedge::Left, {0.2, -3.0}, {0.8, 0.9}, {{1, 1.0}, {2, kI}});
  CHECK_THROWS_AS(weak_commutator(complex_f, c.g, Phi, Phi), DomainError);
  const ScatteringData s4 = build_zn(4, 1.0);
  const TestFunction f4 = make_wedge_bump(s4, Wedge::Left, {0.2, -3.0}, {0.8, 0.9}, {{1, 1.0}, {2, 1.0}, {3, 1.0}});
  const TestFunction g4 = make_wedge_bump(s4, Wedge::Right, {-0.3, 2.8}, {0.7, 1.0}, {{1, 1.0}, {3, 1.0}});
  CHECK_THROWS_AS(require_weak_comm_inputs(s4, f4, g4, false), DomainError);
  CHECK_NOTHROW(require_weak_comm_inputs(s4, f4, g4, true));
}
