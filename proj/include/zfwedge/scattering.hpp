#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zfwedge/common.hpp"
#include "zfwedge/meromorphic.hpp"

namespace zfw {

struct FusionProcess {
  int left = 0;
  int right = 0;
  int result = 0;
  double angle_left = 0.0;   // theta_(left right)
  double angle_right = 0.0;  // theta_(right left)
  double angle() const { return angle_left + angle_right; }
};

enum class Family { ZN, CDD, Toda };

std::string family_name(Family f);
Family parse_family(const std::string& s);

struct BlaschkeSpec {
  int kind = 1;  // zero configuration 1, 2 or 3
  int k = 1;
  cplx B;
};

// Blaschke product of the given kind for the two-particle amplitude of species 1.
MeromorphicExpr blaschke_factor(int N, const BlaschkeSpec& spec);
// The Z(N) amplitude of species 1.
MeromorphicExpr zn_base_factor(int N);
// Validates kind constraints and the no-zero-at-2*pi*k*i/N rule; throws ConfigError.
void validate_blaschke(int N, const BlaschkeSpec& spec);

class ScatteringData {
 public:
  int N = 0;
  double m1 = 1.0;
  Family family = Family::ZN;
  std::vector<BlaschkeSpec> specs;
  double toda_B = 0.0;

  int elementary = 1;
  double theta0 = 0.0;

  int count() const { return N - 1; }
  int conj(int a) const { return N - a; }
  double mass(int a) const { return masses_.at(a - 1); }
  const std::vector<double>& masses() const { return masses_; }
  const std::vector<FusionProcess>& fusions() const { return fusions_; }
  // Fusion entry for (a b), or nullptr when the pair does not fuse.
  const FusionProcess* fusion(int a, int b) const;

  const MeromorphicExpr& component(int a, int b) const;
  const MeromorphicExpr& base_amplitude() const { return base_; }
  cplx S(int a, int b, cplx z) const { return component(a, b)(z); }

  // Residue of S^{ab} at i theta_ab; zero when (ab) does not fuse to c.
  cplx fusion_residue(int a, int b, int c) const;

  friend ScatteringData assemble(int N, double m1, Family family, const MeromorphicExpr& base);

 private:
  std::vector<double> masses_;
  std::vector<FusionProcess> fusions_;
  std::vector<MeromorphicExpr> components_;
  MeromorphicExpr base_;
};

ScatteringData build_zn(int N, double m1);
ScatteringData build_cdd(int N, double m1, const std::vector<BlaschkeSpec>& specs);
ScatteringData build_toda(int N, double m1, double B);

cplx eval_component(const ScatteringData& s, int a, int b, cplx z);

struct Residue {
  cplx pole_location;
  int order = 1;
  cplx value;
  cplx circle_value;
  bool consistent = true;
};

Residue residue_at(const ScatteringData& s, int a, int b, cplx pole_location);

struct VerificationReport {
  std::string check_id;
  std::vector<cplx> grid;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool passed = true;
  std::vector<std::pair<cplx, double>> witnesses;
  std::map<std::string, double> extras;
  std::vector<std::string> notes;

  // Folds one residual into the report; keeps up to 8 failure witnesses.
  void record(cplx point, double residual);
  void finish();
};

struct GridSpec {
  double re_min = -10.0;
  double re_max = 10.0;
  int re_count = 41;
  int im_count = 9;
  double re_offset = 0.0137;
  double tolerance = 1e-10;
  double band_re_max = 30.0;
  int band_re_count = 601;
  int band_im_count = 9;
};

// Residual |a - b| / max(1, |a|, |b|).
double rel_residual(cplx a, cplx b);

std::vector<VerificationReport> check_axioms(const ScatteringData& s, const GridSpec& grid = {});
std::vector<VerificationReport> check_relations(const ScatteringData& s, double tolerance = 1e-10);

// Residual of prod_{j<N} S^{11}(z + 2 pi i j / N) = 1 at the given points.
double bootstrap_identity_residual(const ScatteringData& s, const std::vector<cplx>& points);

// Successive-fusion chain v, v^2, ..., v^K starting from the elementary index.
std::vector<int> elementary_chain(const ScatteringData& s);

}  // namespace zfw
