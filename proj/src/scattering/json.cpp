#include "zfwedge/json_io.hpp"

namespace zfw {

cplx json_cplx(const json& j) {
  if (j.is_number()) return cplx(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2) return cplx(j[0].get<double>(), j[1].get<double>());
  throw ConfigError("expected a number or [re, im] pair");
}

json model_to_json(const ScatteringData& s) {
  json j;
  j["N"] = s.N;
  j["m1"] = s.m1;
  j["family"] = family_name(s.family);
  json specs = json::array();
  for (const auto& sp : s.specs) specs.push_back({{"case", sp.kind}, {"k", sp.k}, {"B", cplx_json(sp.B)}});
  j["specs"] = specs;
  json masses = json::array();
  for (double m : s.masses()) masses.push_back(m);
  json table = json::array();
  json residues = json::array();
  for (const auto& f : s.fusions()) {
    table.push_back({{"left", f.left},
                     {"right", f.right},
                     {"result", f.result},
                     {"angle_left", f.angle_left},
                     {"angle_right", f.angle_right},
                     {"angle", f.angle()}});
    const cplx p(0.0, f.angle());
    json r = {{"left", f.left}, {"right", f.right}, {"result", f.result}, {"location", cplx_json(p)}};
    const MeromorphicExpr& e = s.component(f.left, f.right);
    const int order = e.pole_order(p);
    r["order"] = order;
    r["value"] = order > 0 ? cplx_json(e.residue(p).value) : json(nullptr);
    residues.push_back(r);
  }
  j["derived"] = {{"masses", masses}, {"fusion_table", table}, {"residues", residues}};
  return j;
}

ScatteringData model_from_json(const json& j) {
  try {
    const int N = j.at("N").get<int>();
    const double m1 = j.value("m1", 1.0);
    const Family fam = parse_family(j.value("family", std::string("zn")));
    std::vector<BlaschkeSpec> specs;
    if (j.contains("specs")) {
      for (const auto& sp : j["specs"]) {
        specs.push_back({sp.at("case").get<int>(), sp.at("k").get<int>(), json_cplx(sp.at("B"))});
      }
    }
    switch (fam) {
      case Family::ZN: return build_zn(N, m1);
      case Family::CDD: return build_cdd(N, m1, specs);
      case Family::Toda:
        if (specs.size() != 1) throw ConfigError("toda model needs exactly one spec");
        return build_toda(N, m1, specs[0].B.real());
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model json: ") + e.what());
  }
  throw ConfigError("model json: unreachable family");
}

json report_to_json(const VerificationReport& r, bool with_grid) {
  json j;
  j["check_id"] = r.check_id;
  if (with_grid) {
    json g = json::array();
    for (cplx z : r.grid) g.push_back(cplx_json(z));
    j["grid"] = g;
  } else {
    j["grid_size"] = r.grid.size();
  }
  j["max_residual"] = r.max_residual;
  j["tolerance"] = r.tolerance;
  j["passed"] = r.passed;
  json w = json::array();
  for (const auto& [p, res] : r.witnesses) w.push_back({{"point", cplx_json(p)}, {"residual", res}});
  j["witnesses"] = w;
  if (!r.extras.empty()) j["extras"] = r.extras;
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

json reports_to_json(const std::vector<VerificationReport>& rs, bool with_grid) {
  json a = json::array();
  for (const auto& r : rs) a.push_back(report_to_json(r, with_grid));
  return a;
}

}  // namespace zfw
