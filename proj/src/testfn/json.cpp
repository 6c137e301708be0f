#include "zfwedge/json_io.hpp"

namespace zfw {

json testfn_to_json(const TestFunction& f) {
  json j;
  j["wedge"] = wedge_name(f.wedge);
  j["center"] = {f.center[0], f.center[1]};
  j["radii"] = {f.radii[0], f.radii[1]};
  json w = json::object();
  for (int a = 1; a <= f.count(); ++a) {
    if (f.weight(a) != 0.0) w[std::to_string(a)] = cplx_json(f.weight(a));
  }
  j["weights"] = w;
  j["quad"] = {{"nodes_t", f.quad.nodes_t}, {"nodes_x", f.quad.nodes_x}};
  if (f.boost != 0.0) j["boost"] = f.boost;
  if (f.terms.size() != 1 || f.terms[0].dt != 0 || f.terms[0].dx != 0 || f.terms[0].coeff != 1.0) {
    json terms = json::array();
    for (const auto& t : f.terms) terms.push_back({{"coeff", cplx_json(t.coeff)}, {"dt", t.dt}, {"dx", t.dx}});
    j["terms"] = terms;
  }
  return j;
}

TestFunction testfn_from_json(const ScatteringData& s, const json& j) {
  try {
    const std::string wn = j.at("wedge").get<std::string>();
    if (wn != "left" && wn != "right") throw ConfigError("wedge must be left or right");
    const Wedge wedge = wn == "left" ? Wedge::Left : Wedge::Right;
    const Point2 center{j.at("center")[0].get<double>(), j.at("center")[1].get<double>()};
    const Point2 radii{j.at("radii")[0].get<double>(), j.at("radii")[1].get<double>()};
    std::map<int, cplx> weights;
    for (auto it = j.at("weights").begin(); it != j.at("weights").end(); ++it) {
      weights[std::stoi(it.key())] = json_cplx(it.value());
    }
    FourierQuad q;
    if (j.contains("quad")) {
      q.nodes_t = j["quad"].value("nodes_t", q.nodes_t);
      q.nodes_x = j["quad"].value("nodes_x", q.nodes_x);
    }
    TestFunction f = make_wedge_bump(s, wedge, center, radii, weights, q);
    if (j.contains("terms")) {
      f.terms.clear();
      for (const auto& t : j["terms"]) f.terms.push_back({json_cplx(t.at("coeff")), t.at("dt").get<int>(), t.at("dx").get<int>()});
    }
    if (j.contains("boost")) f = with_geometry(f, f.center, f.radii, j["boost"].get<double>());
    return f;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("test function json: ") + e.what());
  }
}

}  // namespace zfw
