#include "zfwedge/json_io.hpp"

namespace zfw {

json wavefn_to_json(const WaveFunction& w) {
  if (!w.d0) throw ConfigError("only generator vectors can be serialized");
  const D0Spec& d = *w.d0;
  json j;
  j["n"] = w.n;
  j["family"] = "d0";
  json gs = json::array();
  for (const GaussianSlot& g : d.gaussians) {
    json weights = json::object();
    for (const auto& [a, c] : g.weights) weights[std::to_string(a)] = cplx_json(c);
    gs.push_back({{"center", g.center}, {"width", g.width}, {"weights", weights}});
  }
  j["gaussians"] = gs;
  j["lambda"] = d.lambda ? json(*d.lambda) : json(nullptr);
  if (d.cn) {
    json poles = json::array(), mirrors = json::array();
    for (cplx p : d.cn->poles) poles.push_back(cplx_json(p));
    for (cplx m : d.cn->mirrors) mirrors.push_back(cplx_json(m));
    j["cn"] = {{"poles", poles}, {"mirrors", mirrors}};
  } else {
    j["cn"] = nullptr;
  }
  return j;
}

WaveFunction wavefn_from_json(const ScatteringData& s, const json& j) {
  try {
    if (j.value("family", std::string("d0")) != "d0") throw ConfigError("unknown wavefunction family");
    std::vector<GaussianSlot> slots;
    for (const json& g : j.at("gaussians")) {
      GaussianSlot slot;
      slot.center = g.at("center").get<double>();
      slot.width = g.value("width", 1.0);
      for (const auto& [key, val] : g.at("weights").items()) slot.weights[std::stoi(key)] = json_cplx(val);
      slots.push_back(slot);
    }
    if (j.contains("n") && j.at("n").get<int>() != static_cast<int>(slots.size()))
      throw ConfigError("n does not match the number of gaussian slots");
    D0Options opt;
    const json lam = j.value("lambda", json(nullptr));
    opt.zero_factor = !lam.is_null();
    if (opt.zero_factor) opt.lambda = lam.get<double>();
    const json cn = j.value("cn", json(nullptr));
    opt.cn = !cn.is_null();
    if (opt.cn && cn.contains("poles")) {
      CnFactor c;
      for (const json& p : cn.at("poles")) c.poles.push_back(json_cplx(p));
      for (const json& m : cn.at("mirrors")) c.mirrors.push_back(json_cplx(m));
      if (c.poles.size() != c.mirrors.size()) throw ConfigError("cn poles and mirrors differ in length");
      for (cplx m : c.mirrors) {
        if (m.imag() != 0.0) throw ConfigError("cn mirrors must be real");
      }
      opt.cn_override = c;
    } else if (opt.cn && cn.contains("mirrors")) {
      for (const json& m : cn.at("mirrors")) opt.mirrors.push_back(m.get<double>());
    }
    return make_d0_vector(s, slots, opt);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("wavefunction spec: ") + e.what());
  }
}

json quad_to_json(const QuadSpec& q) {
  return {{"nodes_per_axis", q.nodes_per_axis},
          {"L_widths", q.L_widths},
          {"fine_nodes", q.fine_nodes},
          {"inner_nodes", q.inner_nodes}};
}

QuadSpec quad_from_json(const json& j) {
  QuadSpec q;
  q.nodes_per_axis = j.value("nodes_per_axis", q.nodes_per_axis);
  q.L_widths = j.value("L_widths", q.L_widths);
  q.fine_nodes = j.value("fine_nodes", q.fine_nodes);
  q.inner_nodes = j.value("inner_nodes", q.inner_nodes);
  if (q.nodes_per_axis < 2 || q.fine_nodes < 2 || q.inner_nodes < 2 || !(q.L_widths > 0))
    throw ConfigError("quadrature spec out of range");
  return q;
}

}  // namespace zfw
