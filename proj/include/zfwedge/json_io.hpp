#pragma once

#include "json.hpp"
#include "zfwedge/common.hpp"
#include "zfwedge/scattering.hpp"
#include "zfwedge/testfn.hpp"
#include "zfwedge/wavefn.hpp"

namespace zfw {

using json = nlohmann::json;

inline json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }
cplx json_cplx(const json& j);

json model_to_json(const ScatteringData& s);
// Rebuilds a model from {N, m1, family, specs[]}; derived data is ignored.
ScatteringData model_from_json(const json& j);

json report_to_json(const VerificationReport& r, bool with_grid = true);
json reports_to_json(const std::vector<VerificationReport>& rs, bool with_grid = true);

// {wedge, center, radii, weights{a: [re, im]}, quad{nodes_t, nodes_x}}; boost and terms when present.
json testfn_to_json(const TestFunction& f);
TestFunction testfn_from_json(const ScatteringData& s, const json& j);

// {n, family: "d0", gaussians[{center, width, weights}], lambda, cn{poles[], mirrors[]}}
json wavefn_to_json(const WaveFunction& w);
WaveFunction wavefn_from_json(const ScatteringData& s, const json& j);
json quad_to_json(const QuadSpec& q);
QuadSpec quad_from_json(const json& j);

}  // namespace zfw
