#pragma once

#include <cstdint>

#include "zfwedge/json_io.hpp"
#include "zfwedge/operators.hpp"

namespace zfw {

// Inputs of one weak-commutator run.
struct CommutatorCase {
  TestFunction f;
  TestFunction g;
  WaveFunction phi;
  WaveFunction psi;
};

// Seeded draw: real bumps on the elementary pair, f deep in the left wedge and g
// in the right one; Phi and Psi are generator vectors with n Gaussian slots.
CommutatorCase draw_commutator_case(const ScatteringData& s, int n, std::uint64_t seed, bool zero_factor = true);

// Two-particle vectors whose only components are (v, bar v) and (bar v, v).
CommutatorCase pair_component_case(const ScatteringData& s, std::uint64_t seed, bool zero_factor);

WeakCommResult run_case(const CommutatorCase& c, const WeakCommOptions& opt = {});

// {model, f_spec, g_spec, phi_spec, psi_spec, quad, results{value, error_estimate, scale, normalized, ...}}
json commutator_manifest(const ScatteringData& s, const CommutatorCase& c, const WeakCommOptions& opt,
                         const WeakCommResult& r);

}  // namespace zfw
