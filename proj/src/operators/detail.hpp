#pragma once

#include <functional>
#include <optional>

#include "zfwedge/testfn.hpp"
#include "zfwedge/wavefn.hpp"

namespace zfw::detail {

inline constexpr int kMaxArgs = 8;

FockVector map_terms(const FockVector& v, const std::function<std::optional<WaveFunction>(const WaveFunction&)>& op);
void require_model(const TestFunction& f, const ScatteringData& s);

// One way of producing component c from the left index a, with the coefficient sqrt(2 pi |R|).
struct FusionTerm {
  int a = 0;
  int b = 0;
  double angle_ab = 0.0;
  double angle_ba = 0.0;
  double coeff = 0.0;
};
// Per result component c (index c - 1), the fusions (a b) -> c with a in the support of f.
std::vector<std::vector<FusionTerm>> fusion_terms(const ScatteringData& s, const TestFunction& f);

}  // namespace zfw::detail
