#include "zfwedge/meromorphic.hpp"

#include <algorithm>
#include <cmath>

namespace zfw {

namespace {

constexpr double kSnap = 1e-12;

bool offset_less(cplx a, cplx b) {
  if (a.imag() != b.imag()) return a.imag() < b.imag();
  return a.real() < b.real();
}

// Difference reduced to Im in (-pi, pi].
cplx wrap(cplx d) {
  reduce_offset(d);
  return d;
}

cplx sinh_ratio(cplx z, cplx a, cplx b) {
  const cplx u = 0.5 * (z - a);
  const cplx v = 0.5 * (z - b);
  if (std::min(u.real(), v.real()) > 15.0) {
    return std::exp(u - v) * (1.0 - std::exp(-2.0 * u)) / (1.0 - std::exp(-2.0 * v));
  }
  if (std::max(u.real(), v.real()) < -15.0) {
    return std::exp(v - u) * (1.0 - std::exp(2.0 * u)) / (1.0 - std::exp(2.0 * v));
  }
  return std::sinh(u) / std::sinh(v);
}

std::vector<PoleEntry> translates_in_strip(const std::vector<cplx>& offsets, double lo, double hi) {
  std::vector<PoleEntry> out;
  for (cplx b : offsets) {
    const int kmin = static_cast<int>(std::floor((lo - b.imag()) / (2 * kPi))) - 1;
    const int kmax = static_cast<int>(std::ceil((hi - b.imag()) / (2 * kPi))) + 1;
    for (int k = kmin; k <= kmax; ++k) {
      const cplx p = b + cplx(0.0, 2 * kPi * k);
      if (p.imag() <= lo || p.imag() >= hi) continue;
      auto it = std::find_if(out.begin(), out.end(),
                             [&](const PoleEntry& e) { return std::abs(e.location - p) < MeromorphicExpr::kGuard; });
      if (it == out.end()) {
        out.push_back({p, 1});
      } else {
        ++it->order;
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const PoleEntry& x, const PoleEntry& y) { return offset_less(x.location, y.location); });
  return out;
}

}  // namespace

int reduce_offset(cplx& a) {
  double y = a.imag();
  int k = static_cast<int>(std::ceil((y - kPi) / (2 * kPi)));
  y -= 2 * kPi * k;
  if (std::fabs(y + kPi) < kSnap) {
    y = kPi;
    k -= 1;
  } else if (std::fabs(y - kPi) < kSnap) {
    y = kPi;
  }
  a = cplx(a.real(), y);
  return k;
}

MeromorphicExpr MeromorphicExpr::constant(cplx c) {
  MeromorphicExpr e;
  e.constant_ = c;
  return e;
}

MeromorphicExpr MeromorphicExpr::block(cplx zero, cplx pole) {
  MeromorphicExpr e;
  e.zeros_.push_back(zero);
  e.poles_.push_back(pole);
  e.canonicalize();
  return e;
}

void MeromorphicExpr::canonicalize() {
  // sinh((z - a)/2) = (-1)^k sinh((z - a')/2) with a' = a - 2 pi i k
  for (cplx& a : zeros_) {
    if (reduce_offset(a) % 2 != 0) constant_ = -constant_;
  }
  for (cplx& b : poles_) {
    if (reduce_offset(b) % 2 != 0) constant_ = -constant_;
  }
  std::vector<cplx> kept_zeros;
  std::vector<bool> used(poles_.size(), false);
  for (cplx a : zeros_) {
    bool cancelled = false;
    for (std::size_t j = 0; j < poles_.size(); ++j) {
      if (!used[j] && std::abs(poles_[j] - a) < kCancel) {
        used[j] = true;
        cancelled = true;
        break;
      }
    }
    if (!cancelled) kept_zeros.push_back(a);
  }
  std::vector<cplx> kept_poles;
  for (std::size_t j = 0; j < poles_.size(); ++j) {
    if (!used[j]) kept_poles.push_back(poles_[j]);
  }
  std::sort(kept_zeros.begin(), kept_zeros.end(), offset_less);
  std::sort(kept_poles.begin(), kept_poles.end(), offset_less);
  zeros_ = std::move(kept_zeros);
  poles_ = std::move(kept_poles);
}

MeromorphicExpr MeromorphicExpr::operator*(const MeromorphicExpr& other) const {
  MeromorphicExpr e = *this;
  e *= other;
  return e;
}

MeromorphicExpr& MeromorphicExpr::operator*=(const MeromorphicExpr& other) {
  constant_ *= other.constant_;
  zeros_.insert(zeros_.end(), other.zeros_.begin(), other.zeros_.end());
  poles_.insert(poles_.end(), other.poles_.begin(), other.poles_.end());
  canonicalize();
  return *this;
}

MeromorphicExpr MeromorphicExpr::inverse() const {
  MeromorphicExpr e;
  e.constant_ = 1.0 / constant_;
  e.zeros_ = poles_;
  e.poles_ = zeros_;
  e.canonicalize();
  return e;
}

MeromorphicExpr MeromorphicExpr::shifted(cplx s) const {
  MeromorphicExpr e;
  e.constant_ = constant_;
  for (cplx a : zeros_) e.zeros_.push_back(a - s);
  for (cplx b : poles_) e.poles_.push_back(b - s);
  e.canonicalize();
  return e;
}

cplx MeromorphicExpr::eval_unguarded(cplx z) const {
  cplx v = constant_;
  for (std::size_t j = 0; j < zeros_.size(); ++j) v *= sinh_ratio(z, zeros_[j], poles_[j]);
  return v;
}

cplx MeromorphicExpr::operator()(cplx z) const {
  for (cplx b : poles_) {
    const cplx d = wrap(z - b);
    if (std::abs(d) < kGuard) throw PoleHit(z - d, "evaluation at a pole " + format_cplx(z - d));
  }
  return eval_unguarded(z);
}

std::vector<PoleEntry> MeromorphicExpr::poles_in_strip(double lo, double hi) const {
  return translates_in_strip(poles_, lo, hi);
}

std::vector<PoleEntry> MeromorphicExpr::zeros_in_strip(double lo, double hi) const {
  return translates_in_strip(zeros_, lo, hi);
}

int MeromorphicExpr::pole_order(cplx p) const {
  int order = 0;
  for (cplx b : poles_) {
    if (std::abs(wrap(p - b)) < kGuard) ++order;
  }
  return order;
}

ResidueValue MeromorphicExpr::residue(cplx p) const {
  const int order = pole_order(p);
  if (order == 0) throw NotAPole("no pole at " + format_cplx(p));
  ResidueValue r;
  r.location = p;
  r.order = order;

  constexpr int kCircle = 64;
  constexpr double kRadius = 1e-3;
  std::vector<cplx> samples(kCircle);
  for (int j = 0; j < kCircle; ++j) {
    const cplx step = kRadius * std::exp(cplx(0.0, 2 * kPi * j / kCircle));
    samples[j] = step * eval_unguarded(p + step);
  }
  r.circle_value = pairwise_sum(samples.data(), samples.size()) / static_cast<double>(kCircle);

  if (order > 1) {
    r.value = r.circle_value;
    return r;
  }
  cplx rest = constant_;
  for (cplx a : zeros_) rest *= std::sinh(0.5 * (p - a));
  bool removed = false;
  for (cplx b : poles_) {
    if (!removed && std::abs(wrap(p - b)) < kGuard) {
      // d/dz sinh((z - b)/2) at p
      rest /= 0.5 * std::cosh(0.5 * (p - b));
      removed = true;
    } else {
      rest /= std::sinh(0.5 * (p - b));
    }
  }
  r.value = rest;
  const double scale = std::max(std::abs(r.value), 1e-300);
  r.consistent = std::abs(r.value - r.circle_value) <= 1e-8 * scale;
  return r;
}

}  // namespace zfw
