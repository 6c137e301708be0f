#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace zfw {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

// Evaluation closer than the guard radius to a known pole.
class PoleHit : public std::runtime_error {
 public:
  PoleHit(cplx where, const std::string& what) : std::runtime_error(what), location(where) {}
  cplx location;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Worker count: ZFWEDGE_THREADS if set, else hardware concurrency.
int worker_count();

// Runs body(i) for i in [0, n) on the worker pool. Scheduling is dynamic;
// callers that reduce must store per-index results.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Pairwise (cascade) summation; order independent of thread count.
cplx pairwise_sum(const cplx* v, std::size_t n);
double pairwise_sum(const double* v, std::size_t n);

std::string format_cplx(cplx z);

}  // namespace zfw
