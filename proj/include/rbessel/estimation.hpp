#pragma once

// Power-variation estimators of H and sigma, and the ratio estimator of the
// drift coefficient a.

#include <cstddef>
#include <map>
#include <span>
#include <string>

#include "rbessel/fbm.hpp"

namespace rbessel::est {

using fbm::HurstIndex;

// Non-owning view of observations xi(t_k), t_k = kT/n, k = 0..n.
class ObservedPath {
 public:
  // Throws DomainError if fewer than two values, a non-finite value, or a
  // non-positive horizon.
  ObservedPath(std::span<const double> values, double horizon);

  std::span<const double> values() const noexcept { return values_; }
  double horizon() const noexcept { return horizon_; }
  std::size_t steps() const noexcept { return values_.size() - 1; }

 private:
  std::span<const double> values_;
  double horizon_;
};

struct EstimationResult {
  double estimate = 0.0;
  bool valid = false;
  std::map<std::string, double> diagnostics;
};

// Sum of squared first differences.
double v12(const ObservedPath& path);
// Sum of squared second differences. Needs n >= 2.
double v22(const ObservedPath& path);

// OpenMP versions. Partial sums are formed over fixed blocks and combined in
// block order, so the result does not depend on the thread count; it may
// differ from the serial sum in the last bits.
double v12_parallel(const ObservedPath& path);
double v22_parallel(const ObservedPath& path);

// H_hat = log(4 - v22/v12) / (2 log 2). valid iff the log argument is in
// (1, 2). Argument <= 0 gives estimate = NaN. Throws DegeneratePathError
// when v12 == 0.
EstimationResult estimate_hurst(const ObservedPath& path);

// sigma_hat = T^{-H} sqrt(n^{2H-1} v12). valid iff v12 > 0.
EstimationResult estimate_sigma(const ObservedPath& path, HurstIndex h);

// estimate_hurst followed by estimate_sigma at the estimated H.
EstimationResult estimate_sigma_plugin(const ObservedPath& path);

// a_hat = xi(T) / S with S = (T/n) sum_{i<n} 1 / max(xi(t_i), floor).
EstimationResult estimate_drift(const ObservedPath& path, double floor = 1e-3);

}  // namespace rbessel::est
