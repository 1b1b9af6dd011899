#include "rbessel/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "rbessel/errors.hpp"

namespace rbessel::est {

ObservedPath::ObservedPath(std::span<const double> values, double horizon)
    : values_(values), horizon_(horizon) {
  if (values.size() < 2) throw DomainError("observed path needs at least two values");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("horizon must be finite and > 0");
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainError("observed path contains a non-finite value");
  }
}

double v12(const ObservedPath& path) {
  const auto x = path.values();
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    const double d = x[k + 1] - x[k];
    sum += d * d;
  }
  return sum;
}

double v22(const ObservedPath& path) {
  const auto x = path.values();
  if (x.size() < 3) throw DomainError("second-order variation needs n >= 2");
  double sum = 0.0;
  for (std::size_t k = 0; k + 2 < x.size(); ++k) {
    const double d = x[k + 2] - 2.0 * x[k + 1] + x[k];
    sum += d * d;
  }
  return sum;
}

namespace {

constexpr std::size_t kBlock = 4096;

template <class Term>
double blocked_sum(std::size_t terms, Term term) {
  const std::size_t blocks = (terms + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(terms, lo + kBlock);
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += term(k);
    partial[static_cast<std::size_t>(b)] = s;
  }
  double sum = 0.0;
  for (double s : partial) sum += s;
  return sum;
}

double sigma_formula(double v12_value, std::size_t n, double horizon, double h) {
  const double nd = static_cast<double>(n);
  return std::pow(horizon, -h) * std::sqrt(std::pow(nd, 2.0 * h - 1.0) * v12_value);
}

}  // namespace

double v12_parallel(const ObservedPath& path) {
  const auto x = path.values();
  return blocked_sum(x.size() - 1, [x](std::size_t k) {
    const double d = x[k + 1] - x[k];
    return d * d;
  });
}

double v22_parallel(const ObservedPath& path) {
  const auto x = path.values();
  if (x.size() < 3) throw DomainError("second-order variation needs n >= 2");
  return blocked_sum(x.size() - 2, [x](std::size_t k) {
    const double d = x[k + 2] - 2.0 * x[k + 1] + x[k];
    return d * d;
  });
}

EstimationResult estimate_hurst(const ObservedPath& path) {
  const double first = v12(path);
  const double second = v22(path);
  if (first == 0.0) throw DegeneratePathError("v12 = 0: all observations are equal");
  const double ratio = second / first;
  const double arg = 4.0 - ratio;

  EstimationResult r;
  r.diagnostics = {{"v12", first}, {"v22", second}, {"ratio", ratio}, {"log_argument", arg}};
  if (arg > 0.0) {
    r.estimate = std::log(arg) / (2.0 * std::numbers::ln2);
    r.valid = arg > 1.0 && arg < 2.0;
  } else {
    r.estimate = std::numeric_limits<double>::quiet_NaN();
    r.valid = false;
  }
  return r;
}

EstimationResult estimate_sigma(const ObservedPath& path, HurstIndex h) {
  const double first = v12(path);
  EstimationResult r;
  r.diagnostics = {{"v12", first}, {"hurst", h.value()}};
  if (first > 0.0) {
    r.estimate = sigma_formula(first, path.steps(), path.horizon(), h.value());
    r.valid = true;
  }
  return r;
}

EstimationResult estimate_sigma_plugin(const ObservedPath& path) {
  EstimationResult hurst = estimate_hurst(path);
  EstimationResult r;
  r.diagnostics = hurst.diagnostics;
  r.diagnostics["hurst_estimate"] = hurst.estimate;
  r.diagnostics["hurst_valid"] = hurst.valid ? 1.0 : 0.0;
  const double first = hurst.diagnostics.at("v12");
  if (std::isnan(hurst.estimate)) {
    r.estimate = std::numeric_limits<double>::quiet_NaN();
    r.valid = false;
    return r;
  }
  // The raw plug-in value is reported even when H_hat is outside (0, 1/2).
  r.estimate = sigma_formula(first, path.steps(), path.horizon(), hurst.estimate);
  r.valid = hurst.valid && std::isfinite(r.estimate);
  return r;
}

EstimationResult estimate_drift(const ObservedPath& path, double floor) {
  if (!(floor > 0.0) || !std::isfinite(floor)) throw DomainError("drift floor must be > 0");
  const auto x = path.values();
  const std::size_t n = path.steps();
  const double resolution = static_cast<double>(n) / path.horizon();
  double inverse_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) inverse_sum += 1.0 / std::max(x[i], floor);
  const double integral_sum = inverse_sum / resolution;

  EstimationResult r;
  r.estimate = x[n] / integral_sum;
  r.valid = integral_sum > 0.0 && std::isfinite(r.estimate);
  r.diagnostics = {{"integral_sum", integral_sum},
                   {"terminal_value", x[n]},
                   {"resolution", resolution},
                   {"floor", floor},
                   {"integral_sum_over_sqrt_T", integral_sum / std::sqrt(path.horizon())}};
  return r;
}

}  // namespace rbessel::est
