#include "rbessel/fbm.hpp"

#include <cmath>
#include <string>

#include "rbessel/errors.hpp"

namespace rbessel::fbm {

HurstIndex::HurstIndex(double value) : value_(value) {
  if (!(value > 0.0 && value < 1.0)) {
    throw DomainError("Hurst index must lie in (0, 1), got " + std::to_string(value));
  }
}

double fbm_cov(double s, double t, HurstIndex h) {
  if (!(s >= 0.0) || !(t >= 0.0) || !std::isfinite(s) || !std::isfinite(t)) {
    throw DomainError("fbm_cov: times must be finite and non-negative");
  }
  const double two_h = 2.0 * h.value();
  return 0.5 * (std::pow(t, two_h) + std::pow(s, two_h) - std::pow(std::fabs(t - s), two_h));
}

namespace {

// Below this lag the closed form is accurate to a few ulps.
constexpr std::size_t kSeriesLag = 8;

// (1+x)^alpha + (1-x)^alpha - 2 = 2 * sum_{j>=1} binom(alpha, 2j) x^{2j}
double symmetric_second_difference(double alpha, double x) {
  const double x2 = x * x;
  double binom = 1.0;  // binom(alpha, m), advanced two orders per term
  double xpow = 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 64; ++j) {
    const int m = 2 * j;
    binom *= (alpha - (m - 2)) / (m - 1);
    binom *= (alpha - (m - 1)) / m;
    xpow *= x2;
    const double term = binom * xpow;
    sum += term;
    if (std::fabs(term) <= 1e-18 * std::fabs(sum)) break;
  }
  return 2.0 * sum;
}

}  // namespace

double fgn_autocov(std::size_t k, HurstIndex h) {
  const double alpha = 2.0 * h.value();
  if (k == 0) return 1.0;
  const double kd = static_cast<double>(k);
  if (k < kSeriesLag) {
    return 0.5 * (std::pow(kd + 1.0, alpha) - 2.0 * std::pow(kd, alpha) +
                  std::pow(kd - 1.0, alpha));
  }
  return 0.5 * std::pow(kd, alpha) * symmetric_second_difference(alpha, 1.0 / kd);
}

std::string_view to_string(FgnMethod m) noexcept {
  switch (m) {
    case FgnMethod::CirculantEmbedding: return "circulant";
    case FgnMethod::Cholesky: return "cholesky";
    case FgnMethod::Hosking: return "hosking";
  }
  return "unknown";
}

std::optional<FgnMethod> parse_method(std::string_view s) noexcept {
  if (s == "circulant" || s == "CirculantEmbedding") return FgnMethod::CirculantEmbedding;
  if (s == "cholesky" || s == "Cholesky") return FgnMethod::Cholesky;
  if (s == "hosking" || s == "Hosking") return FgnMethod::Hosking;
  return std::nullopt;
}

FgnSampler::FgnSampler(std::size_t n, HurstIndex h, FgnMethod method, const FgnOptions& options)
    : hurst_(h),
      impl_(n, [h](std::size_t lag) { return fgn_autocov(lag, h); }, method, options) {}

FgnSample FgnSampler::sample(std::uint64_t seed) const {
  return FgnSample{impl_.sample(seed), hurst_, seed, impl_.method()};
}

FgnSample sample_fgn(std::size_t n, HurstIndex h, std::uint64_t seed, FgnMethod method,
                     const FgnOptions& options) {
  return FgnSampler(n, h, method, options).sample(seed);
}

double FbmPath::time(std::size_t k) const noexcept {
  return grid_time(k, steps(), horizon);
}

std::vector<double> FbmPath::times() const {
  std::vector<double> t(values.size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = time(k);
  return t;
}

FbmPath fbm_from_fgn(const FgnSample& fgn, double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError("fbm horizon must be finite and positive");
  }
  const std::size_t n = fgn.increments.size();
  if (n == 0) throw DomainError("fbm path needs at least one increment");
  const double scale = std::pow(horizon / static_cast<double>(n), fgn.hurst.value());
  std::vector<double> values(n + 1);
  values[0] = 0.0;
  double cumulative = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    cumulative += fgn.increments[k];
    values[k + 1] = scale * cumulative;
  }
  return FbmPath{std::move(values), horizon, fgn.hurst};
}

FbmPath sample_fbm(std::size_t n, double horizon, HurstIndex h, std::uint64_t seed,
                   FgnMethod method, const FgnOptions& options) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError("fbm horizon must be finite and positive");
  }
  return fbm_from_fgn(sample_fgn(n, h, seed, method, options), horizon);
}

std::size_t next_smooth_size(std::size_t n) noexcept {
  if (n <= 1) return 1;
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u, 7u}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

}  // namespace rbessel::fbm
