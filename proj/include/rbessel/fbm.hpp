#pragma once

// Fractional Gaussian noise and fractional Brownian motion on uniform grids.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

namespace rbessel::fbm {

class HurstIndex {
 public:
  // Throws DomainError unless 0 < value < 1.
  explicit HurstIndex(double value);
  double value() const noexcept { return value_; }

 private:
  double value_;
};

// Cov(B^H(s), B^H(t)) = (t^{2H} + s^{2H} - |t-s|^{2H}) / 2.
double fbm_cov(double s, double t, HurstIndex h);

// Autocovariance of unit-spacing fGn at lag k:
// ((k+1)^{2H} - 2k^{2H} + |k-1|^{2H}) / 2. For large k the second difference
// is evaluated through its binomial series to avoid cancellation.
double fgn_autocov(std::size_t k, HurstIndex h);

enum class FgnMethod { CirculantEmbedding, Cholesky, Hosking };

std::string_view to_string(FgnMethod m) noexcept;
// Accepts "circulant", "cholesky", "hosking" (and the enum spellings).
std::optional<FgnMethod> parse_method(std::string_view s) noexcept;

struct FgnOptions {
  // Used when the circulant spectrum has an eigenvalue below
  // -negative_tol * max eigenvalue. nullopt disables the fallback.
  std::optional<FgnMethod> fallback = FgnMethod::Cholesky;
  double negative_tol = 1e-9;
  std::size_t cholesky_max_n = 8192;
};

// Exact sampler for a zero-mean stationary Gaussian sequence of length n with
// a given autocovariance. Construction does the expensive one-off work (the
// embedding spectrum or the Cholesky factor); sample() is const and may be
// called concurrently from any number of threads.
class StationaryGaussianSampler {
 public:
  using Autocov = std::function<double(std::size_t lag)>;

  StationaryGaussianSampler(std::size_t n, Autocov autocov, FgnMethod requested,
                            const FgnOptions& options = {});
  ~StationaryGaussianSampler();
  StationaryGaussianSampler(StationaryGaussianSampler&&) noexcept;
  StationaryGaussianSampler& operator=(StationaryGaussianSampler&&) noexcept;

  std::size_t size() const noexcept { return n_; }
  FgnMethod requested_method() const noexcept { return requested_; }
  // Method actually in use after any fallback.
  FgnMethod method() const noexcept { return method_; }
  // Smallest embedding eigenvalue relative to the largest; only meaningful
  // when circulant embedding was attempted.
  double min_relative_eigenvalue() const noexcept { return min_rel_eig_; }

  std::vector<double> sample(std::uint64_t seed) const;

 private:
  struct Circulant;
  struct Cholesky;
  struct Hosking;

  std::size_t n_;
  FgnMethod requested_;
  FgnMethod method_;
  double min_rel_eig_ = 0.0;
  std::unique_ptr<Circulant> circulant_;
  std::unique_ptr<Cholesky> cholesky_;
  std::unique_ptr<Hosking> hosking_;
};

struct FgnSample {
  std::vector<double> increments;
  HurstIndex hurst;
  std::uint64_t seed;
  FgnMethod method;  // method actually used
};

// Unit-spacing fGn sampler: StationaryGaussianSampler bound to fgn_autocov.
class FgnSampler {
 public:
  FgnSampler(std::size_t n, HurstIndex h, FgnMethod method = FgnMethod::CirculantEmbedding,
             const FgnOptions& options = {});

  std::size_t size() const noexcept { return impl_.size(); }
  HurstIndex hurst() const noexcept { return hurst_; }
  FgnMethod method() const noexcept { return impl_.method(); }

  FgnSample sample(std::uint64_t seed) const;

 private:
  HurstIndex hurst_;
  StationaryGaussianSampler impl_;
};

FgnSample sample_fgn(std::size_t n, HurstIndex h, std::uint64_t seed,
                     FgnMethod method = FgnMethod::CirculantEmbedding,
                     const FgnOptions& options = {});

// fBm on t_k = kT/n, k = 0..n, with values[0] = 0.
struct FbmPath {
  std::vector<double> values;
  double horizon;
  HurstIndex hurst;

  std::size_t steps() const noexcept { return values.size() - 1; }
  double time(std::size_t k) const noexcept;
  std::vector<double> times() const;
};

// values[k] = (T/n)^H * sum_{j<k} increments[j].
FbmPath fbm_from_fgn(const FgnSample& fgn, double horizon);

FbmPath sample_fbm(std::size_t n, double horizon, HurstIndex h, std::uint64_t seed,
                   FgnMethod method = FgnMethod::CirculantEmbedding,
                   const FgnOptions& options = {});

// Uniform grid time t_k = kT/n with t_n == T exactly.
inline double grid_time(std::size_t k, std::size_t n, double horizon) noexcept {
  return k == n ? horizon : horizon * (static_cast<double>(k) / static_cast<double>(n));
}

// Smallest integer >= n whose only prime factors are 2, 3, 5 and 7.
std::size_t next_smooth_size(std::size_t n) noexcept;

}  // namespace rbessel::fbm
