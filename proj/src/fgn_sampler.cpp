#include <fftw3.h>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <string>

#include "rbessel/errors.hpp"
#include "rbessel/fbm.hpp"

namespace rbessel::fbm {

namespace {

// FFTW's planner is not re-entrant; execution with new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <class T>
struct FftwDeleter {
  void operator()(T* p) const noexcept { fftw_free(p); }
};
template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter<T>>;

template <class T>
FftwBuffer<T> fftw_alloc(std::size_t count) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * count));
  if (!p) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

}  // namespace

// Circulant embedding of size M = 2N, N >= n-1. The sample is the real
// output of a length-M inverse DFT applied to Hermitian-symmetric Gaussian
// weights, so only N+1 complex inputs are drawn.
struct StationaryGaussianSampler::Circulant {
  std::size_t half = 0;           // N
  std::vector<double> weights;    // N+1 spectral amplitudes
  fftw_plan plan = nullptr;       // c2r, out-of-place, length 2N

  ~Circulant() {
    if (plan) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

struct StationaryGaussianSampler::Cholesky {
  Eigen::MatrixXd lower;
};

// Durbin-Levinson recursion; reflection coefficients and innovation
// variances are computed once.
struct StationaryGaussianSampler::Hosking {
  std::vector<double> reflection;  // reflection[t], t >= 1
  std::vector<double> innovation_sd;
};

namespace {

std::vector<double> embedding_spectrum(std::size_t half, const StationaryGaussianSampler::Autocov& c) {
  const std::size_t m = 2 * half;
  auto row = fftw_alloc<double>(m);
  auto spec = fftw_alloc<fftw_complex>(half + 1);
  for (std::size_t j = 0; j <= half; ++j) row[j] = c(j);
  for (std::size_t j = half + 1; j < m; ++j) row[j] = row[m - j];
  fftw_plan p;
  {
    std::lock_guard lock(planner_mutex());
    p = fftw_plan_dft_r2c_1d(static_cast<int>(m), row.get(), spec.get(), FFTW_ESTIMATE);
  }
  fftw_execute(p);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
  std::vector<double> eig(half + 1);
  for (std::size_t k = 0; k <= half; ++k) eig[k] = spec[k][0];
  return eig;
}

}  // namespace

StationaryGaussianSampler::StationaryGaussianSampler(std::size_t n, Autocov autocov,
                                                     FgnMethod requested,
                                                     const FgnOptions& options)
    : n_(n), requested_(requested), method_(requested) {
  if (n == 0) throw DomainError("sample length must be at least 1");
  if (!autocov) throw DomainError("autocovariance function is empty");

  auto build_cholesky = [&] {
    if (n > options.cholesky_max_n) {
      throw MethodError("Cholesky sampler capped at n <= " + std::to_string(options.cholesky_max_n) +
                        ", requested n = " + std::to_string(n));
    }
    const auto size = static_cast<Eigen::Index>(n);
    std::vector<double> c(n);
    for (std::size_t k = 0; k < n; ++k) c[k] = autocov(k);
    Eigen::MatrixXd cov(size, size);
    for (Eigen::Index i = 0; i < size; ++i)
      for (Eigen::Index j = 0; j < size; ++j) cov(i, j) = c[static_cast<std::size_t>(std::abs(i - j))];
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw MethodError("covariance matrix is not positive definite");
    cholesky_ = std::make_unique<Cholesky>();
    cholesky_->lower = llt.matrixL();
    method_ = FgnMethod::Cholesky;
  };

  auto build_hosking = [&] {
    std::vector<double> c(n);
    for (std::size_t k = 0; k < n; ++k) c[k] = autocov(k);
    if (!(c[0] > 0.0)) throw MethodError("covariance matrix is not positive definite");
    auto h = std::make_unique<Hosking>();
    h->reflection.assign(n, 0.0);
    h->innovation_sd.assign(n, 0.0);
    h->innovation_sd[0] = std::sqrt(c[0]);
    std::vector<double> phi(n, 0.0), prev(n, 0.0);
    double v = c[0];
    for (std::size_t t = 1; t < n; ++t) {
      double num = c[t];
      for (std::size_t j = 1; j < t; ++j) num -= phi[j] * c[t - j];
      const double k = num / v;
      prev.swap(phi);
      for (std::size_t j = 1; j < t; ++j) phi[j] = prev[j] - k * prev[t - j];
      phi[t] = k;
      v *= (1.0 - k * k);
      if (!(v > 0.0)) throw MethodError("covariance matrix is not positive definite");
      h->reflection[t] = k;
      h->innovation_sd[t] = std::sqrt(v);
    }
    hosking_ = std::move(h);
    method_ = FgnMethod::Hosking;
  };

  auto build_circulant = [&]() -> bool {
    const std::size_t half = next_smooth_size(std::max<std::size_t>(n - 1, 1));
    std::vector<double> eig = embedding_spectrum(half, autocov);
    const double max_eig = *std::max_element(eig.begin(), eig.end());
    const double min_eig = *std::min_element(eig.begin(), eig.end());
    min_rel_eig_ = max_eig > 0.0 ? min_eig / max_eig : -1.0;
    if (!(max_eig > 0.0) || min_eig < -options.negative_tol * max_eig) return false;

    auto circ = std::make_unique<Circulant>();
    circ->half = half;
    const double m = 2.0 * static_cast<double>(half);
    circ->weights.resize(half + 1);
    for (std::size_t k = 0; k <= half; ++k) {
      const double lam = std::max(eig[k], 0.0);
      const bool real_mode = (k == 0 || k == half);
      circ->weights[k] = std::sqrt(lam / (real_mode ? m : 2.0 * m));
    }
    auto in = fftw_alloc<fftw_complex>(half + 1);
    auto out = fftw_alloc<double>(2 * half);
    {
      std::lock_guard lock(planner_mutex());
      circ->plan = fftw_plan_dft_c2r_1d(static_cast<int>(2 * half), in.get(), out.get(), FFTW_ESTIMATE);
    }
    circulant_ = std::move(circ);
    method_ = FgnMethod::CirculantEmbedding;
    return true;
  };

  switch (requested) {
    case FgnMethod::Cholesky: build_cholesky(); break;
    case FgnMethod::Hosking: build_hosking(); break;
    case FgnMethod::CirculantEmbedding:
      if (build_circulant()) break;
      if (!options.fallback || *options.fallback == FgnMethod::CirculantEmbedding) {
        throw MethodError("circulant embedding spectrum is negative (min/max = " +
                          std::to_string(min_rel_eig_) + ") and fallback is disabled");
      }
      if (*options.fallback == FgnMethod::Cholesky) build_cholesky();
      else build_hosking();
      break;
  }
}

StationaryGaussianSampler::~StationaryGaussianSampler() = default;
StationaryGaussianSampler::StationaryGaussianSampler(StationaryGaussianSampler&&) noexcept = default;
StationaryGaussianSampler& StationaryGaussianSampler::operator=(StationaryGaussianSampler&&) noexcept = default;

std::vector<double> StationaryGaussianSampler::sample(std::uint64_t seed) const {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(n_);

  switch (method_) {
    case FgnMethod::CirculantEmbedding: {
      const std::size_t half = circulant_->half;
      const auto& w = circulant_->weights;
      auto in = fftw_alloc<fftw_complex>(half + 1);
      auto out = fftw_alloc<double>(2 * half);
      in[0][0] = w[0] * normal(engine);
      in[0][1] = 0.0;
      for (std::size_t k = 1; k < half; ++k) {
        in[k][0] = w[k] * normal(engine);
        in[k][1] = w[k] * normal(engine);
      }
      in[half][0] = w[half] * normal(engine);
      in[half][1] = 0.0;
      fftw_execute_dft_c2r(circulant_->plan, in.get(), out.get());
      std::copy(out.get(), out.get() + n_, x.begin());
      break;
    }
    case FgnMethod::Cholesky: {
      Eigen::VectorXd z(static_cast<Eigen::Index>(n_));
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(engine);
      Eigen::VectorXd y = cholesky_->lower.triangularView<Eigen::Lower>() * z;
      std::copy(y.data(), y.data() + y.size(), x.begin());
      break;
    }
    case FgnMethod::Hosking: {
      const auto& refl = hosking_->reflection;
      const auto& sd = hosking_->innovation_sd;
      std::vector<double> phi(n_, 0.0), prev(n_, 0.0);
      x[0] = sd[0] * normal(engine);
      for (std::size_t t = 1; t < n_; ++t) {
        const double k = refl[t];
        prev.swap(phi);
        for (std::size_t j = 1; j < t; ++j) phi[j] = prev[j] - k * prev[t - j];
        phi[t] = k;
        double mean = 0.0;
        for (std::size_t j = 1; j <= t; ++j) mean += phi[j] * x[t - j];
        x[t] = mean + sd[t] * normal(engine);
      }
      break;
    }
  }
  return x;
}

}  // namespace rbessel::fbm
