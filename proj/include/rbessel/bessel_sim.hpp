#pragma once

// Euler simulation of the epsilon-regularised rough Bessel equation
//
//   X(t) = x0 + int_0^t a / (X(s) 1{X(s) > 0} + eps) ds + sigma B^H(t)
//
// with the integral functional L(t) = int_0^t ds / (X(s) 1{X(s) > 0} + eps)
// tracked alongside, so that X = x0 + a L + sigma B^H on every grid node.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "rbessel/fbm.hpp"

namespace rbessel::sim {

using fbm::FbmPath;
using fbm::HurstIndex;

struct ModelParams {
  double x0 = 1.0;
  double a = 2.0;
  double sigma = 1.0;
  HurstIndex hurst{0.3};
  double epsilon = 1e-4;

  // Throws DomainError unless x0, a, sigma, epsilon are finite and > 0.
  void validate() const;
};

struct BesselPath {
  std::vector<double> x;
  std::vector<double> l;
  ModelParams params;
  std::shared_ptr<const FbmPath> driver;

  std::size_t steps() const noexcept { return x.size() - 1; }
  double horizon() const noexcept { return driver->horizon; }
  double time(std::size_t k) const noexcept { return driver->time(k); }
};

struct EulerStep {
  double x_next;
  double dl;
};

// One left-point step. dB is the driver increment over the step (not yet
// multiplied by sigma).
EulerStep euler_step(double x, double dB, const ModelParams& params, double dt);

BesselPath simulate_prelimit(const ModelParams& params, std::shared_ptr<const FbmPath> driver);

// Terminal-free variant used by the Monte Carlo harness: fills `x` only.
void simulate_values(const ModelParams& params, std::span<const double> driver_values,
                     double horizon, std::vector<double>& x);

// One path per epsilon, all sharing `driver`. epsilons must be strictly
// decreasing and positive; params_base.epsilon is ignored.
std::vector<BesselPath> simulate_epsilon_ladder(const ModelParams& params_base,
                                                std::span<const double> epsilons,
                                                std::shared_ptr<const FbmPath> driver);

// Pointwise check that x_{eps_{i+1}}[k] >= x_{eps_i}[k] along a ladder.
struct LadderReport {
  std::size_t nodes_checked = 0;
  std::size_t exact_violations = 0;      // strict ordering broken at all
  std::size_t tolerance_violations = 0;  // broken beyond 1e-12 (1 + |x|)
  double worst_gap = 0.0;                // largest x_coarse - x_fine seen
  std::size_t worst_rung = 0;
  std::size_t worst_node = 0;
  std::vector<double> sup_gaps;          // sup_k |x_{i+1}[k] - x_i[k]| per rung

  bool ordered() const noexcept { return exact_violations == 0; }
};

LadderReport check_ladder_ordering(std::span<const BesselPath> ladder);

// Largest |x[k] - (x0 + a l[k] + sigma B[k])| / (x0 + a l[k] + sigma |B[k]|).
double decomposition_residual(const BesselPath& path);

bool l_nondecreasing(const BesselPath& path);

// max over pairs of a coarse grid (stride ceil(n / max_points)) of
// |B(t_i) - B(t_j)| / |t_i - t_j|^lambda.
double empirical_holder_constant(const FbmPath& driver, double lambda,
                                 std::size_t max_points = 1000);

// max_k |x[k]| < x0 + a T max(2/x0, 1) + sigma T^lambda holder_const.
// lambda must lie in (0, H).
bool boundedness_diagnostic(const BesselPath& path, double lambda, double holder_const);

// The right-hand side of the bound above.
double boundedness_bound(const BesselPath& path, double lambda, double holder_const);

}  // namespace rbessel::sim
