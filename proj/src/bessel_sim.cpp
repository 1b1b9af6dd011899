#include "rbessel/bessel_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rbessel/errors.hpp"

namespace rbessel::sim {

namespace {

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

}  // namespace

void ModelParams::validate() const {
  if (!positive_finite(x0)) throw DomainError("x0 must be finite and > 0");
  if (!positive_finite(a)) throw DomainError("a must be finite and > 0");
  if (!positive_finite(sigma)) throw DomainError("sigma must be finite and > 0");
  if (!positive_finite(epsilon)) throw DomainError("epsilon must be finite and > 0");
}

EulerStep euler_step(double x, double dB, const ModelParams& params, double dt) {
  if (!std::isfinite(x) || !std::isfinite(dB) || !std::isfinite(dt)) {
    throw DomainError("euler_step: non-finite input");
  }
  if (!(dt > 0.0)) throw DomainError("euler_step: dt must be > 0");
  const double positive_part = x > 0.0 ? x : 0.0;
  const double dl = dt / (positive_part + params.epsilon);
  return {x + params.a * dl + params.sigma * dB, dl};
}

BesselPath simulate_prelimit(const ModelParams& params, std::shared_ptr<const FbmPath> driver) {
  params.validate();
  if (!driver || driver->values.size() < 2) throw DomainError("driver needs at least one step");
  const auto& b = driver->values;
  const std::size_t n = b.size() - 1;
  const double dt = driver->horizon / static_cast<double>(n);

  BesselPath path{std::vector<double>(n + 1), std::vector<double>(n + 1), params, std::move(driver)};
  path.x[0] = params.x0;
  path.l[0] = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto step = euler_step(path.x[k], b[k + 1] - b[k], params, dt);
    path.x[k + 1] = step.x_next;
    path.l[k + 1] = path.l[k] + step.dl;
  }
  return path;
}

void simulate_values(const ModelParams& params, std::span<const double> b, double horizon,
                     std::vector<double>& x) {
  params.validate();
  if (b.size() < 2) throw DomainError("driver needs at least one step");
  const std::size_t n = b.size() - 1;
  const double dt = horizon / static_cast<double>(n);
  x.resize(n + 1);
  x[0] = params.x0;
  // Same arithmetic as euler_step, minus the per-step checks.
  for (std::size_t k = 0; k < n; ++k) {
    const double xk = x[k];
    const double dl = dt / ((xk > 0.0 ? xk : 0.0) + params.epsilon);
    x[k + 1] = xk + params.a * dl + params.sigma * (b[k + 1] - b[k]);
  }
  if (!std::isfinite(x[n])) throw DomainError("simulation produced a non-finite value");
}

std::vector<BesselPath> simulate_epsilon_ladder(const ModelParams& params_base,
                                                std::span<const double> epsilons,
                                                std::shared_ptr<const FbmPath> driver) {
  if (epsilons.empty()) throw DomainError("epsilon ladder is empty");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!positive_finite(epsilons[i])) throw DomainError("ladder epsilons must be > 0");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) {
      throw DomainError("ladder epsilons must be strictly decreasing");
    }
  }
  std::vector<BesselPath> out;
  out.reserve(epsilons.size());
  for (double eps : epsilons) {
    ModelParams p = params_base;
    p.epsilon = eps;
    out.push_back(simulate_prelimit(p, driver));
  }
  return out;
}

LadderReport check_ladder_ordering(std::span<const BesselPath> ladder) {
  LadderReport report;
  for (std::size_t i = 0; i + 1 < ladder.size(); ++i) {
    const auto& coarse = ladder[i].x;  // larger epsilon
    const auto& fine = ladder[i + 1].x;
    if (coarse.size() != fine.size()) throw DomainError("ladder paths have different lengths");
    double sup_gap = 0.0;
    for (std::size_t k = 0; k < coarse.size(); ++k) {
      ++report.nodes_checked;
      const double gap = coarse[k] - fine[k];
      sup_gap = std::max(sup_gap, std::fabs(gap));
      if (gap > 0.0) {
        ++report.exact_violations;
        if (gap > 1e-12 * (1.0 + std::fabs(fine[k]))) ++report.tolerance_violations;
        if (gap > report.worst_gap) {
          report.worst_gap = gap;
          report.worst_rung = i;
          report.worst_node = k;
        }
      }
    }
    report.sup_gaps.push_back(sup_gap);
  }
  return report;
}

double decomposition_residual(const BesselPath& path) {
  const auto& p = path.params;
  const auto& b = path.driver->values;
  double worst = 0.0;
  for (std::size_t k = 0; k < path.x.size(); ++k) {
    const double rhs = p.x0 + p.a * path.l[k] + p.sigma * b[k];
    const double scale = p.x0 + p.a * path.l[k] + p.sigma * std::fabs(b[k]);
    worst = std::max(worst, std::fabs(path.x[k] - rhs) / scale);
  }
  return worst;
}

bool l_nondecreasing(const BesselPath& path) {
  return std::is_sorted(path.l.begin(), path.l.end());
}

double empirical_holder_constant(const FbmPath& driver, double lambda, std::size_t max_points) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("Hoelder exponent must lie in (0, 1)");
  if (max_points == 0) throw DomainError("max_points must be positive");
  const std::size_t n = driver.steps();
  const std::size_t stride = (n + max_points - 1) / max_points;
  std::vector<double> coarse;
  for (std::size_t k = 0; k <= n; k += stride) coarse.push_back(driver.values[k]);
  const double dt = driver.horizon * static_cast<double>(stride) / static_cast<double>(n);

  // Uniform coarse grid: the denominator depends on the lag only.
  std::vector<double> inv_pow(coarse.size());
  for (std::size_t lag = 1; lag < coarse.size(); ++lag) {
    inv_pow[lag] = 1.0 / std::pow(dt * static_cast<double>(lag), lambda);
  }
  double best = 0.0;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    for (std::size_t j = i + 1; j < coarse.size(); ++j) {
      best = std::max(best, std::fabs(coarse[j] - coarse[i]) * inv_pow[j - i]);
    }
  }
  return best;
}

double boundedness_bound(const BesselPath& path, double lambda, double holder_const) {
  const double h = path.params.hurst.value();
  if (!(lambda > 0.0 && lambda < h)) {
    throw DomainError("lambda must lie in (0, H), got " + std::to_string(lambda));
  }
  if (!(holder_const >= 0.0) || !std::isfinite(holder_const)) {
    throw DomainError("Hoelder constant must be finite and >= 0");
  }
  const auto& p = path.params;
  const double t = path.horizon();
  return p.x0 + p.a * t * std::max(2.0 / p.x0, 1.0) + p.sigma * std::pow(t, lambda) * holder_const;
}

bool boundedness_diagnostic(const BesselPath& path, double lambda, double holder_const) {
  const double bound = boundedness_bound(path, lambda, holder_const);
  double max_abs = 0.0;
  for (double v : path.x) max_abs = std::max(max_abs, std::fabs(v));
  return max_abs < bound;
}

}  // namespace rbessel::sim
