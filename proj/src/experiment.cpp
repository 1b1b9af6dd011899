#include "rbessel/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>

#include "rbessel/errors.hpp"
#include "rbessel/estimation.hpp"
#include "rbessel/rng.hpp"

namespace rbessel::experiment {

std::string_view to_string(Estimator e) noexcept {
  switch (e) {
    case Estimator::Hurst: return "hurst";
    case Estimator::SigmaKnownH: return "sigma";
    case Estimator::SigmaPluginH: return "sigma_plugin";
    case Estimator::Drift: return "drift";
  }
  return "unknown";
}

std::optional<Estimator> parse_estimator(std::string_view s) noexcept {
  if (s == "hurst") return Estimator::Hurst;
  if (s == "sigma" || s == "sigma_known") return Estimator::SigmaKnownH;
  if (s == "sigma_plugin" || s == "sigma-plugin") return Estimator::SigmaPluginH;
  if (s == "drift") return Estimator::Drift;
  return std::nullopt;
}

std::size_t ExperimentConfig::steps_for(const CellSpec& cell) const {
  if (cell.n != 0) return cell.n;
  return static_cast<std::size_t>(std::llround(cell.horizon * static_cast<double>(drift_resolution)));
}

std::size_t ExperimentConfig::replications_for(const CellSpec& cell) const {
  return cell.replications.value_or(replications);
}

void ExperimentConfig::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(model.x0)) throw ConfigError("model.x0", "must be > 0");
  if (!positive(model.a)) throw ConfigError("model.a", "must be > 0");
  if (!positive(model.sigma)) throw ConfigError("model.sigma", "must be > 0");
  if (!positive(model.epsilon)) throw ConfigError("model.epsilon", "must be > 0");
  if (replications < 1) throw ConfigError("experiment.replications", "must be >= 1");
  if (drift_resolution < 1) throw ConfigError("experiment.drift_resolution", "must be >= 1");
  if (!positive(floor)) throw ConfigError("experiment.floor", "must be > 0");
  if (workers < 0) throw ConfigError("experiment.workers", "must be >= 0");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string at = "cells[" + std::to_string(i) + "]";
    const auto& c = cells[i];
    if (!positive(c.horizon)) throw ConfigError(at + ".T", "must be > 0");
    if (c.replications && *c.replications < 1) throw ConfigError(at + ".replications", "must be >= 1");
    const std::size_t n = steps_for(c);
    if (n < 1) throw ConfigError(at + ".n", "must be >= 1");
    if (c.estimator != Estimator::Drift && n < 2) {
      throw ConfigError(at + ".n", "must be >= 2 for power-variation estimators");
    }
    if (n > kLargeCellSteps && !allow_large) {
      throw ConfigError(at + ".n", std::to_string(n) + " steps exceeds " +
                                       std::to_string(kLargeCellSteps) +
                                       "; enable allow_large to run it");
    }
  }
}

Moments moments(const std::vector<double>& xs) {
  Moments m;
  if (xs.empty()) return m;
  double sum = 0.0;
  for (double v : xs) sum += v;
  m.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double v : xs) ss += (v - m.mean) * (v - m.mean);
    m.variance = ss / static_cast<double>(xs.size() - 1);
  }
  m.cv = std::sqrt(m.variance) / m.mean;
  return m;
}

BoxPlot five_number_summary(std::vector<double> xs) {
  if (xs.empty()) return {};
  std::sort(xs.begin(), xs.end());
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return xs[lo] + frac * (xs[hi] - xs[lo]);
  };
  return {xs.front(), quantile(0.25), quantile(0.5), quantile(0.75), xs.back()};
}

namespace {

struct ReplicationResult {
  double estimate = std::numeric_limits<double>::quiet_NaN();
  bool valid = false;
};

ReplicationResult replicate(const ExperimentConfig& config, const CellSpec& cell,
                            const fbm::FgnSampler& sampler, std::size_t r) {
  ReplicationResult out;
  try {
    const auto fgn = sampler.sample(replication_seed(config.base_seed, r));
    const auto driver = fbm::fbm_from_fgn(fgn, cell.horizon);
    std::vector<double> x;
    sim::simulate_values(config.model, driver.values, cell.horizon, x);
    const est::ObservedPath path(x, cell.horizon);
    est::EstimationResult e;
    switch (cell.estimator) {
      case Estimator::Hurst: e = est::estimate_hurst(path); break;
      case Estimator::SigmaKnownH: e = est::estimate_sigma(path, config.model.hurst); break;
      case Estimator::SigmaPluginH: e = est::estimate_sigma_plugin(path); break;
      case Estimator::Drift: e = est::estimate_drift(path, config.floor); break;
    }
    out.estimate = e.estimate;
    out.valid = e.valid;
  } catch (const DegeneratePathError&) {
  } catch (const DomainError&) {
  }
  return out;
}

CellSummary summarize(const ExperimentConfig& config, std::size_t cell_index,
                      const std::vector<ReplicationResult>& results, fbm::FgnMethod method,
                      double wall_time) {
  const CellSpec& cell = config.cells[cell_index];
  CellSummary s;
  s.cell_id = cell_index;
  s.spec = cell;
  s.n = config.steps_for(cell);
  s.replications = results.size();
  s.method_used = method;
  s.base_seed = config.base_seed;
  s.wall_time = wall_time;
  std::vector<double> kept;
  kept.reserve(results.size());
  for (const auto& r : results) {
    s.estimates.push_back(r.estimate);
    s.valid.push_back(r.valid);
    if (r.valid) kept.push_back(r.estimate);
  }
  s.valid_count = kept.size();
  s.invalid_count = results.size() - kept.size();
  if (kept.empty()) {
    throw CellError("cell " + std::to_string(cell_index) + ": all " +
                        std::to_string(results.size()) + " replications invalid",
                    s.invalid_count);
  }
  const auto m = moments(kept);
  s.mean = m.mean;
  s.variance = m.variance;
  s.cv = m.cv;
  s.low_sample = kept.size() < 2;
  s.boxplot = five_number_summary(std::move(kept));
  return s;
}

int worker_count(const ExperimentConfig& config) {
  return config.workers > 0 ? config.workers : omp_get_max_threads();
}

fbm::FgnSampler make_sampler(const ExperimentConfig& config, const CellSpec& cell) {
  return fbm::FgnSampler(config.steps_for(cell), config.model.hurst, config.method);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

CellSummary run_cell_impl(const ExperimentConfig& config, std::size_t cell_index, bool parallel) {
  config.validate();
  if (cell_index >= config.cells.size()) throw DomainError("cell index out of range");
  const auto start = std::chrono::steady_clock::now();
  const CellSpec& cell = config.cells[cell_index];
  const auto sampler = make_sampler(config, cell);
  const std::size_t reps = config.replications_for(cell);
  std::vector<ReplicationResult> results(reps);
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count(config))
    for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(reps); ++r) {
      results[static_cast<std::size_t>(r)] = replicate(config, cell, sampler, static_cast<std::size_t>(r));
    }
  } else {
    for (std::size_t r = 0; r < reps; ++r) results[r] = replicate(config, cell, sampler, r);
  }
  return summarize(config, cell_index, results, sampler.method(), seconds_since(start));
}

}  // namespace

CellSummary run_cell(const ExperimentConfig& config, std::size_t cell_index) {
  return run_cell_impl(config, cell_index, true);
}

CellSummary run_cell_serial(const ExperimentConfig& config, std::size_t cell_index) {
  return run_cell_impl(config, cell_index, false);
}

ExperimentSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t ncells = config.cells.size();
  ExperimentSummary summary;
  summary.cells.resize(ncells);

  std::vector<std::unique_ptr<fbm::FgnSampler>> samplers(ncells);
  std::vector<std::vector<ReplicationResult>> results(ncells);
  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  for (std::size_t c = 0; c < ncells; ++c) {
    try {
      samplers[c] = std::make_unique<fbm::FgnSampler>(make_sampler(config, config.cells[c]));
    } catch (const std::exception& e) {
      summary.cells[c].error = e.what();
      continue;
    }
    const std::size_t reps = config.replications_for(config.cells[c]);
    results[c].resize(reps);
    for (std::size_t r = 0; r < reps; ++r) tasks.emplace_back(c, r);
  }

  // Per-cell wall time is the span from the first start to the last finish
  // of its replications.
  std::vector<double> first_start(ncells, std::numeric_limits<double>::infinity());
  std::vector<double> last_end(ncells, 0.0);

#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count(config))
  for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(tasks.size()); ++t) {
    const auto [c, r] = tasks[static_cast<std::size_t>(t)];
    const double t0 = seconds_since(start);
    results[c][r] = replicate(config, config.cells[c], *samplers[c], r);
    const double t1 = seconds_since(start);
#pragma omp critical(rbessel_cell_timing)
    {
      first_start[c] = std::min(first_start[c], t0);
      last_end[c] = std::max(last_end[c], t1);
    }
  }

  for (std::size_t c = 0; c < ncells; ++c) {
    if (!samplers[c]) continue;
    try {
      const double wall = last_end[c] > first_start[c] ? last_end[c] - first_start[c] : 0.0;
      summary.cells[c].summary = summarize(config, c, results[c], samplers[c]->method(), wall);
    } catch (const CellError& e) {
      summary.cells[c].error = e.what();
      summary.cells[c].invalid_count = e.invalid_count();
    }
  }
  summary.wall_time = seconds_since(start);
  return summary;
}

}  // namespace rbessel::experiment
