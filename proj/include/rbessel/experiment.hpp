#pragma once

// Monte Carlo harness: replicate simulate-then-estimate over a list of
// (n, T, estimator) cells and aggregate the estimates.
//
// Replication r of every cell uses seed replication_seed(base_seed, r), so
// cells with the same n and T see the same driving noise. Estimates are
// written into slots indexed by replication and reduced in index order,
// so the summary is independent of the worker count.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rbessel/bessel_sim.hpp"
#include "rbessel/fbm.hpp"

namespace rbessel::experiment {

enum class Estimator { Hurst, SigmaKnownH, SigmaPluginH, Drift };

std::string_view to_string(Estimator e) noexcept;
std::optional<Estimator> parse_estimator(std::string_view s) noexcept;

struct CellSpec {
  std::size_t n = 0;  // 0 for Drift cells: n = T * drift_resolution
  double horizon = 1.0;
  Estimator estimator = Estimator::Hurst;
  std::optional<std::size_t> replications;  // overrides the config default
};

struct ExperimentConfig {
  std::string name = "experiment";
  sim::ModelParams model;
  std::vector<CellSpec> cells;
  std::size_t replications = 1000;
  std::uint64_t base_seed = 0;
  std::size_t drift_resolution = 10000;
  double floor = 1e-3;
  fbm::FgnMethod method = fbm::FgnMethod::CirculantEmbedding;
  int workers = 0;  // 0: OpenMP default
  // Cells above kLargeCellSteps grid steps are refused unless set.
  bool allow_large = false;

  // Throws ConfigError naming the offending field.
  void validate() const;
  std::size_t steps_for(const CellSpec& cell) const;
  std::size_t replications_for(const CellSpec& cell) const;
};

inline constexpr std::size_t kLargeCellSteps = 2'000'000;

struct BoxPlot {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

struct CellSummary {
  std::size_t cell_id = 0;
  CellSpec spec;
  std::size_t n = 0;
  std::size_t replications = 0;
  std::size_t valid_count = 0;
  std::size_t invalid_count = 0;
  double mean = 0, variance = 0, cv = 0;
  bool low_sample = false;  // fewer than two valid estimates
  BoxPlot boxplot;
  fbm::FgnMethod method_used = fbm::FgnMethod::CirculantEmbedding;
  std::uint64_t base_seed = 0;
  double wall_time = 0;  // seconds
  // One entry per replication; NaN where the estimator failed outright.
  std::vector<double> estimates;
  std::vector<bool> valid;
};

// A cell either produced a summary or failed; failures never abort siblings.
struct CellOutcome {
  std::optional<CellSummary> summary;
  std::string error;
  std::size_t invalid_count = 0;
};

struct ExperimentSummary {
  std::vector<CellOutcome> cells;
  double wall_time = 0;
};

// Thrown by run_cell when every replication of a cell is invalid.
class CellError : public std::runtime_error {
 public:
  CellError(const std::string& what, std::size_t invalid_count)
      : std::runtime_error(what), invalid_count_(invalid_count) {}
  std::size_t invalid_count() const noexcept { return invalid_count_; }

 private:
  std::size_t invalid_count_;
};

// OpenMP over replications.
CellSummary run_cell(const ExperimentConfig& config, std::size_t cell_index);
// Plain loop; reference for run_cell.
CellSummary run_cell_serial(const ExperimentConfig& config, std::size_t cell_index);

// OpenMP over all (cell, replication) pairs.
ExperimentSummary run_experiment(const ExperimentConfig& config);

struct Moments {
  double mean = 0, variance = 0, cv = 0;
};
// Unbiased variance; 0 for a single value. cv = sd / mean.
Moments moments(const std::vector<double>& xs);
// Five-number summary, quartiles by linear interpolation between order
// statistics (position p (m - 1) in the sorted sample).
BoxPlot five_number_summary(std::vector<double> xs);

}  // namespace rbessel::experiment
