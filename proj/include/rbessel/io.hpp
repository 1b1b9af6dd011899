#pragma once

// Serialization of paths, estimates and experiment tables. Floats are
// written with 17 significant digits, which round-trips IEEE doubles.

#include <filesystem>
#include <iosfwd>
#include <json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "rbessel/bessel_sim.hpp"
#include "rbessel/estimation.hpp"
#include "rbessel/experiment.hpp"
#include "rbessel/fbm.hpp"

namespace rbessel::io {

std::string format_double(double v);

// Header "t,x,l,b".
void write_bessel_csv(std::ostream& os, const sim::BesselPath& path);
// Header "t,value".
void write_fbm_csv(std::ostream& os, const fbm::FbmPath& path);

struct PathTable {
  std::vector<std::string> columns;
  std::vector<double> times;   // first column
  std::vector<double> values;  // selected column
  double horizon() const { return times.back(); }
};

// Reads a path CSV whose first column is time on a uniform grid starting at
// 0. `column` selects the value column; empty picks "x", then "value", then
// the second column. Throws ParseError with the offending line.
PathTable read_path_csv(std::istream& is, std::string_view column = {});

nlohmann::json to_json(const est::EstimationResult& r);

// Per-cell table, one row per cell:
// cell_id,n,T,estimator,mean,variance,cv,invalid_count,q_min,q1,median,q3,q_max
void write_summary_csv(std::ostream& os, const experiment::ExperimentConfig& config,
                       const experiment::ExperimentSummary& summary);
// Raw per-replication estimates for external plotting.
void write_raw_csv(std::ostream& os, const experiment::ExperimentConfig& config,
                   const experiment::ExperimentSummary& summary);

// ---- configs ------------------------------------------------------------

// TOML unless the text starts with '{' (JSON).
nlohmann::json parse_config_text(std::string_view text);
// Applies defaults and checks the schema; throws ConfigError with a field
// path or ParseError for syntax problems.
experiment::ExperimentConfig config_from_json(const nlohmann::json& j);
experiment::ExperimentConfig load_config(const std::filesystem::path& file);

// Effective configuration with defaults filled in. Execution hints
// (workers, allow_large) are excluded: they do not change results.
nlohmann::json canonical_config(const experiment::ExperimentConfig& config);
std::string config_hash(const experiment::ExperimentConfig& config);
std::string sha256_hex(std::string_view data);

struct RunManifest {
  std::string config_hash;
  std::string tool_version;
  std::vector<std::string> outputs;
  nlohmann::json timings;  // null unless timings were requested
};

nlohmann::json manifest_json(const RunManifest& manifest, const experiment::ExperimentConfig& config,
                             const experiment::ExperimentSummary& summary);

}  // namespace rbessel::io
