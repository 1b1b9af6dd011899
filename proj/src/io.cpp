#include "rbessel/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include "rbessel/errors.hpp"
#include "rbessel/rng.hpp"

namespace rbessel::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_bessel_csv(std::ostream& os, const sim::BesselPath& path) {
  const auto& b = path.driver->values;
  std::string line;
  os << "t,x,l,b\n";
  for (std::size_t k = 0; k < path.x.size(); ++k) {
    line.clear();
    line += format_double(path.time(k));
    line += ',';
    line += format_double(path.x[k]);
    line += ',';
    line += format_double(path.l[k]);
    line += ',';
    line += format_double(b[k]);
    line += '\n';
    os << line;
  }
}

void write_fbm_csv(std::ostream& os, const fbm::FbmPath& path) {
  os << "t,value\n";
  for (std::size_t k = 0; k < path.values.size(); ++k) {
    os << format_double(path.time(k)) << ',' << format_double(path.values[k]) << '\n';
  }
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view field, std::size_t line) {
  field = trim(field);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw ParseError("not a finite number: '" + std::string(field) + "'", line);
  }
  return v;
}

}  // namespace

PathTable read_path_csv(std::istream& is, std::string_view column) {
  PathTable table;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(is, line)) throw ParseError("empty input", 1);
  ++lineno;
  for (auto f : split_fields(line)) table.columns.emplace_back(trim(f));
  if (table.columns.size() < 2) throw ParseError("need a time column and a value column", lineno);

  std::size_t col = 0;
  auto find = [&](std::string_view name) -> std::size_t {
    for (std::size_t i = 0; i < table.columns.size(); ++i)
      if (table.columns[i] == name) return i;
    return 0;
  };
  if (!column.empty()) {
    col = find(column);
    if (col == 0) throw ParseError("no column named '" + std::string(column) + "'", lineno);
  } else {
    col = find("x");
    if (col == 0) col = find("value");
    if (col == 0) col = 1;
  }

  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != table.columns.size()) {
      throw ParseError("expected " + std::to_string(table.columns.size()) + " fields, got " +
                           std::to_string(fields.size()),
                       lineno);
    }
    table.times.push_back(parse_number(fields[0], lineno));
    table.values.push_back(parse_number(fields[col], lineno));
  }
  if (table.values.size() < 2) throw ParseError("need at least two data rows", lineno);
  if (table.times.front() != 0.0) throw ParseError("time grid must start at 0", 2);
  const double horizon = table.times.back();
  if (!(horizon > 0.0)) throw ParseError("time grid must end at a positive horizon", lineno);
  const std::size_t n = table.times.size() - 1;
  for (std::size_t k = 0; k <= n; ++k) {
    const double expected = fbm::grid_time(k, n, horizon);
    if (std::fabs(table.times[k] - expected) > 1e-9 * horizon) {
      throw ParseError("time grid is not uniform", k + 2);
    }
  }
  return table;
}

nlohmann::json to_json(const est::EstimationResult& r) {
  nlohmann::json diag = nlohmann::json::object();
  for (const auto& [k, v] : r.diagnostics) diag[k] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json();
  return {{"estimate", std::isfinite(r.estimate) ? nlohmann::json(r.estimate) : nlohmann::json()},
          {"valid", r.valid},
          {"diagnostics", diag}};
}

void write_summary_csv(std::ostream& os, const experiment::ExperimentConfig& config,
                       const experiment::ExperimentSummary& summary) {
  os << "cell_id,n,T,estimator,mean,variance,cv,invalid_count,q_min,q1,median,q3,q_max\n";
  const double nan = std::nan("");
  for (std::size_t c = 0; c < summary.cells.size(); ++c) {
    const auto& cell = config.cells[c];
    const auto& out = summary.cells[c];
    os << c << ',' << config.steps_for(cell) << ',' << format_double(cell.horizon) << ','
       << experiment::to_string(cell.estimator) << ',';
    if (out.summary) {
      const auto& s = *out.summary;
      os << format_double(s.mean) << ',' << format_double(s.variance) << ',' << format_double(s.cv)
         << ',' << s.invalid_count << ',' << format_double(s.boxplot.min) << ','
         << format_double(s.boxplot.q1) << ',' << format_double(s.boxplot.median) << ','
         << format_double(s.boxplot.q3) << ',' << format_double(s.boxplot.max) << '\n';
    } else {
      const std::string na = format_double(nan);
      os << na << ',' << na << ',' << na << ',' << out.invalid_count;
      for (int i = 0; i < 5; ++i) os << ',' << na;
      os << '\n';
    }
  }
}

void write_raw_csv(std::ostream& os, const experiment::ExperimentConfig& config,
                   const experiment::ExperimentSummary& summary) {
  os << "cell_id,replication,seed,estimate,valid\n";
  for (std::size_t c = 0; c < summary.cells.size(); ++c) {
    if (!summary.cells[c].summary) continue;
    const auto& s = *summary.cells[c].summary;
    for (std::size_t r = 0; r < s.estimates.size(); ++r) {
      os << c << ',' << r << ',' << replication_seed(config.base_seed, r) << ','
         << format_double(s.estimates[r]) << ',' << (s.valid[r] ? 1 : 0) << '\n';
    }
  }
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

nlohmann::json manifest_json(const RunManifest& manifest, const experiment::ExperimentConfig& config,
                             const experiment::ExperimentSummary& summary) {
  nlohmann::json cells = nlohmann::json::array();
  for (std::size_t c = 0; c < summary.cells.size(); ++c) {
    const auto& out = summary.cells[c];
    nlohmann::json cell = {{"cell_id", c}};
    if (out.summary) {
      cell["method"] = std::string(fbm::to_string(out.summary->method_used));
      cell["replications"] = out.summary->replications;
      cell["valid_count"] = out.summary->valid_count;
      cell["invalid_count"] = out.summary->invalid_count;
      cell["low_sample"] = out.summary->low_sample;
    } else {
      cell["error"] = out.error;
      cell["invalid_count"] = out.invalid_count;
    }
    cells.push_back(std::move(cell));
  }
  nlohmann::json j = {{"config_hash", manifest.config_hash},
                      {"tool_version", manifest.tool_version},
                      {"outputs", manifest.outputs},
                      {"config", canonical_config(config)},
                      {"seeding", "replication r uses seed base_seed XOR splitmix64(r); mt19937_64 engine"},
                      {"cells", cells}};
  if (!manifest.timings.is_null()) j["timings"] = manifest.timings;
  return j;
}

}  // namespace rbessel::io
