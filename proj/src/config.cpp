#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "rbessel/errors.hpp"
#include "rbessel/io.hpp"
#include "rbessel/toml_lite.hpp"

namespace rbessel::io {

using nlohmann::json;
using experiment::CellSpec;
using experiment::ExperimentConfig;

json parse_config_text(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  if (i < text.size() && text[i] == '{') {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), 0);
    }
  }
  return parse_toml(text);
}

namespace {

void reject_unknown(const json& obj, const std::string& at, std::initializer_list<const char*> known) {
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(at.empty() ? key : at + "." + key, "unknown field");
  }
}

const json* member(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_real(const json& obj, const char* key, const std::string& at, double fallback) {
  const json* v = member(obj, key);
  if (!v) return fallback;
  if (!v->is_number()) throw ConfigError(at + "." + key, "expected a number");
  return v->get<double>();
}

std::uint64_t get_count(const json& obj, const char* key, const std::string& at, std::uint64_t fallback) {
  const json* v = member(obj, key);
  if (!v) return fallback;
  if (v->is_number_unsigned()) return v->get<std::uint64_t>();
  if (v->is_number_integer()) throw ConfigError(at + "." + key, "must be >= 0");
  throw ConfigError(at + "." + key, "expected an integer");
}

bool get_bool(const json& obj, const char* key, const std::string& at, bool fallback) {
  const json* v = member(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) throw ConfigError(at + "." + key, "expected true or false");
  return v->get<bool>();
}

const json& table(const json& root, const char* key) {
  static const json empty = json::object();
  const json* v = member(root, key);
  if (!v) return empty;
  if (!v->is_object()) throw ConfigError(key, "expected a table");
  return *v;
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "expected a table");
  reject_unknown(j, "", {"name", "model", "experiment", "cells"});
  ExperimentConfig cfg;

  if (const json* name = member(j, "name")) {
    if (!name->is_string()) throw ConfigError("name", "expected a string");
    cfg.name = name->get<std::string>();
    if (cfg.name.empty() || cfg.name.find_first_of("/\\") != std::string::npos) {
      throw ConfigError("name", "must be a non-empty file stem");
    }
  }

  const json& model = table(j, "model");
  reject_unknown(model, "model", {"x0", "a", "sigma", "hurst", "epsilon"});
  cfg.model.x0 = get_real(model, "x0", "model", cfg.model.x0);
  cfg.model.a = get_real(model, "a", "model", cfg.model.a);
  cfg.model.sigma = get_real(model, "sigma", "model", cfg.model.sigma);
  cfg.model.epsilon = get_real(model, "epsilon", "model", cfg.model.epsilon);
  try {
    cfg.model.hurst = fbm::HurstIndex(get_real(model, "hurst", "model", cfg.model.hurst.value()));
  } catch (const DomainError&) {
    throw ConfigError("model.hurst", "must lie in (0, 1)");
  }

  const json& ex = table(j, "experiment");
  reject_unknown(ex, "experiment",
                 {"replications", "base_seed", "drift_resolution", "floor", "method", "workers", "allow_large"});
  cfg.replications = get_count(ex, "replications", "experiment", cfg.replications);
  cfg.base_seed = get_count(ex, "base_seed", "experiment", cfg.base_seed);
  cfg.drift_resolution = get_count(ex, "drift_resolution", "experiment", cfg.drift_resolution);
  cfg.floor = get_real(ex, "floor", "experiment", cfg.floor);
  const auto workers = get_count(ex, "workers", "experiment", 0);
  if (workers > 4096) throw ConfigError("experiment.workers", "unreasonably large");
  cfg.workers = static_cast<int>(workers);
  cfg.allow_large = get_bool(ex, "allow_large", "experiment", false);
  if (const json* m = member(ex, "method")) {
    const auto parsed = m->is_string() ? fbm::parse_method(m->get<std::string>()) : std::nullopt;
    if (!parsed) throw ConfigError("experiment.method", "expected \"circulant\", \"cholesky\" or \"hosking\"");
    cfg.method = *parsed;
  }

  if (const json* cells = member(j, "cells")) {
    if (!cells->is_array()) throw ConfigError("cells", "expected an array of tables");
    for (std::size_t i = 0; i < cells->size(); ++i) {
      const std::string at = "cells[" + std::to_string(i) + "]";
      const json& c = (*cells)[i];
      if (!c.is_object()) throw ConfigError(at, "expected a table");
      reject_unknown(c, at, {"estimator", "n", "T", "replications"});
      CellSpec cell;
      const json* e = member(c, "estimator");
      if (!e) throw ConfigError(at + ".estimator", "missing");
      const auto parsed = e->is_string() ? experiment::parse_estimator(e->get<std::string>()) : std::nullopt;
      if (!parsed) throw ConfigError(at + ".estimator", "expected hurst, sigma, sigma_plugin or drift");
      cell.estimator = *parsed;
      if (!member(c, "T")) throw ConfigError(at + ".T", "missing");
      cell.horizon = get_real(c, "T", at, 1.0);
      cell.n = get_count(c, "n", at, 0);
      if (cell.n == 0 && cell.estimator != experiment::Estimator::Drift) {
        throw ConfigError(at + ".n", "missing");
      }
      if (member(c, "replications")) cell.replications = get_count(c, "replications", at, 0);
      cfg.cells.push_back(cell);
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json(parse_config_text(ss.str()));
}

json canonical_config(const ExperimentConfig& config) {
  json cells = json::array();
  for (const auto& c : config.cells) {
    cells.push_back({{"estimator", std::string(experiment::to_string(c.estimator))},
                     {"n", config.steps_for(c)},
                     {"T", c.horizon},
                     {"replications", config.replications_for(c)}});
  }
  return {{"name", config.name},
          {"model",
           {{"x0", config.model.x0},
            {"a", config.model.a},
            {"sigma", config.model.sigma},
            {"hurst", config.model.hurst.value()},
            {"epsilon", config.model.epsilon}}},
          {"experiment",
           {{"replications", config.replications},
            {"base_seed", config.base_seed},
            {"drift_resolution", config.drift_resolution},
            {"floor", config.floor},
            {"method", std::string(fbm::to_string(config.method))}}},
          {"cells", cells}};
}

std::string config_hash(const ExperimentConfig& config) {
  return sha256_hex(canonical_config(config).dump());
}

}  // namespace rbessel::io
