#include <doctest.h>

#include <cmath>
#include <cstring>
#include <memory>
#include <sstream>

#include "rbessel/errors.hpp"
#include "rbessel/io.hpp"
#include "rbessel/toml_lite.hpp"

using namespace rbessel;
using namespace rbessel::io;
using nlohmann::json;

namespace {

std::size_t parse_error_line(const std::string& csv) {
  std::istringstream in(csv);
  try {
    read_path_csv(in);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

std::string config_error_field(const std::string& text) {
  try {
    config_from_json(parse_config_text(text));
  } catch (const ConfigError& e) {
    return e.field();
  }
  return {};
}

constexpr const char* kToml = R"(
name = "demo"

[model]
x0 = 3.0
a = 2
hurst = 0.3

[experiment]
replications = 50
base_seed = 0x2a
method = 'cholesky'

[[cells]]
estimator = "hurst"
n = 100
T = 1.0

[[cells]]
estimator = "drift"   # n = T * drift_resolution
T = 10
replications = 20
)";

}  // namespace

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.30000000000000004}) {
    const auto s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_double(NAN) == "nan");
}

TEST_CASE("path CSV round trip is bit-exact") {
  sim::ModelParams p;
  const auto path = sim::simulate_prelimit(
      p, std::make_shared<const fbm::FbmPath>(fbm::sample_fbm(500, 3.0, fbm::HurstIndex(0.3), 17)));
  std::stringstream ss;
  write_bessel_csv(ss, path);
  const auto table = read_path_csv(ss);
  CHECK(table.columns == std::vector<std::string>{"t", "x", "l", "b"});
  REQUIRE(table.values.size() == path.x.size());
  for (std::size_t k = 0; k < path.x.size(); ++k) CHECK(table.values[k] == path.x[k]);
  CHECK(table.horizon() == 3.0);

  std::stringstream again;
  write_bessel_csv(again, path);
  std::istringstream bcol(again.str());
  const auto b = read_path_csv(bcol, "b");
  for (std::size_t k = 0; k < b.values.size(); ++k) CHECK(b.values[k] == path.driver->values[k]);

  std::stringstream fs;
  write_fbm_csv(fs, *path.driver);
  const auto f = read_path_csv(fs);
  CHECK(f.values == path.driver->values);
}

TEST_CASE("CSV parse errors carry line numbers") {
  CHECK(parse_error_line("") == 1);
  CHECK(parse_error_line("t\n0\n1\n") == 1);
  CHECK(parse_error_line("t,x\n0,1\n0.5,2,3\n1,1\n") == 3);
  CHECK(parse_error_line("t,x\n0,1\n0.5,abc\n1,1\n") == 3);
  CHECK(parse_error_line("t,x\n0,1\n0.5,nan\n1,1\n") == 3);
  CHECK(parse_error_line("t,x\n0,1\n") == 2);
  CHECK(parse_error_line("t,x\n0.1,1\n0.5,1\n1,1\n") == 2);
  CHECK(parse_error_line("t,x\n0,1\n0.7,1\n1,1\n") == 3);
  std::istringstream in("t,x\n0,1\n1,2\n");
  CHECK_THROWS_AS(read_path_csv(in, "missing"), ParseError);
}

TEST_CASE("CSV column selection") {
  std::istringstream a("t,foo,value\n0,1,2\n1,3,4\n");
  CHECK(read_path_csv(a).values == std::vector<double>{2, 4});
  std::istringstream b("t,foo,bar\n0,1,2\n1,3,4\n");
  CHECK(read_path_csv(b).values == std::vector<double>{1, 3});
  std::istringstream c("t , x \r\n0, 1\r\n\r\n1 ,2\r\n");
  CHECK(read_path_csv(c).values == std::vector<double>{1, 2});
}

TEST_CASE("estimation result JSON") {
  est::EstimationResult r{NAN, false, {{"ratio", 4.0}, {"log_argument", -INFINITY}}};
  const auto j = to_json(r);
  CHECK(j["estimate"].is_null());
  CHECK(j["valid"] == false);
  CHECK(j["diagnostics"]["ratio"] == 4.0);
  CHECK(j["diagnostics"]["log_argument"].is_null());
}

TEST_CASE("TOML subset") {
  const auto j = parse_toml(kToml);
  CHECK(j["name"] == "demo");
  CHECK(j["model"]["x0"] == 3.0);
  CHECK(j["model"]["a"].is_number_integer());
  CHECK(j["experiment"]["base_seed"] == 42);
  CHECK(j["experiment"]["method"] == "cholesky");
  REQUIRE(j["cells"].size() == 2);
  CHECK(j["cells"][1]["T"] == 10);

  const auto k = parse_toml(
      "a.b = 1\nx = [1, 2,\n  3]\ny = { p = true, q = \"s\\tt\" }\nz = -inf\nw = 1_000\n[t.u]\nv = 'lit\\n'\n");
  CHECK(k["a"]["b"] == 1);
  CHECK(k["x"] == json::array({1, 2, 3}));
  CHECK(k["y"]["p"] == true);
  CHECK(k["y"]["q"] == "s\tt");
  CHECK(std::isinf(k["z"].get<double>()));
  CHECK(k["w"] == 1000);
  CHECK(k["t"]["u"]["v"] == "lit\\n");
}

TEST_CASE("TOML errors report the line") {
  auto line_of = [](const char* text) -> std::size_t {
    try {
      parse_toml(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("a = 1\nb = \n") == 2);
  CHECK(line_of("a = 1\na = 2\n") == 2);
  CHECK(line_of("[x]\n[x]\n") == 2);
  CHECK(line_of("\n\nname = \"open\n") == 3);
  CHECK(line_of("a = 1979-05-27\n") == 1);
  CHECK(line_of("x = [1, 2\n") == 1);
}

TEST_CASE("config loading") {
  const auto cfg = config_from_json(parse_config_text(kToml));
  CHECK(cfg.name == "demo");
  CHECK(cfg.model.x0 == 3.0);
  CHECK(cfg.model.sigma == 1.0);
  CHECK(cfg.base_seed == 42);
  CHECK(cfg.method == fbm::FgnMethod::Cholesky);
  REQUIRE(cfg.cells.size() == 2);
  CHECK(cfg.cells[1].estimator == experiment::Estimator::Drift);
  CHECK(cfg.steps_for(cfg.cells[1]) == 100000);
  CHECK(cfg.replications_for(cfg.cells[1]) == 20);
}

TEST_CASE("config errors name the field") {
  CHECK(config_error_field(R"({"model": {"hurst": 1.2}})") == "model.hurst");
  CHECK(config_error_field(R"({"model": {"sigma": -1}})") == "model.sigma");
  CHECK(config_error_field(R"({"model": {"sgima": 1}})") == "model.sgima");
  CHECK(config_error_field(R"({"experiment": {"replications": 0}})") == "experiment.replications");
  CHECK(config_error_field(R"({"experiment": {"replications": 1.5}})") == "experiment.replications");
  CHECK(config_error_field(R"({"experiment": {"method": "fft"}})") == "experiment.method");
  CHECK(config_error_field(R"({"cells": [{"estimator": "hurst", "T": 1}]})") == "cells[0].n");
  CHECK(config_error_field(R"({"cells": [{"estimator": "hurst", "n": 10, "T": 1}, {"estimator": "x", "n": 10, "T": 1}]})") ==
        "cells[1].estimator");
  CHECK(config_error_field(R"({"cells": [{"estimator": "hurst", "n": 5000000, "T": 1}]})") == "cells[0].n");
  CHECK(config_error_field(R"({"name": "a/b"})") == "name");
  CHECK(config_error_field("[model]\nx0 = \"one\"\n") == "model.x0");
  CHECK(config_error_field(R"({"cells": [{"estimator": "hurst", "n": 5000000, "T": 1}], "experiment": {"allow_large": true}})").empty());
  CHECK_THROWS_AS(config_from_json(parse_config_text("{ not json")), ParseError);
}

TEST_CASE("config hash is canonical") {
  const auto a = config_from_json(parse_config_text(
      R"({"name": "h", "model": {"x0": 3, "a": 2}, "cells": [{"estimator": "sigma", "n": 100, "T": 1}]})"));
  const auto b = config_from_json(parse_config_text(
      "name='h'\n[[cells]]\nT = 1.0\nn = 100\nestimator = \"sigma\"\n\n[model]\na = 2.0\nx0 = 3.0\n"));
  const auto c = config_from_json(parse_config_text(
      R"({"cells": [{"n": 100, "T": 1, "estimator": "sigma"}], "experiment": {"workers": 8, "replications": 1000}, "model": {"a": 2, "x0": 3}, "name": "h"})"));
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) == config_hash(c));
  CHECK(config_hash(a).size() == 64);
  auto d = a;
  d.base_seed = 1;
  CHECK(config_hash(a) != config_hash(d));
}

TEST_CASE("sha256 known answers") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("summary, raw CSV and manifest") {
  experiment::ExperimentConfig cfg;
  cfg.name = "t";
  cfg.model.x0 = 3.0;
  cfg.replications = 5;
  cfg.cells = {{50, 1.0, experiment::Estimator::SigmaKnownH, {}}};
  const auto summary = experiment::run_experiment(cfg);

  std::ostringstream csv;
  write_summary_csv(csv, cfg, summary);
  const auto text = csv.str();
  CHECK(text.rfind("cell_id,n,T,estimator,mean,variance,cv,invalid_count,q_min,q1,median,q3,q_max\n", 0) == 0);
  CHECK(text.find("\n0,50,1,sigma,") != std::string::npos);

  std::ostringstream raw;
  write_raw_csv(raw, cfg, summary);
  std::size_t lines = 0;
  for (char ch : raw.str()) lines += ch == '\n';
  CHECK(lines == 6);

  RunManifest m{config_hash(cfg), "test", {"t.csv"}, nullptr};
  auto j = manifest_json(m, cfg, summary);
  CHECK_FALSE(j.contains("timings"));
  CHECK(j["config_hash"] == config_hash(cfg));
  CHECK(j["cells"][0]["method"] == "circulant");
  m.timings = {{"total", 1.0}};
  CHECK(manifest_json(m, cfg, summary).contains("timings"));
}
