// rbessel: simulate rough Bessel paths, estimate H / sigma / a from a path
// file, and run Monte Carlo experiment tables.
//
// Exit codes: 0 success, 2 usage or input error, 3 I/O or runtime failure.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "rbessel/bessel_sim.hpp"
#include "rbessel/errors.hpp"
#include "rbessel/estimation.hpp"
#include "rbessel/experiment.hpp"
#include "rbessel/fbm.hpp"
#include "rbessel/io.hpp"

namespace {

namespace fs = std::filesystem;
using namespace rbessel;

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Writes to `path`, or stdout for "-".
template <class Fn>
void with_output(const std::string& path, Fn&& write) {
  if (path == "-") {
    write(std::cout);
    std::cout.flush();
    if (!std::cout) throw IoError("failed writing to stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write(out);
  out.close();
  if (!out) throw IoError("failed writing " + path);
}

fbm::FgnMethod method_from(const std::string& s) {
  const auto m = fbm::parse_method(s);
  if (!m) throw DomainError("unknown method '" + s + "' (circulant, cholesky, hosking)");
  return *m;
}

struct SimulateArgs {
  double x0 = 1.0, a = 2.0, sigma = 1.0, hurst = 0.3, epsilon = 1e-4, horizon = 1.0;
  std::size_t n = 10000;
  std::uint64_t seed = 0;
  std::string method = "circulant";
  std::string output = "-";
};

void cmd_simulate(const SimulateArgs& args) {
  sim::ModelParams params{args.x0, args.a, args.sigma, fbm::HurstIndex(args.hurst), args.epsilon};
  params.validate();
  if (args.n < 1) throw DomainError("--n must be >= 1");
  auto driver = std::make_shared<const fbm::FbmPath>(
      fbm::sample_fbm(args.n, args.horizon, params.hurst, args.seed, method_from(args.method)));
  const auto path = sim::simulate_prelimit(params, driver);
  with_output(args.output, [&](std::ostream& os) { io::write_bessel_csv(os, path); });
}

void cmd_fbm(const SimulateArgs& args) {
  if (args.n < 1) throw DomainError("--n must be >= 1");
  const auto path = fbm::sample_fbm(args.n, args.horizon, fbm::HurstIndex(args.hurst), args.seed,
                                    method_from(args.method));
  with_output(args.output, [&](std::ostream& os) { io::write_fbm_csv(os, path); });
}

struct EstimateArgs {
  std::string input;
  std::string estimator;
  std::optional<double> hurst;
  double floor = 1e-3;
  std::string column;
  std::string output = "-";
};

void cmd_estimate(const EstimateArgs& args) {
  std::ifstream in(args.input, std::ios::binary);
  if (!in) throw IoError("cannot open " + args.input);
  const auto table = io::read_path_csv(in, args.column);
  const est::ObservedPath path(table.values, table.horizon());

  est::EstimationResult r;
  if (args.estimator == "hurst") {
    r = est::estimate_hurst(path);
  } else if (args.estimator == "sigma") {
    if (!args.hurst) throw DomainError("--hurst is required for the sigma estimator");
    r = est::estimate_sigma(path, fbm::HurstIndex(*args.hurst));
  } else if (args.estimator == "sigma-plugin") {
    r = est::estimate_sigma_plugin(path);
  } else {
    r = est::estimate_drift(path, args.floor);
  }
  nlohmann::json report = io::to_json(r);
  report["estimator"] = args.estimator;
  report["n"] = path.steps();
  report["T"] = path.horizon();
  with_output(args.output, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
}

struct ExperimentArgs {
  std::string config;
  int workers = 0;
  std::string output_dir = ".";
  bool emit_plot_data = false;
  bool timings = false;
  bool allow_large = false;
  bool dry_run = false;
};

void cmd_experiment(const ExperimentArgs& args) {
  std::ifstream in(args.config, std::ios::binary);
  if (!in) throw IoError("cannot open config " + args.config);
  std::ostringstream text;
  text << in.rdbuf();
  auto j = io::parse_config_text(text.str());
  if (args.allow_large && j.is_object()) j["experiment"]["allow_large"] = true;
  auto config = io::config_from_json(j);
  if (args.workers > 0) {
    config.workers = args.workers;
  } else if (const char* env = std::getenv("RBESSEL_WORKERS")) {
    config.workers = std::max(0, std::atoi(env));
  }
  config.allow_large = config.allow_large || args.allow_large;
  config.validate();

  if (args.dry_run) {
    std::cout << "config_hash " << io::config_hash(config) << '\n';
    for (std::size_t c = 0; c < config.cells.size(); ++c) {
      const auto& cell = config.cells[c];
      std::cout << "cell " << c << ' ' << experiment::to_string(cell.estimator) << " n=" << config.steps_for(cell)
                << " T=" << io::format_double(cell.horizon) << " replications=" << config.replications_for(cell)
                << '\n';
    }
    return;
  }

  const auto summary = experiment::run_experiment(config);

  std::error_code ec;
  fs::create_directories(args.output_dir, ec);
  if (ec) throw IoError("cannot create " + args.output_dir + ": " + ec.message());
  const fs::path dir(args.output_dir);
  io::RunManifest manifest{io::config_hash(config), RBESSEL_VERSION, {}, nullptr};

  const std::string table_name = config.name + ".csv";
  with_output((dir / table_name).string(),
              [&](std::ostream& os) { io::write_summary_csv(os, config, summary); });
  manifest.outputs.push_back(table_name);
  if (args.emit_plot_data) {
    const std::string raw_name = config.name + ".raw.csv";
    with_output((dir / raw_name).string(), [&](std::ostream& os) { io::write_raw_csv(os, config, summary); });
    manifest.outputs.push_back(raw_name);
  }
  if (args.timings) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : summary.cells) cells.push_back(c.summary ? c.summary->wall_time : 0.0);
    manifest.timings = {{"total_seconds", summary.wall_time}, {"cell_seconds", cells}};
  }
  const std::string manifest_name = config.name + ".manifest.json";
  with_output((dir / manifest_name).string(), [&](std::ostream& os) {
    os << io::manifest_json(manifest, config, summary).dump(2) << '\n';
  });

  int failed = 0;
  for (std::size_t c = 0; c < summary.cells.size(); ++c) {
    const auto& out = summary.cells[c];
    if (out.summary) {
      const auto& s = *out.summary;
      std::cerr << "cell " << c << " [" << experiment::to_string(config.cells[c].estimator)
                << " n=" << s.n << " T=" << config.cells[c].horizon << "] mean=" << io::format_double(s.mean)
                << " variance=" << io::format_double(s.variance) << " cv=" << io::format_double(s.cv)
                << " invalid=" << s.invalid_count << '\n';
    } else {
      ++failed;
      std::cerr << "cell " << c << " failed: " << out.error << '\n';
    }
  }
  if (failed) throw std::runtime_error(std::to_string(failed) + " cell(s) failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rough Bessel process simulation and estimation"};
  app.set_version_flag("--version", std::string(RBESSEL_VERSION));
  app.require_subcommand(1);

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Simulate one path; CSV columns t,x,l,b");
  simulate->add_option("--x0", sim_args.x0, "Initial value")->capture_default_str();
  simulate->add_option("--a", sim_args.a, "Drift coefficient")->capture_default_str();
  simulate->add_option("--sigma", sim_args.sigma, "Volatility")->capture_default_str();
  simulate->add_option("--hurst", sim_args.hurst, "Hurst index in (0,1)")->capture_default_str();
  simulate->add_option("--epsilon", sim_args.epsilon, "Regularisation")->capture_default_str();
  simulate->add_option("--n", sim_args.n, "Grid steps")->capture_default_str();
  simulate->add_option("--T", sim_args.horizon, "Horizon")->capture_default_str();
  simulate->add_option("--seed", sim_args.seed, "RNG seed")->capture_default_str();
  simulate->add_option("--method", sim_args.method, "fGn method: circulant|cholesky|hosking")
      ->capture_default_str();
  simulate->add_option("-o,--output", sim_args.output, "Output CSV ('-' for stdout)")->capture_default_str();

  SimulateArgs fbm_args;
  auto* fbm_cmd = app.add_subcommand("fbm", "Dump one fBm path; CSV columns t,value");
  fbm_cmd->add_option("--hurst", fbm_args.hurst)->capture_default_str();
  fbm_cmd->add_option("--n", fbm_args.n)->capture_default_str();
  fbm_cmd->add_option("--T", fbm_args.horizon)->capture_default_str();
  fbm_cmd->add_option("--seed", fbm_args.seed)->capture_default_str();
  fbm_cmd->add_option("--method", fbm_args.method)->capture_default_str();
  fbm_cmd->add_option("-o,--output", fbm_args.output)->capture_default_str();

  EstimateArgs est_args;
  auto* estimate = app.add_subcommand("estimate", "Estimate a parameter from a path CSV; prints JSON");
  estimate->add_option("input", est_args.input, "Path CSV (first column t)")->required();
  estimate->add_option("-e,--estimator", est_args.estimator, "hurst|sigma|sigma-plugin|drift")
      ->required()
      ->check(CLI::IsMember({"hurst", "sigma", "sigma-plugin", "drift"}));
  estimate->add_option("--hurst", est_args.hurst, "Known Hurst index (sigma estimator)");
  estimate->add_option("--floor", est_args.floor, "Floor in the drift integral sum")->capture_default_str();
  estimate->add_option("--column", est_args.column, "Value column (default x, then value)");
  estimate->add_option("-o,--output", est_args.output, "Report path ('-' for stdout)")->capture_default_str();

  ExperimentArgs exp_args;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a Monte Carlo experiment config (TOML or JSON)");
  exp_cmd->add_option("config", exp_args.config, "Config file")->required();
  exp_cmd->add_option("--workers", exp_args.workers, "Worker threads (default $RBESSEL_WORKERS or all cores)");
  exp_cmd->add_option("-d,--output-dir", exp_args.output_dir, "Output directory")->capture_default_str();
  exp_cmd->add_flag("--emit-plot-data", exp_args.emit_plot_data, "Also write per-replication estimates");
  exp_cmd->add_flag("--timings", exp_args.timings, "Record wall times in the manifest");
  exp_cmd->add_flag("--allow-large", exp_args.allow_large, "Permit cells above 2e6 grid steps");
  exp_cmd->add_flag("--dry-run", exp_args.dry_run, "Validate the config and print the cell plan");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*simulate) cmd_simulate(sim_args);
    else if (*fbm_cmd) cmd_fbm(fbm_args);
    else if (*estimate) cmd_estimate(est_args);
    else if (*exp_cmd) cmd_experiment(exp_args);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsageError;
  } catch (const DegeneratePathError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}
