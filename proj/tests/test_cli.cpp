#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("rbessel_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + RBESSEL_CLI_PATH + "\" " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string path_arg(const fs::path& p) { return "\"" + p.string() + "\""; }

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

}  // namespace

TEST_CASE("simulate writes n+1 rows and is reproducible") {
  const auto a = workdir() / "a.csv", b = workdir() / "b.csv";
  REQUIRE(run("simulate --hurst 0.3 --n 10000 --T 1 --seed 42 -o " + path_arg(a)) == 0);
  REQUIRE(run("simulate --hurst 0.3 --n 10000 --T 1 --seed 42 -o " + path_arg(b)) == 0);
  const auto text = slurp(a);
  std::size_t lines = 0;
  for (char c : text) lines += c == '\n';
  CHECK(lines == 10002);
  CHECK(text.rfind("t,x,l,b\n", 0) == 0);
  CHECK(text == slurp(b));
  REQUIRE(run("simulate --hurst 0.3 --n 10000 --T 1 --seed 43 -o " + path_arg(b)) == 0);
  CHECK(text != slurp(b));
}

TEST_CASE("invalid arguments exit with status 2") {
  CHECK(run("simulate --hurst 1.2 -o " + path_arg(workdir() / "bad.csv")) == 2);
  CHECK(run("simulate --sigma -1 -o " + path_arg(workdir() / "bad.csv")) == 2);
  CHECK(run("simulate --method fft -o " + path_arg(workdir() / "bad.csv")) == 2);
  CHECK(run("--no-such-flag") == 2);
  CHECK(run("estimate") == 2);
}

TEST_CASE("estimate reads a path and reports JSON") {
  const auto in = workdir() / "const.csv";
  std::string csv = "t,x\n";
  for (int k = 0; k <= 1000; ++k) csv += std::to_string(k / 1000.0) + ",1\n";
  write_file(in, csv);
  const auto out = workdir() / "const.json";
  REQUIRE(run("estimate " + path_arg(in) + " -e drift -o " + path_arg(out)) == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j["estimate"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(j["estimator"] == "drift");
  CHECK(j["n"] == 1000);

  CHECK(run("estimate " + path_arg(in) + " -e hurst -o " + path_arg(out)) == 2);  // constant path
  CHECK(run("estimate " + path_arg(in) + " -e sigma -o " + path_arg(out)) == 2);  // needs --hurst

  const auto sim = workdir() / "sim.csv";
  REQUIRE(run("simulate --x0 3 --n 4096 --seed 1 -o " + path_arg(sim)) == 0);
  REQUIRE(run("estimate " + path_arg(sim) + " -e sigma --hurst 0.3 -o " + path_arg(out)) == 0);
  const auto s = nlohmann::json::parse(slurp(out));
  CHECK(std::abs(s["estimate"].get<double>() - 1.0) < 0.2);
}

TEST_CASE("malformed input exits 2, unreadable files exit 3") {
  const auto bad = workdir() / "bad_rows.csv";
  write_file(bad, "t,x\n0,1\n0.5\n1,2\n");
  CHECK(run("estimate " + path_arg(bad) + " -e drift") == 2);
  CHECK(run("estimate " + path_arg(workdir() / "missing.csv") + " -e drift") == 3);
  CHECK(run("simulate -o " + path_arg(workdir() / "no_dir" / "x.csv")) == 3);
}

TEST_CASE("experiment output does not depend on worker count") {
  const auto cfg = workdir() / "cli_exp.toml";
  write_file(cfg,
             "name = \"cli_exp\"\n[model]\nx0 = 3.0\n[experiment]\nreplications = 16\nbase_seed = 7\n"
             "drift_resolution = 500\n"
             "[[cells]]\nestimator = \"hurst\"\nn = 200\nT = 1\n"
             "[[cells]]\nestimator = \"sigma_plugin\"\nn = 200\nT = 1\n"
             "[[cells]]\nestimator = \"drift\"\nT = 2\n");
  const auto d1 = workdir() / "w1", d8 = workdir() / "w8";
  REQUIRE(run("experiment " + path_arg(cfg) + " --workers 1 --emit-plot-data -d " + path_arg(d1)) == 0);
  REQUIRE(run("experiment " + path_arg(cfg) + " --workers 8 --emit-plot-data -d " + path_arg(d8)) == 0);
  for (const char* f : {"cli_exp.csv", "cli_exp.raw.csv", "cli_exp.manifest.json"}) {
    CAPTURE(f);
    CHECK(fs::exists(d1 / f));
    CHECK(slurp(d1 / f) == slurp(d8 / f));
  }
  const auto m = nlohmann::json::parse(slurp(d1 / "cli_exp.manifest.json"));
  CHECK(m["config_hash"].get<std::string>().size() == 64);
  CHECK_FALSE(m.contains("timings"));

  REQUIRE(run("experiment " + path_arg(cfg) + " --timings -d " + path_arg(workdir() / "wt")) == 0);
  CHECK(nlohmann::json::parse(slurp(workdir() / "wt" / "cli_exp.manifest.json")).contains("timings"));
}

TEST_CASE("experiment config errors exit 2") {
  const auto cfg = workdir() / "bad.toml";
  write_file(cfg, "[model]\nhurst = 1.5\n");
  CHECK(run("experiment " + path_arg(cfg) + " -d " + path_arg(workdir())) == 2);
  write_file(cfg, "[model\n");
  CHECK(run("experiment " + path_arg(cfg) + " -d " + path_arg(workdir())) == 2);
  write_file(cfg, "[[cells]]\nestimator = \"hurst\"\nn = 3000000\nT = 1\n");
  CHECK(run("experiment " + path_arg(cfg) + " -d " + path_arg(workdir())) == 2);
  CHECK(run("experiment " + path_arg(workdir() / "nope.toml")) == 3);
}

TEST_CASE("shipped configs validate") {
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(RBESSEL_CONFIG_DIR)) {
    if (entry.path().extension() != ".toml") continue;
    CAPTURE(entry.path().string());
    CHECK(run("experiment --dry-run --allow-large " + path_arg(entry.path()) + " > /dev/null") == 0);
    ++seen;
  }
  CHECK(seen >= 4);
}

TEST_CASE("allow-large flag lifts the size guard") {
  const auto cfg = workdir() / "large.toml";
  write_file(cfg, "[[cells]]\nestimator = \"hurst\"\nn = 3000000\nT = 1\n");
  CHECK(run("experiment --dry-run " + path_arg(cfg)) == 2);
  CHECK(run("experiment --dry-run --allow-large " + path_arg(cfg) + " > /dev/null") == 0);
}
