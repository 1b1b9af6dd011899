#include <doctest.h>

#include <cmath>
#include <memory>

#include "rbessel/bessel_sim.hpp"
#include "rbessel/errors.hpp"
#include "rbessel/rng.hpp"

using namespace rbessel;
using namespace rbessel::sim;

namespace {

std::shared_ptr<const FbmPath> zero_driver(std::size_t n, double horizon, double h = 0.3) {
  return std::make_shared<const FbmPath>(FbmPath{std::vector<double>(n + 1, 0.0), horizon, HurstIndex(h)});
}

std::shared_ptr<const FbmPath> random_driver(std::size_t n, double horizon, std::uint64_t seed, double h = 0.3) {
  return std::make_shared<const FbmPath>(fbm::sample_fbm(n, horizon, HurstIndex(h), seed));
}

ModelParams params(double x0, double a, double sigma, double eps, double h = 0.3) {
  return ModelParams{x0, a, sigma, HurstIndex(h), eps};
}

// Exact solution of x' = a / x, x(0) = x0.
double ode_solution(double x0, double a, double t) { return std::sqrt(x0 * x0 + 2.0 * a * t); }

}  // namespace

TEST_CASE("ModelParams validation") {
  CHECK_NOTHROW(params(1, 2, 1, 1e-4).validate());
  CHECK_THROWS_AS(params(0, 2, 1, 1e-4).validate(), DomainError);
  CHECK_THROWS_AS(params(1, -2, 1, 1e-4).validate(), DomainError);
  CHECK_THROWS_AS(params(1, 2, 0, 1e-4).validate(), DomainError);
  CHECK_THROWS_AS(params(1, 2, 1, 0).validate(), DomainError);
  CHECK_THROWS_AS(params(1, 2, 1, NAN).validate(), DomainError);
}

TEST_CASE("euler_step hand-evaluated updates") {
  const auto p = params(1, 2, 1, 1e-4);
  auto s = euler_step(1.0, 0.0, p, 0.01);
  CHECK(s.dl == doctest::Approx(0.009999000099990001).epsilon(1e-15));
  CHECK(s.x_next == doctest::Approx(1.0199980001999800).epsilon(1e-15));

  // Below zero only epsilon remains in the denominator.
  s = euler_step(-0.5, 0.0, p, 0.01);
  CHECK(s.dl == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(s.x_next == doctest::Approx(199.5).epsilon(1e-12));

  // x = 0 is not positive: same as below zero.
  CHECK(euler_step(0.0, 0.0, p, 0.01).dl == doctest::Approx(100.0).epsilon(1e-12));

  // Regularisation negligible for large x.
  s = euler_step(1e4, 0.0, p, 0.01);
  CHECK(s.x_next - 1e4 == doctest::Approx(2.0 * 0.01 / 1e4).epsilon(1e-6));

  // Noise enters as sigma * dB.
  const auto q = params(1, 2, 3, 1e-4);
  CHECK(euler_step(1.0, 0.1, q, 0.01).x_next == doctest::Approx(1.0199980001999800 + 0.3).epsilon(1e-14));

  CHECK_THROWS_AS(euler_step(1.0, 0.0, p, 0.0), DomainError);
  CHECK_THROWS_AS(euler_step(NAN, 0.0, p, 0.01), DomainError);
  CHECK_THROWS_AS(euler_step(1.0, INFINITY, p, 0.01), DomainError);
}

TEST_CASE("tiny drift and zero noise leave x at x0") {
  const auto path = simulate_prelimit(params(1, 1e-12, 1, 1e-4), zero_driver(1000, 1.0));
  for (double v : path.x) CHECK(std::fabs(v - 1.0) < 1e-9);
}

TEST_CASE("zero driver follows sqrt(x0^2 + 2at) at first order") {
  const double x0 = 1.0, a = 2.0;
  // Convergence is measured against the regularised ODE x' = a / (x + eps),
  // whose solution is sqrt((x0 + eps)^2 + 2at) - eps; the O(eps) offset from
  // sqrt(x0^2 + 2at) would otherwise mask the step-size error at fine grids.
  const double eps = 1e-4;
  auto max_error = [&](std::size_t n) {
    const auto path = simulate_prelimit(params(x0, a, 1, eps), zero_driver(n, 1.0));
    double err = 0;
    for (std::size_t k = 0; k <= n; ++k) {
      err = std::max(err, std::fabs(path.x[k] + eps - ode_solution(x0 + eps, a, path.time(k))));
    }
    return err;
  };
  const auto path = simulate_prelimit(params(x0, a, 1, 1e-4), zero_driver(10000, 1.0));
  CHECK(std::fabs(path.x.back() - 2.2360679774997897) < 5e-3);
  for (std::size_t n : {1000u, 4000u}) {
    const double ratio = max_error(n) / max_error(2 * n);
    INFO("n=" << n << " ratio=" << ratio);
    CHECK(ratio > 2.0 / 1.2);
    CHECK(ratio < 2.0 * 1.2);
  }
}

TEST_CASE("path invariants on random drivers") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto path = simulate_prelimit(params(1, 2, 1, 1e-4), random_driver(2000, 1.0, seed));
    CHECK(path.x[0] == 1.0);
    CHECK(path.l[0] == 0.0);
    CHECK(l_nondecreasing(path));
    for (std::size_t k = 0; k + 1 < path.l.size(); ++k) REQUIRE(path.l[k + 1] > path.l[k]);
    CHECK(decomposition_residual(path) < 1e-9);
  }
}

TEST_CASE("simulate_values agrees with simulate_prelimit") {
  const auto p = params(1, 2, 1, 1e-4);
  const auto driver = random_driver(5000, 2.0, 4);
  const auto path = simulate_prelimit(p, driver);
  std::vector<double> x;
  simulate_values(p, driver->values, driver->horizon, x);
  CHECK(x == path.x);
}

TEST_CASE("epsilon ladder") {
  const auto base = params(1, 2, 1, 1e-4);
  const auto driver = random_driver(10000, 1.0, 21);

  SUBCASE("single rung equals simulate_prelimit") {
    const double eps[] = {1e-3};
    const auto ladder = simulate_epsilon_ladder(base, eps, driver);
    REQUIRE(ladder.size() == 1);
    auto p = base;
    p.epsilon = 1e-3;
    CHECK(ladder[0].x == simulate_prelimit(p, driver).x);
    CHECK(ladder[0].driver == driver);
  }
  SUBCASE("ordering and shrinking gaps") {
    const double eps[] = {0.1, 0.01, 0.001, 0.0001};
    const auto ladder = simulate_epsilon_ladder(base, eps, driver);
    const auto report = check_ladder_ordering(ladder);
    CHECK(report.nodes_checked == 3 * 10001);
    CHECK(report.ordered());
    REQUIRE(report.sup_gaps.size() == 3);
  }
  SUBCASE("invalid ladders") {
    CHECK_THROWS_AS(simulate_epsilon_ladder(base, std::span<const double>{}, driver), DomainError);
    const double up[] = {0.01, 0.1};
    CHECK_THROWS_AS(simulate_epsilon_ladder(base, up, driver), DomainError);
    const double dup[] = {0.1, 0.1};
    CHECK_THROWS_AS(simulate_epsilon_ladder(base, dup, driver), DomainError);
    const double neg[] = {0.1, -0.1};
    CHECK_THROWS_AS(simulate_epsilon_ladder(base, neg, driver), DomainError);
  }
}

TEST_CASE("ladder checker reports violations it is given") {
  const auto driver = zero_driver(10, 1.0);
  const double eps[] = {0.1, 0.01};
  auto ladder = simulate_epsilon_ladder(params(1, 2, 1, 1e-4), eps, driver);
  ladder[1].x[5] = ladder[0].x[5] - 0.5;
  const auto report = check_ladder_ordering(ladder);
  CHECK(report.exact_violations == 1);
  CHECK(report.tolerance_violations == 1);
  CHECK(report.worst_gap == doctest::Approx(0.5));
  CHECK(report.worst_node == 5);
}

TEST_CASE("boundedness diagnostic") {
  SUBCASE("deterministic case uses x0 + aT max(2/x0, 1)") {
    const auto path = simulate_prelimit(params(1, 2, 1, 1e-4), zero_driver(1000, 1.0));
    CHECK(empirical_holder_constant(*path.driver, 0.15) == 0.0);
    CHECK(boundedness_bound(path, 0.15, 0.0) == doctest::Approx(5.0));
    CHECK(boundedness_diagnostic(path, 0.15, 0.0));
  }
  SUBCASE("holds on simulated paths, fails on corrupted ones") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      auto path = simulate_prelimit(params(1, 2, 1, 1e-4), random_driver(5000, 1.0, seed));
      const double lambda = 0.15;
      const double holder = empirical_holder_constant(*path.driver, lambda);
      CHECK(holder > 0.0);
      CHECK(boundedness_diagnostic(path, lambda, holder));
      for (double& v : path.x) v *= 1e3;
      CHECK_FALSE(boundedness_diagnostic(path, lambda, holder));
    }
  }
  SUBCASE("lambda must lie in (0, H)") {
    const auto path = simulate_prelimit(params(1, 2, 1, 1e-4), zero_driver(10, 1.0));
    CHECK_THROWS_AS(boundedness_diagnostic(path, 0.3, 1.0), DomainError);
    CHECK_THROWS_AS(boundedness_diagnostic(path, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(boundedness_diagnostic(path, 0.1, -1.0), DomainError);
  }
}

TEST_CASE("empirical Hoelder constant on a known path") {
  // B(t) = t on [0, 1]: sup |t-s|^{1-lambda} = 1.
  std::vector<double> v(101);
  for (std::size_t k = 0; k <= 100; ++k) v[k] = k / 100.0;
  const FbmPath line{v, 1.0, HurstIndex(0.3)};
  CHECK(empirical_holder_constant(line, 0.2) == doctest::Approx(1.0).epsilon(1e-12));
  // Coarsening to 10 points keeps the same supremum here.
  CHECK(empirical_holder_constant(line, 0.2, 10) == doctest::Approx(1.0).epsilon(1e-12));
}
