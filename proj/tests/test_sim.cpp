#include <cmath>
#include <numeric>

#include "doctest.h"
#include "lossq/erlang.hpp"
#include "lossq/observable.hpp"
#include "lossq/sim.hpp"
#include "lossq/unobservable.hpp"

using namespace lossq;
using namespace lossq::sim;

namespace {

SimConfig observable_config(ServiceKind kind, Threshold n, double horizon, std::uint64_t seed) {
  const auto p = SystemParams::from_load(2.0, 1.0, 10.0);
  return SimConfig{p, CostPolynomial::linear(1.0), ServiceDistribution::of_kind(kind, p.mu()), n, std::nullopt,
                   horizon, std::nullopt, seed, 8};
}

}  // namespace

TEST_CASE("service distributions have mean 1 / mu and positive samples") {
  for (ServiceKind kind :
       {ServiceKind::exponential, ServiceKind::deterministic, ServiceKind::uniform, ServiceKind::lognormal}) {
    const ServiceDistribution d = ServiceDistribution::of_kind(kind, 2.5);
    CHECK(d.mean() == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(parse_service_kind(to_string(kind)) == kind);
    std::mt19937_64 rng(11);
    double sum = 0.0;
    const int draws = 200000;
    for (int i = 0; i < draws; ++i) {
      const double x = d.sample(rng);
      REQUIRE(x > 0.0);
      sum += x;
    }
    CHECK(std::abs(sum / draws - 0.4) <= 0.01);
  }
  CHECK_THROWS_AS(parse_service_kind("pareto"), std::invalid_argument);
  CHECK_THROWS_AS(ServiceDistribution::exponential(0.0), std::domain_error);
}

TEST_CASE("uniform_open stays inside (0, 1)") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100000; ++i) {
    const double u = uniform_open(rng);
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("config validation") {
  SimConfig c = observable_config(ServiceKind::exponential, 3, 100.0, 1);
  CHECK_NOTHROW(c.validate());
  c.join_prob = 0.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.join_prob.reset();
  c.threshold.reset();
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.threshold = -1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.threshold = 3;
  c.horizon = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.horizon = 10.0;
  c.warmup = 10.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.warmup.reset();
  c.replications = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.replications = 1;
  CHECK_THROWS_AS(simulate_unobservable(c), std::invalid_argument);
}

TEST_CASE("zero threshold and zero joining probability") {
  const SimResult r = simulate_observable(observable_config(ServiceKind::exponential, 0, 1000.0, 4));
  REQUIRE(r.occupancy_pmf.size() == 1);
  CHECK(r.occupancy_pmf[0] == 1.0);
  CHECK(r.joining_rate.mean == 0.0);
  CHECK(r.welfare.mean == 0.0);
  CHECK(r.revenue.mean == 0.0);

  SimConfig u = observable_config(ServiceKind::exponential, 0, 1000.0, 4);
  u.threshold.reset();
  u.join_prob = 0.0;
  const SimResult ru = simulate_unobservable(u);
  CHECK(ru.occupancy_pmf[0] == 1.0);
  CHECK(ru.mean_occupancy.mean == 0.0);
  CHECK(ru.revenue.mean == 0.0);
}

TEST_CASE("same seed gives bit-identical results") {
  const SimConfig c = observable_config(ServiceKind::lognormal, 3, 5000.0, 77);
  const SimResult a = simulate_observable(c);
  const SimResult b = simulate_observable(c);
  CHECK(a.occupancy_pmf == b.occupancy_pmf);
  CHECK(a.welfare.mean == b.welfare.mean);
  CHECK(a.welfare.std_error == b.welfare.std_error);
  CHECK(a.revenue.mean == b.revenue.mean);
  SimConfig other = c;
  other.seed = 78;
  CHECK(simulate_observable(other).welfare.mean != a.welfare.mean);
}

TEST_CASE("occupancy is insensitive to the service law") {
  const auto exact = occupancy_distribution(2.0, 3);
  for (ServiceKind kind :
       {ServiceKind::exponential, ServiceKind::deterministic, ServiceKind::uniform, ServiceKind::lognormal}) {
    CAPTURE(to_string(kind));
    const SimResult r = simulate_observable(observable_config(kind, 3, 20000.0, 2024));
    REQUIRE(r.occupancy_pmf.size() == 4);
    CHECK(std::accumulate(r.occupancy_pmf.begin(), r.occupancy_pmf.end(), 0.0) == doctest::Approx(1.0));
    CHECK(total_variation(r.occupancy_pmf, exact.probs) < 0.02);
    // Arrivals see time averages.
    CHECK(total_variation(r.arrival_pmf, exact.probs) < 0.02);
    const auto p = SystemParams::from_load(2.0, 1.0, 10.0);
    const double welfare = social_welfare(p, CostPolynomial::linear(1.0), 3);
    CHECK(std::abs(r.welfare.mean - welfare) <= 4.0 * r.welfare.std_error);
    const double rev = revenue(p, CostPolynomial::linear(1.0), 3);
    CHECK(std::abs(r.revenue.mean - rev) <= 4.0 * r.revenue.std_error);
  }
}

TEST_CASE("unobservable engine matches the infinite-server law") {
  const auto p = SystemParams::from_load(1200.0, 1.0 / 60.0, 400.0);
  const CostPolynomial cost = CostPolynomial::quadratic(0.0, 0.01);
  SimConfig c{p, cost, ServiceDistribution::exponential(p.mu()), std::nullopt, 1.0 / 6.0, 60.0 * 2000.0,
              std::nullopt, 9, 6};
  const SimResult r = simulate_unobservable(c);
  CHECK(std::abs(r.mean_occupancy.mean - 200.0) <= 4.0 * r.mean_occupancy.std_error + 0.5);
  CHECK(std::abs(r.joining_rate.mean - 20.0 / 6.0) <= 4.0 * r.joining_rate.std_error);
  CHECK(r.welfare.mean == r.revenue.mean);

  SimConfig heavy = c;
  heavy.params = SystemParams::from_load(1.0, 1.0, 400.0);
  heavy.service = ServiceDistribution::deterministic(1.0);
  heavy.join_prob = 0.5;
  heavy.horizon = 20000.0;
  const SimResult h = simulate_unobservable(heavy);
  const auto exact = occupancy_distribution(0.5, unobservable_safety_bound(1.0));
  std::vector<double> padded = h.occupancy_pmf;
  padded.resize(exact.probs.size(), 0.0);
  CHECK(total_variation(padded, exact.probs) < 0.02);
  CHECK(unobservable_safety_bound(1.0) == 64);
  CHECK(unobservable_safety_bound(100.0) == 2000);
}

TEST_CASE("total variation") {
  CHECK(total_variation({0.5, 0.5}, {0.5, 0.5}) == 0.0);
  CHECK(total_variation({1.0}, {0.0, 1.0}) == 1.0);
  CHECK(total_variation({0.25, 0.75}, {0.75, 0.25}) == doctest::Approx(0.5));
}
