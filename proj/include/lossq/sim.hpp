#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "lossq/params.hpp"

namespace lossq::sim {

/// SplitMix64; used only to derive independent per-replication seeds.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}
  std::uint64_t next() noexcept;

 private:
  std::uint64_t state_;
};

/// Engine for replication `index` under master seed `seed`.
std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t index);

/// Uniform on the open interval (0, 1) from 53 random bits.
double uniform_open(std::mt19937_64& rng) noexcept;

enum class ServiceKind { exponential, deterministic, uniform, lognormal };

std::string_view to_string(ServiceKind kind) noexcept;
ServiceKind parse_service_kind(std::string_view name);

/// Service-time law with mean exactly 1 / mu. Samples are strictly positive.
class ServiceDistribution {
 public:
  static ServiceDistribution exponential(double mu);
  static ServiceDistribution deterministic(double mu);
  /// Uniform on (0, 2 / mu].
  static ServiceDistribution uniform(double mu);
  /// exp(N(log(1/mu) - sigma^2 / 2, sigma^2)).
  static ServiceDistribution lognormal(double mu, double sigma = 1.0);
  static ServiceDistribution of_kind(ServiceKind kind, double mu);

  ServiceKind kind() const noexcept { return kind_; }
  double mean() const noexcept;
  double sample(std::mt19937_64& rng) const;

 private:
  ServiceDistribution(ServiceKind kind, double mu, double sigma) : kind_(kind), mu_(mu), sigma_(sigma) {}

  ServiceKind kind_;
  double mu_;
  double sigma_;
};

struct SimConfig {
  SystemParams params;
  CostPolynomial cost;
  ServiceDistribution service;
  std::optional<Threshold> threshold;  // observable mode
  std::optional<double> join_prob;     // unobservable mode
  double horizon = 0.0;                // simulated time units
  std::optional<double> warmup;        // defaults to 5% of horizon
  std::uint64_t seed = 0;
  int replications = 10;

  double effective_warmup() const { return warmup.value_or(0.05 * horizon); }
  void validate() const;
};

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;  // across replications; 0 with one replication
};

struct SimResult {
  std::vector<double> occupancy_pmf;  // time-average over (warmup, horizon]
  std::vector<double> arrival_pmf;    // occupancy seen by arrivals (joiners and balkers)
  Estimate mean_occupancy;
  Estimate joining_rate;  // admitted arrivals per time unit
  Estimate welfare;       // per time unit
  Estimate revenue;       // per time unit
  int replications = 0;
};

/// M/G/n/n with threshold admission.
SimResult simulate_observable(const SimConfig& config);

/// M/G/infinity with Bernoulli(q) thinning; welfare and revenue are both
/// estimated as joining_rate * (R - cost(mean occupancy)).
SimResult simulate_unobservable(const SimConfig& config);

/// Occupancy cap for the unobservable engine; exceeding it throws.
Threshold unobservable_safety_bound(double rho);

double total_variation(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace lossq::sim
