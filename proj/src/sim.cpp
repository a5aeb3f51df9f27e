#include "lossq/sim.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <thread>

namespace lossq::sim {

std::uint64_t SplitMix64::next() noexcept {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 mix(seed ^ (0xd1b54a32d192ed03ULL * (index + 1)));
  std::seed_seq seq{mix.next(), mix.next(), mix.next(), mix.next()};
  return std::mt19937_64(seq);
}

double uniform_open(std::mt19937_64& rng) noexcept {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

std::string_view to_string(ServiceKind kind) noexcept {
  switch (kind) {
    case ServiceKind::exponential: return "exponential";
    case ServiceKind::deterministic: return "deterministic";
    case ServiceKind::uniform: return "uniform";
    case ServiceKind::lognormal: return "lognormal";
  }
  return "unknown";
}

ServiceKind parse_service_kind(std::string_view name) {
  for (auto kind : {ServiceKind::exponential, ServiceKind::deterministic, ServiceKind::uniform,
                    ServiceKind::lognormal}) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown service distribution '" + std::string(name) + "'");
}

ServiceDistribution ServiceDistribution::exponential(double mu) {
  if (!(mu > 0.0)) throw std::domain_error("service rate must be positive");
  return {ServiceKind::exponential, mu, 0.0};
}

ServiceDistribution ServiceDistribution::deterministic(double mu) {
  if (!(mu > 0.0)) throw std::domain_error("service rate must be positive");
  return {ServiceKind::deterministic, mu, 0.0};
}

ServiceDistribution ServiceDistribution::uniform(double mu) {
  if (!(mu > 0.0)) throw std::domain_error("service rate must be positive");
  return {ServiceKind::uniform, mu, 0.0};
}

ServiceDistribution ServiceDistribution::lognormal(double mu, double sigma) {
  if (!(mu > 0.0)) throw std::domain_error("service rate must be positive");
  if (!(sigma > 0.0)) throw std::domain_error("lognormal sigma must be positive");
  return {ServiceKind::lognormal, mu, sigma};
}

ServiceDistribution ServiceDistribution::of_kind(ServiceKind kind, double mu) {
  switch (kind) {
    case ServiceKind::exponential: return exponential(mu);
    case ServiceKind::deterministic: return deterministic(mu);
    case ServiceKind::uniform: return uniform(mu);
    case ServiceKind::lognormal: return lognormal(mu);
  }
  throw std::invalid_argument("unknown service kind");
}

double ServiceDistribution::mean() const noexcept { return 1.0 / mu_; }

double ServiceDistribution::sample(std::mt19937_64& rng) const {
  switch (kind_) {
    case ServiceKind::exponential:
      return -std::log(uniform_open(rng)) / mu_;
    case ServiceKind::deterministic:
      return 1.0 / mu_;
    case ServiceKind::uniform:
      return (2.0 / mu_) * uniform_open(rng);
    case ServiceKind::lognormal: {
      // Box-Muller, one normal per call.
      const double u1 = uniform_open(rng);
      const double u2 = uniform_open(rng);
      const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
      return std::exp(-std::log(mu_) - 0.5 * sigma_ * sigma_ + sigma_ * z);
    }
  }
  throw std::logic_error("unreachable service kind");
}

void SimConfig::validate() const {
  if (threshold.has_value() == join_prob.has_value()) {
    throw std::invalid_argument("exactly one of threshold or join_prob must be set");
  }
  if (threshold && *threshold < 0) throw std::invalid_argument("threshold must be nonnegative");
  if (join_prob && !(*join_prob >= 0.0 && *join_prob <= 1.0)) {
    throw std::invalid_argument("join_prob must lie in [0, 1]");
  }
  if (!std::isfinite(horizon) || !(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  const double w = effective_warmup();
  if (!(w >= 0.0) || !(horizon > w)) throw std::invalid_argument("need horizon > warmup >= 0");
  if (replications < 1) throw std::invalid_argument("replications must be at least 1");
}

Threshold unobservable_safety_bound(double rho) {
  return std::max<Threshold>(64, static_cast<Threshold>(std::ceil(20.0 * rho)));
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  const std::size_t len = std::max(p.size(), q.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const double a = i < p.size() ? p[i] : 0.0;
    const double b = i < q.size() ? q[i] : 0.0;
    acc += std::abs(a - b);
  }
  return 0.5 * acc;
}

namespace {

enum class EventKind : std::uint8_t { arrival, departure };

struct Event {
  double time;
  std::uint64_t seq;
  EventKind kind;
};

// Min-heap on time; equal times leave in insertion order.
struct Later {
  bool operator()(const Event& a, const Event& b) const noexcept {
    return a.time != b.time ? a.time > b.time : a.seq > b.seq;
  }
};

struct Replication {
  std::vector<double> occupancy_pmf;
  std::vector<double> arrival_pmf;
  double mean_occupancy = 0.0;
  double joining_rate = 0.0;
  double welfare = 0.0;
  double revenue = 0.0;
};

Replication run_replication(const SimConfig& config, std::uint64_t index) {
  std::mt19937_64 rng = stream_engine(config.seed, index);
  const double lambda = config.params.lambda();
  const double reward = config.params.reward();
  const double horizon = config.horizon;
  const double warmup = config.effective_warmup();
  const double window = horizon - warmup;
  const bool observable = config.threshold.has_value();
  const Threshold cap = observable ? *config.threshold : unobservable_safety_bound(config.params.rho());
  const double join_prob = observable ? 1.0 : *config.join_prob;

  std::vector<double> time_in_state(static_cast<std::size_t>(cap) + 1, 0.0);
  std::vector<double> seen_by_arrivals(static_cast<std::size_t>(cap) + 1, 0.0);
  double arrivals = 0.0;
  double joins = 0.0;
  double utility_sum = 0.0;

  std::priority_queue<Event, std::vector<Event>, Later> events;
  std::uint64_t seq = 0;
  events.push({-std::log(uniform_open(rng)) / lambda, seq++, EventKind::arrival});

  Threshold occupancy = 0;
  double clock = 0.0;
  while (!events.empty()) {
    const Event ev = events.top();
    const double until = std::min(ev.time, horizon);
    const double overlap = until - std::max(clock, warmup);
    if (overlap > 0.0) time_in_state[static_cast<std::size_t>(occupancy)] += overlap;
    if (ev.time > horizon) break;
    events.pop();
    clock = ev.time;

    if (ev.kind == EventKind::departure) {
      --occupancy;
      continue;
    }
    events.push({clock - std::log(uniform_open(rng)) / lambda, seq++, EventKind::arrival});
    bool join;
    if (observable) {
      join = occupancy < cap;
    } else {
      join = uniform_open(rng) < join_prob;
      if (join && occupancy >= cap) {
        throw std::runtime_error("unobservable simulation exceeded its occupancy safety bound");
      }
    }
    if (clock > warmup) {
      arrivals += 1.0;
      seen_by_arrivals[static_cast<std::size_t>(occupancy)] += 1.0;
      if (join) {
        joins += 1.0;
        utility_sum += reward - config.cost(static_cast<double>(occupancy));
      }
    }
    if (join) {
      ++occupancy;
      events.push({clock + config.service.sample(rng), seq++, EventKind::departure});
    }
  }

  Replication out;
  out.occupancy_pmf = std::move(time_in_state);
  out.mean_occupancy = 0.0;
  for (std::size_t m = 0; m < out.occupancy_pmf.size(); ++m) {
    out.occupancy_pmf[m] /= window;
    out.mean_occupancy += static_cast<double>(m) * out.occupancy_pmf[m];
  }
  out.arrival_pmf = std::move(seen_by_arrivals);
  if (arrivals > 0.0) {
    for (double& x : out.arrival_pmf) x /= arrivals;
  }
  out.joining_rate = joins / window;
  if (observable) {
    out.welfare = utility_sum / window;
    const Threshold n = *config.threshold;
    out.revenue = n >= 1 ? out.joining_rate * (reward - config.cost(static_cast<double>(n - 1))) : 0.0;
  } else {
    out.welfare = out.joining_rate * (reward - config.cost(out.mean_occupancy));
    out.revenue = out.welfare;
  }
  return out;
}

Estimate summarize(const std::vector<Replication>& reps, double Replication::*field) {
  const double r = static_cast<double>(reps.size());
  double mean = 0.0;
  for (const auto& rep : reps) mean += rep.*field;
  mean /= r;
  double ss = 0.0;
  for (const auto& rep : reps) ss += (rep.*field - mean) * (rep.*field - mean);
  Estimate est{mean, 0.0};
  if (reps.size() > 1) est.std_error = std::sqrt(ss / (r - 1.0) / r);
  return est;
}

std::vector<double> average(const std::vector<Replication>& reps,
                            std::vector<double> Replication::*field) {
  std::vector<double> out((reps.front().*field).size(), 0.0);
  for (const auto& rep : reps) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += (rep.*field)[i];
  }
  for (double& x : out) x /= static_cast<double>(reps.size());
  return out;
}

SimResult run(const SimConfig& config) {
  const auto count = static_cast<std::size_t>(config.replications);
  const std::size_t workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  std::vector<Replication> reps(count);
  // Replications are independent streams; merging below is in index order.
  for (std::size_t begin = 0; begin < count; begin += workers) {
    const std::size_t end = std::min(count, begin + workers);
    std::vector<std::future<Replication>> batch;
    for (std::size_t i = begin; i < end; ++i) {
      batch.push_back(std::async(std::launch::async, run_replication, std::cref(config), i));
    }
    for (std::size_t i = begin; i < end; ++i) reps[i] = batch[i - begin].get();
  }

  SimResult result;
  result.replications = config.replications;
  result.occupancy_pmf = average(reps, &Replication::occupancy_pmf);
  result.arrival_pmf = average(reps, &Replication::arrival_pmf);
  result.mean_occupancy = summarize(reps, &Replication::mean_occupancy);
  result.joining_rate = summarize(reps, &Replication::joining_rate);
  result.welfare = summarize(reps, &Replication::welfare);
  result.revenue = summarize(reps, &Replication::revenue);
  return result;
}

}  // namespace

SimResult simulate_observable(const SimConfig& config) {
  config.validate();
  if (!config.threshold) throw std::invalid_argument("simulate_observable needs a threshold");
  return run(config);
}

SimResult simulate_unobservable(const SimConfig& config) {
  config.validate();
  if (!config.join_prob) throw std::invalid_argument("simulate_unobservable needs a join_prob");
  return run(config);
}

}  // namespace lossq::sim
