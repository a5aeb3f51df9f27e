#include "lossq/erlang.hpp"

#include "lossq/erlang_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lossq {

namespace {

constexpr double kFlushBelow = 1e-300;
constexpr double kRescaleAbove = 1e100;
constexpr double kRescaleFactor = 1e-100;

void check_args(double rho, Threshold n) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw std::domain_error("offered load must be positive");
  if (n < 0) throw std::domain_error("threshold must be nonnegative");
}

double ipow(double base, int power) {
  double out = 1.0;
  for (int k = 0; k < power; ++k) out *= base;
  return out;
}

}  // namespace

OccupancyDistribution occupancy_distribution(double rho, Threshold n) {
  check_args(rho, n);
  OccupancyDistribution dist;
  dist.n = n;
  // Largest weight anchored at 1; nothing overflows and tails underflow.
  dist.probs = kernel::mode_anchored_weights(rho, n);
  auto& p = dist.probs;

  double total = 0.0;
  for (double w : p) total += w;
  double mean = 0.0;
  for (std::size_t m = 0; m < p.size(); ++m) {
    p[m] /= total;
    if (p[m] < kFlushBelow) p[m] = 0.0;
    mean += static_cast<double>(m) * p[m];
  }
  dist.mean = mean;
  return dist;
}

double erlang_b(double rho, Threshold n) {
  check_args(rho, n);
  return kernel::erlang_b(rho, n);
}

double expected_occupancy(double rho, Threshold n) {
  check_args(rho, n);
  return kernel::expected_occupancy(rho, n);
}

double partial_power_moment(double rho, Threshold n, int power, Threshold cutoff) {
  check_args(rho, n);
  if (power < 1 || power > kMaxMomentPower) {
    throw std::domain_error("moment power must lie in [1, 12]");
  }
  if (cutoff < 0 || cutoff > n) throw std::domain_error("cutoff must lie in [0, n]");

  double weight = 1.0;
  double total = 1.0;
  double moment = 0.0;  // m = 0 contributes nothing
  for (Threshold m = 1; m <= n; ++m) {
    weight *= rho / static_cast<double>(m);
    total += weight;
    if (m <= cutoff) moment += ipow(static_cast<double>(m), power) * weight;
    if (weight > kRescaleAbove) {
      weight *= kRescaleFactor;
      total *= kRescaleFactor;
      moment *= kRescaleFactor;
    }
  }
  return moment / total;
}

TruncatedPoissonScan::TruncatedPoissonScan(double rho, int max_power)
    : rho_(rho), moments_below_(static_cast<std::size_t>(std::max(max_power, 0)), 0.0) {
  check_args(rho, 0);
  if (max_power > kMaxMomentPower) throw std::domain_error("moment power must not exceed 12");
}

void TruncatedPoissonScan::advance() {
  const double m = static_cast<double>(level_);
  double power = m;
  for (double& acc : moments_below_) {
    acc += power * weight_;
    power *= m;
  }
  ++level_;
  weight_ *= rho_ / static_cast<double>(level_);
  total_below_ = total_;
  total_ += weight_;
  if (weight_ > kRescaleAbove || total_ > kRescaleAbove) rescale();
}

double TruncatedPoissonScan::moment_below(int power) const {
  if (power < 1 || power > static_cast<int>(moments_below_.size())) {
    throw std::out_of_range("moment power outside the tracked range");
  }
  return moments_below_[static_cast<std::size_t>(power - 1)] / total_;
}

void TruncatedPoissonScan::rescale() {
  weight_ *= kRescaleFactor;
  total_ *= kRescaleFactor;
  total_below_ *= kRescaleFactor;
  for (double& acc : moments_below_) acc *= kRescaleFactor;
}

}  // namespace lossq
