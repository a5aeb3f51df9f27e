#pragma once

#include <vector>

#include "lossq/params.hpp"

// Truncated-Poisson (Erlang loss) kernel. Every routine works with ratio
// chained weights p_{m+1} / p_m = rho / (m + 1) so that rho up to 1e9 and
// truncation levels up to 1e6 never form rho^m / m! directly.

namespace lossq {

/// Largest power accepted by partial_power_moment.
inline constexpr int kMaxMomentPower = 12;

/// Stationary law of the M/G/n/n system.
struct OccupancyDistribution {
  Threshold n = 0;
  std::vector<double> probs;  // p_0 .. p_n
  double mean = 0.0;          // E(L_n)
};

OccupancyDistribution occupancy_distribution(double rho, Threshold n);

/// E(L_n); exactly zero for n = 0.
double expected_occupancy(double rho, Threshold n);

/// Erlang-B blocking probability p_n(n), with B(0) = 1.
double erlang_b(double rho, Threshold n);

/// sum_{m=0}^{cutoff} m^power p_m under the n-truncated distribution.
double partial_power_moment(double rho, Threshold n, int power, Threshold cutoff);

/// Walks the truncation level n = 0, 1, 2, ... keeping the normalizer and
/// the partial power sums in rescaled form. At level n it answers E(L_n),
/// p_n(n) and sum_{m<n} m^i p_m(n) in O(1), so a full threshold sweep costs
/// O(n_max * max_power).
class TruncatedPoissonScan {
 public:
  TruncatedPoissonScan(double rho, int max_power);

  Threshold level() const noexcept { return level_; }
  double rho() const noexcept { return rho_; }

  /// n -> n + 1.
  void advance();

  /// p_n(n).
  double blocking() const noexcept { return weight_ / total_; }

  /// E(L_n) = rho * Z_{n-1} / Z_n.
  double mean() const noexcept { return rho_ * total_below_ / total_; }

  /// sum_{m=0}^{n-1} m^power p_m(n), 1 <= power <= max_power.
  double moment_below(int power) const;

 private:
  void rescale();

  double rho_;
  Threshold level_ = 0;
  double weight_ = 1.0;       // w_n (rescaled)
  double total_ = 1.0;        // Z_n = sum_{m<=n} w_m
  double total_below_ = 0.0;  // Z_{n-1}
  std::vector<double> moments_below_;  // sum_{m<n} m^i w_m
};

}  // namespace lossq
