#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "lossq/params.hpp"

namespace lossq {

/// Default cap on the equilibrium threshold; larger values mean the model is
/// nearly costless and every O(n_e) scan becomes impractical.
inline constexpr Threshold kDefaultThresholdBound = 10'000'000;

/// Relative tolerance applied to the marginal conditions (ratio <= R).
inline constexpr double kMarginalRelTol = 1e-9;

/// Two curve values closer than this (relative to the curve maximum) are a
/// tie; ties resolve to the larger threshold.
inline constexpr double kTieRelTol = 1e-13;

/// R - cost(n): utility of joining when n customers are present.
double individual_utility(const SystemParams& params, const CostPolynomial& cost, Threshold n);

/// n_e = max{N : cost(N - 1) <= R}, found by exponential + binary search.
/// Throws std::overflow_error when n_e exceeds `bound`.
Threshold equilibrium_threshold(const SystemParams& params, const CostPolynomial& cost,
                                Threshold bound = kDefaultThresholdBound);

/// Closed form for costs of degree <= 2: 1 + floor(x*) where x* solves
/// C_1 x + C_2 x^2 = R. Empty for higher effective degree.
std::optional<Threshold> equilibrium_threshold_closed_form(const SystemParams& params,
                                                           const CostPolynomial& cost);

/// S^r(n), long-run net gain per time unit when everyone uses threshold n.
double social_welfare(const SystemParams& params, const CostPolynomial& cost, Threshold n);

/// Monopolist admission fee for threshold n >= 1: R - cost(n - 1).
double admission_price(const SystemParams& params, const CostPolynomial& cost, Threshold n);

/// S^r_m(n) = mu E(L_n) (R - cost(n - 1)); domain error for n = 0.
double revenue(const SystemParams& params, const CostPolynomial& cost, Threshold n);

/// Left-hand side of the welfare marginal condition for threshold N >= 1:
/// the marginal congestion cost of raising the threshold from N - 1 to N
/// per unit of marginal throughput. S^r(N) > S^r(N - 1) iff it is below R.
double welfare_marginal_ratio(const SystemParams& params, const CostPolynomial& cost, Threshold N);

/// Revenue counterpart: S^r_m(N) > S^r_m(N - 1) iff it is below R.
double revenue_marginal_ratio(const SystemParams& params, const CostPolynomial& cost, Threshold N);

/// One row of a threshold sweep.
struct ThresholdPoint {
  Threshold n = 0;
  double mean_occupancy = 0.0;  // E(L_n)
  double welfare = 0.0;         // S^r(n)
  double revenue = 0.0;         // S^r_m(n); 0 at n = 0
  double welfare_ratio = 0.0;   // welfare_marginal_ratio(n); 0 at n = 0
  double revenue_ratio = 0.0;   // revenue_marginal_ratio(n); 0 at n = 0
};

/// Visits n = 0 .. n_max in order with O(degree) work per point.
void scan_thresholds(const SystemParams& params, const CostPolynomial& cost, Threshold n_max,
                     const std::function<void(const ThresholdPoint&)>& visit);

/// Both routes to a threshold. `by_scan` is the argmax of the curve over
/// [lo, n_e] with ties to the larger n; `by_marginal` the largest N in
/// [1, n_e] whose marginal ratio is <= R (1 + kMarginalRelTol).
struct ThresholdRoutes {
  Threshold by_scan = 0;
  Threshold by_marginal = 0;
  double value_at_scan = 0.0;
  double value_at_marginal = 0.0;
  double tie_tolerance = 0.0;  // kTieRelTol * max of the curve
};

ThresholdRoutes welfare_threshold_routes(const SystemParams& params, const CostPolynomial& cost);
ThresholdRoutes revenue_threshold_routes(const SystemParams& params, const CostPolynomial& cost);

/// n_s. When the two routes differ by more than a tie, throws ConsistencyError;
/// otherwise returns the scan result.
Threshold socially_optimal_threshold(const SystemParams& params, const CostPolynomial& cost);

struct RevenueOptimum {
  Threshold threshold = 0;  // n_m
  double price = 0.0;       // R - cost(n_m - 1)
  double revenue = 0.0;     // S^r_m(n_m)
};

RevenueOptimum revenue_optimal_threshold(const SystemParams& params, const CostPolynomial& cost);

struct ObservableAnalysis {
  Threshold n_e = 0;
  Threshold n_s = 0;
  Threshold n_m = 0;
  double price_o = 0.0;
  std::vector<double> welfare_curve;  // S^r(n), n = 0..n_e
  std::vector<double> revenue_curve;  // S^r_m(n), n = 0..n_e (0 at n = 0)
};

/// Full observable-regime analysis; stores O(n_e) curve values.
ObservableAnalysis analyze_observable(const SystemParams& params, const CostPolynomial& cost);

}  // namespace lossq
