#include "lossq/observable.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lossq/erlang.hpp"

namespace lossq {

namespace {

void check_threshold(Threshold n) {
  if (n < 0) throw std::domain_error("threshold must be nonnegative");
}

double ipow(double base, int power) {
  double out = 1.0;
  for (int k = 0; k < power; ++k) out *= base;
  return out;
}

// sum_i C_i [N (N-1)^i - rho M_i] / (N - E), with E = E(L_{N-1}) and
// M_i = sum_{m <= N-2} m^i p_m(N-1). This is the marginal welfare ratio
// after cancelling the common Erlang-B factor, so it stays finite when the
// individual increments underflow.
template <class MomentFn>
double welfare_ratio_from(const CostPolynomial& cost, double rho, Threshold N, double mean_prev,
                          MomentFn moment_prev) {
  const double n = static_cast<double>(N);
  double numerator = 0.0;
  for (int i = 1; i <= cost.degree(); ++i) {
    const double c = cost.coeff(i);
    if (c == 0.0) continue;
    numerator += c * (n * ipow(n - 1.0, i) - rho * moment_prev(i));
  }
  return numerator / (n - mean_prev);
}

// sum_i C_i [(N-1)^i + E ((N-1)^i - (N-2)^i) / dE], dE = E(L_N) - E(L_{N-1}).
double revenue_ratio_from(const CostPolynomial& cost, double rho, Threshold N, double mean_prev,
                          double blocking_prev) {
  const double n = static_cast<double>(N);
  const double d_mean = rho * blocking_prev * (n - mean_prev) / (n + rho * blocking_prev);
  double out = 0.0;
  for (int i = 1; i <= cost.degree(); ++i) {
    const double c = cost.coeff(i);
    if (c == 0.0) continue;
    const double hi = ipow(n - 1.0, i);
    const double step = hi - ipow(n - 2.0, i);
    out += c * (hi + (mean_prev == 0.0 ? 0.0 : mean_prev * step / d_mean));
  }
  return out;
}

struct SweepState {
  ThresholdRoutes welfare;
  ThresholdRoutes revenue;
};

// Running argmax with ties to the larger index, tolerance relative to the
// running maximum. Curve values are nonnegative on [0, n_e].
class TieArgmax {
 public:
  void offer(Threshold n, double value) {
    if (!seen_ || value > best_) best_ = value;
    if (!seen_ || value >= best_ - kTieRelTol * std::abs(best_)) {
      arg_ = n;
      value_at_arg_ = value;
    }
    seen_ = true;
  }
  Threshold arg() const { return arg_; }
  double value() const { return value_at_arg_; }
  double tolerance() const { return kTieRelTol * std::abs(best_); }

 private:
  bool seen_ = false;
  double best_ = 0.0;
  Threshold arg_ = 0;
  double value_at_arg_ = 0.0;
};

SweepState sweep_routes(const SystemParams& params, const CostPolynomial& cost,
                        std::vector<double>* welfare_curve, std::vector<double>* revenue_curve) {
  const Threshold n_e = equilibrium_threshold(params, cost);
  const double limit = params.reward() * (1.0 + kMarginalRelTol);

  TieArgmax welfare_best;
  TieArgmax revenue_best;
  Threshold welfare_marginal = 0;
  Threshold revenue_marginal = 0;
  double welfare_at_marginal = 0.0;
  double revenue_at_marginal = 0.0;

  if (welfare_curve) welfare_curve->reserve(static_cast<std::size_t>(n_e) + 1);
  if (revenue_curve) revenue_curve->reserve(static_cast<std::size_t>(n_e) + 1);

  scan_thresholds(params, cost, n_e, [&](const ThresholdPoint& pt) {
    if (welfare_curve) welfare_curve->push_back(pt.welfare);
    if (revenue_curve) revenue_curve->push_back(pt.revenue);
    welfare_best.offer(pt.n, pt.welfare);
    if (pt.n >= 1) {
      revenue_best.offer(pt.n, pt.revenue);
      if (pt.welfare_ratio <= limit) {
        welfare_marginal = pt.n;
        welfare_at_marginal = pt.welfare;
      }
      if (pt.revenue_ratio <= limit) {
        revenue_marginal = pt.n;
        revenue_at_marginal = pt.revenue;
      }
    }
  });

  SweepState out;
  out.welfare = {welfare_best.arg(), welfare_marginal, welfare_best.value(), welfare_at_marginal,
                 welfare_best.tolerance()};
  out.revenue = {revenue_best.arg(), revenue_marginal, revenue_best.value(), revenue_at_marginal,
                 revenue_best.tolerance()};
  return out;
}

Threshold reconcile(const ThresholdRoutes& routes, const char* what) {
  if (routes.by_scan == routes.by_marginal) return routes.by_scan;
  if (std::abs(routes.value_at_scan - routes.value_at_marginal) <= routes.tie_tolerance) {
    return routes.by_scan;
  }
  throw ConsistencyError(std::string(what) + ": argmax scan gives " + std::to_string(routes.by_scan) +
                         " but the marginal condition gives " + std::to_string(routes.by_marginal));
}

}  // namespace

double individual_utility(const SystemParams& params, const CostPolynomial& cost, Threshold n) {
  check_threshold(n);
  return params.reward() - cost(static_cast<double>(n));
}

Threshold equilibrium_threshold(const SystemParams& params, const CostPolynomial& cost,
                                Threshold bound) {
  const double reward = params.reward();
  auto joinable = [&](Threshold n) { return cost(static_cast<double>(n - 1)) <= reward; };

  // joinable(1) always holds since cost(0) = 0 < R.
  Threshold lo = 1;
  Threshold hi = 2;
  while (joinable(hi)) {
    lo = hi;
    if (hi > bound) {
      throw std::overflow_error("equilibrium threshold exceeds the bound " + std::to_string(bound));
    }
    hi *= 2;
  }
  while (hi - lo > 1) {
    const Threshold mid = lo + (hi - lo) / 2;
    (joinable(mid) ? lo : hi) = mid;
  }
  if (lo > bound) {
    throw std::overflow_error("equilibrium threshold exceeds the bound " + std::to_string(bound));
  }
  return lo;
}

std::optional<Threshold> equilibrium_threshold_closed_form(const SystemParams& params,
                                                           const CostPolynomial& cost) {
  if (cost.effective_degree() > 2) return std::nullopt;
  const double c1 = cost.coeff(1);
  const double c2 = cost.coeff(2);
  const double reward = params.reward();
  double root;
  if (c2 == 0.0) {
    root = reward / c1;
  } else {
    // (-C_1 + sqrt(C_1^2 + 4 C_2 R)) / (2 C_2), rationalized.
    root = 2.0 * reward / (c1 + std::sqrt(c1 * c1 + 4.0 * c2 * reward));
  }
  return 1 + static_cast<Threshold>(std::floor(root));
}

double social_welfare(const SystemParams& params, const CostPolynomial& cost, Threshold n) {
  check_threshold(n);
  if (n == 0) return 0.0;
  const double rho = params.rho();
  double congestion = 0.0;
  for (int i = 1; i <= cost.degree(); ++i) {
    const double c = cost.coeff(i);
    if (c == 0.0) continue;
    congestion += c * partial_power_moment(rho, n, i, n - 1);
  }
  return params.mu() * params.reward() * expected_occupancy(rho, n) - params.mu() * rho * congestion;
}

double admission_price(const SystemParams& params, const CostPolynomial& cost, Threshold n) {
  if (n < 1) throw std::domain_error("admission price needs a threshold of at least 1");
  return params.reward() - cost(static_cast<double>(n - 1));
}

double revenue(const SystemParams& params, const CostPolynomial& cost, Threshold n) {
  if (n < 1) throw std::domain_error("revenue needs a threshold of at least 1");
  return params.mu() * expected_occupancy(params.rho(), n) * admission_price(params, cost, n);
}

double welfare_marginal_ratio(const SystemParams& params, const CostPolynomial& cost, Threshold N) {
  if (N < 1) throw std::domain_error("marginal ratio needs N >= 1");
  const double rho = params.rho();
  const double mean_prev = expected_occupancy(rho, N - 1);
  return welfare_ratio_from(cost, rho, N, mean_prev, [&](int i) {
    return N >= 2 ? partial_power_moment(rho, N - 1, i, N - 2) : 0.0;
  });
}

double revenue_marginal_ratio(const SystemParams& params, const CostPolynomial& cost, Threshold N) {
  if (N < 1) throw std::domain_error("marginal ratio needs N >= 1");
  const double rho = params.rho();
  return revenue_ratio_from(cost, rho, N, expected_occupancy(rho, N - 1), erlang_b(rho, N - 1));
}

void scan_thresholds(const SystemParams& params, const CostPolynomial& cost, Threshold n_max,
                     const std::function<void(const ThresholdPoint&)>& visit) {
  check_threshold(n_max);
  const double rho = params.rho();
  const double mu = params.mu();
  const double reward = params.reward();
  TruncatedPoissonScan scan(rho, cost.degree());

  auto congestion = [&] {
    double acc = 0.0;
    for (int i = 1; i <= cost.degree(); ++i) {
      const double c = cost.coeff(i);
      if (c != 0.0) acc += c * scan.moment_below(i);
    }
    return acc;
  };

  ThresholdPoint pt;
  visit(pt);
  for (Threshold n = 1; n <= n_max; ++n) {
    // Ratios for threshold n need the state at level n - 1.
    const double mean_prev = scan.mean();
    pt.welfare_ratio =
        welfare_ratio_from(cost, rho, n, mean_prev, [&](int i) { return scan.moment_below(i); });
    pt.revenue_ratio = revenue_ratio_from(cost, rho, n, mean_prev, scan.blocking());
    scan.advance();

    pt.n = n;
    pt.mean_occupancy = scan.mean();
    pt.welfare = mu * reward * pt.mean_occupancy - mu * rho * congestion();
    pt.revenue = mu * pt.mean_occupancy * (reward - cost(static_cast<double>(n - 1)));
    visit(pt);
  }
}

ThresholdRoutes welfare_threshold_routes(const SystemParams& params, const CostPolynomial& cost) {
  return sweep_routes(params, cost, nullptr, nullptr).welfare;
}

ThresholdRoutes revenue_threshold_routes(const SystemParams& params, const CostPolynomial& cost) {
  return sweep_routes(params, cost, nullptr, nullptr).revenue;
}

Threshold socially_optimal_threshold(const SystemParams& params, const CostPolynomial& cost) {
  return reconcile(welfare_threshold_routes(params, cost), "socially optimal threshold");
}

RevenueOptimum revenue_optimal_threshold(const SystemParams& params, const CostPolynomial& cost) {
  RevenueOptimum out;
  out.threshold = reconcile(revenue_threshold_routes(params, cost), "revenue optimal threshold");
  out.price = admission_price(params, cost, out.threshold);
  out.revenue = revenue(params, cost, out.threshold);
  return out;
}

ObservableAnalysis analyze_observable(const SystemParams& params, const CostPolynomial& cost) {
  ObservableAnalysis out;
  const SweepState state = sweep_routes(params, cost, &out.welfare_curve, &out.revenue_curve);
  out.n_e = static_cast<Threshold>(out.welfare_curve.size()) - 1;
  out.n_s = reconcile(state.welfare, "socially optimal threshold");
  out.n_m = reconcile(state.revenue, "revenue optimal threshold");
  out.price_o = admission_price(params, cost, out.n_m);
  return out;
}

}  // namespace lossq
