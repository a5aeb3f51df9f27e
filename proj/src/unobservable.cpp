#include "lossq/unobservable.hpp"

#include <cmath>
#include <stdexcept>

namespace lossq {

namespace {

// Root of a strictly decreasing f on [0, 1] with f(0) > 0 >= f(1), bisected
// until the bracket stops shrinking.
template <class F>
double bisect_decreasing(F f) {
  double lo = 0.0;
  double hi = 1.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

bool is_quadratic(const CostPolynomial& cost) { return cost.effective_degree() <= 2; }

}  // namespace

double revenue_unobservable(const SystemParams& params, const CostPolynomial& cost, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("joining probability must lie in [0, 1]");
  if (q == 0.0) return 0.0;
  return q * params.lambda() * (params.reward() - cost(params.rho() * q));
}

double equilibrium_join_prob_numeric(const SystemParams& params, const CostPolynomial& cost) {
  const double rho = params.rho();
  const double reward = params.reward();
  if (reward >= cost(rho)) return 1.0;
  return bisect_decreasing([&](double q) { return reward - cost(rho * q); });
}

UnobservableOptimum optimal_join_prob_numeric(const SystemParams& params, const CostPolynomial& cost) {
  const double rho = params.rho();
  const double reward = params.reward();
  UnobservableOptimum out;
  // dS/dq is proportional to R - sum_i (i + 1) C_i (rho q)^i, decreasing in q.
  if (reward >= cost.marginal_total(rho)) {
    out.join_prob = 1.0;
  } else {
    out.join_prob = bisect_decreasing([&](double q) { return reward - cost.marginal_total(rho * q); });
  }
  out.price = reward - cost(rho * out.join_prob);
  out.revenue = revenue_unobservable(params, cost, out.join_prob);
  return out;
}

double equilibrium_join_prob_quadratic(const SystemParams& params, double c1, double c2) {
  const double rho = params.rho();
  const double reward = params.reward();
  if (reward - (c1 * rho + c2 * rho * rho) >= 0.0) return 1.0;
  if (c2 == 0.0) return reward / (c1 * rho);
  // (-C_1 + sqrt(C_1^2 + 4 R C_2)) / (2 C_2 rho), rationalized.
  return 2.0 * reward / (rho * (c1 + std::sqrt(c1 * c1 + 4.0 * reward * c2)));
}

UnobservableOptimum optimal_join_prob_quadratic(const SystemParams& params, double c1, double c2) {
  const double rho = params.rho();
  const double mu = params.mu();
  const double reward = params.reward();
  UnobservableOptimum out;
  if (reward >= 2.0 * rho * c1 + 3.0 * rho * rho * c2) {
    out.join_prob = 1.0;
    out.price = reward - c1 * rho - c2 * rho * rho;
    out.revenue = mu * (reward * rho - c1 * rho * rho - c2 * rho * rho * rho);
    return out;
  }
  if (c2 == 0.0) {
    out.join_prob = reward / (2.0 * c1 * rho);
    out.price = reward / 2.0;
    out.revenue = mu * reward * reward / (4.0 * c1);
    return out;
  }
  // With s = sqrt(C_1^2 + 3 R C_2): rho q~ = R / (C_1 + s) and
  // P~_u = R (C_1 + 2 s) / (3 (C_1 + s)), which are the textbook
  // expressions multiplied through by (s - C_1) / (s - C_1).
  const double s = std::sqrt(c1 * c1 + 3.0 * reward * c2);
  const double occupancy = reward / (c1 + s);
  out.join_prob = occupancy / rho;
  out.price = reward * (c1 + 2.0 * s) / (3.0 * (c1 + s));
  out.revenue = mu * occupancy * out.price;
  return out;
}

double equilibrium_join_prob(const SystemParams& params, const CostPolynomial& cost) {
  if (is_quadratic(cost)) return equilibrium_join_prob_quadratic(params, cost.coeff(1), cost.coeff(2));
  return equilibrium_join_prob_numeric(params, cost);
}

UnobservableOptimum optimal_join_prob(const SystemParams& params, const CostPolynomial& cost) {
  if (is_quadratic(cost)) return optimal_join_prob_quadratic(params, cost.coeff(1), cost.coeff(2));
  return optimal_join_prob_numeric(params, cost);
}

UnobservableAnalysis analyze_unobservable(const SystemParams& params, const CostPolynomial& cost) {
  const UnobservableOptimum opt = optimal_join_prob(params, cost);
  return UnobservableAnalysis{params, cost, equilibrium_join_prob(params, cost), opt.join_prob,
                              opt.price, opt.revenue};
}

}  // namespace lossq
