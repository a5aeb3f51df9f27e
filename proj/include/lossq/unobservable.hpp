#pragma once

#include "lossq/params.hpp"

// Unobservable regime: arrivals join with probability q, see only the
// expected occupancy rho q and pay the continuous cost of it. Welfare and
// revenue coincide here, so a single S(q) serves both.

namespace lossq {

/// S(q) = q Lambda (R - cost(rho q)); domain error for q outside [0, 1].
double revenue_unobservable(const SystemParams& params, const CostPolynomial& cost, double q);

/// Symmetric equilibrium joining probability q_e.
double equilibrium_join_prob(const SystemParams& params, const CostPolynomial& cost);

struct UnobservableOptimum {
  double join_prob = 0.0;  // q~
  double price = 0.0;      // P~_u = R - cost(rho q~)
  double revenue = 0.0;    // S(q~)
};

/// Revenue-maximizing joining probability and the entrance price inducing it.
UnobservableOptimum optimal_join_prob(const SystemParams& params, const CostPolynomial& cost);

/// Degree-independent solvers (bisection). The dispatching functions above
/// use the closed forms for effective degree <= 2 and these otherwise.
double equilibrium_join_prob_numeric(const SystemParams& params, const CostPolynomial& cost);
UnobservableOptimum optimal_join_prob_numeric(const SystemParams& params, const CostPolynomial& cost);

/// Closed forms for C_1 x + C_2 x^2. Both accept C_2 = 0, where they reduce
/// to the linear limits q_e = R / (C_1 rho), q~ = R / (2 C_1 rho),
/// P~_u = R / 2 and S(q~) = mu R^2 / (4 C_1).
double equilibrium_join_prob_quadratic(const SystemParams& params, double c1, double c2);
UnobservableOptimum optimal_join_prob_quadratic(const SystemParams& params, double c1, double c2);

struct UnobservableAnalysis {
  SystemParams params;
  CostPolynomial cost;
  double q_e = 0.0;
  double q_opt = 0.0;
  double price_u = 0.0;
  double revenue_opt = 0.0;

  double revenue_at(double q) const { return revenue_unobservable(params, cost, q); }
};

UnobservableAnalysis analyze_unobservable(const SystemParams& params, const CostPolynomial& cost);

}  // namespace lossq
