#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace lossq {

/// Admission threshold: a customer joins iff the observed count is below it.
using Threshold = std::int64_t;

/// Raised when two independent computations of the same quantity disagree.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Arrival rate, service rate and service reward of the infinite-server
/// system. The offered load rho = lambda / mu is fixed at construction.
class SystemParams {
 public:
  static SystemParams from_rates(double lambda, double mu, double reward);
  static SystemParams from_load(double rho, double mu, double reward);

  double lambda() const noexcept { return lambda_; }
  double mu() const noexcept { return mu_; }
  double rho() const noexcept { return rho_; }
  double reward() const noexcept { return reward_; }

 private:
  SystemParams(double lambda, double mu, double rho, double reward)
      : lambda_(lambda), mu_(mu), rho_(rho), reward_(reward) {}

  double lambda_;
  double mu_;
  double rho_;
  double reward_;
};

/// Congestion cost C_1 x + C_2 x^2 + ... + C_d x^d with nonnegative
/// coefficients, at least one of them positive. The same polynomial prices
/// an observed integer count and an expected (real) occupancy.
class CostPolynomial {
 public:
  /// coeffs[0] is C_1. Trailing zeros are kept, so degree() reports the
  /// length the caller supplied.
  explicit CostPolynomial(std::vector<double> coeffs);

  static CostPolynomial linear(double c1) { return CostPolynomial({c1}); }
  static CostPolynomial quadratic(double c1, double c2) { return CostPolynomial({c1, c2}); }

  int degree() const noexcept { return static_cast<int>(coeffs_.size()); }

  /// C_i for 1 <= i <= degree(); zero above the degree.
  double coeff(int i) const;
  std::span<const double> coeffs() const noexcept { return coeffs_; }

  /// Highest index with a nonzero coefficient.
  int effective_degree() const noexcept;

  double operator()(double x) const noexcept;

  /// d/dx [x * cost(x)] = sum_i (i + 1) C_i x^i.
  double marginal_total(double x) const noexcept;

  /// Same polynomial with every coefficient multiplied by factor > 0.
  CostPolynomial scaled(double factor) const;

 private:
  std::vector<double> coeffs_;
};

}  // namespace lossq
