#include "lossq/params.hpp"

#include <cmath>
#include <string>

namespace lossq {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::domain_error(std::string(name) + " must be positive and finite");
  }
}

}  // namespace

SystemParams SystemParams::from_rates(double lambda, double mu, double reward) {
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  require_positive(reward, "reward");
  return SystemParams(lambda, mu, lambda / mu, reward);
}

SystemParams SystemParams::from_load(double rho, double mu, double reward) {
  require_positive(rho, "rho");
  require_positive(mu, "mu");
  require_positive(reward, "reward");
  return SystemParams(rho * mu, mu, rho, reward);
}

CostPolynomial::CostPolynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw std::invalid_argument("cost polynomial needs at least one coefficient");
  bool any_positive = false;
  for (double c : coeffs_) {
    if (!std::isfinite(c) || c < 0.0) {
      throw std::domain_error("cost coefficients must be finite and nonnegative");
    }
    any_positive = any_positive || c > 0.0;
  }
  if (!any_positive) throw std::domain_error("at least one cost coefficient must be positive");
}

double CostPolynomial::coeff(int i) const {
  if (i < 1) throw std::out_of_range("cost coefficients are indexed from 1");
  return i <= degree() ? coeffs_[static_cast<std::size_t>(i - 1)] : 0.0;
}

int CostPolynomial::effective_degree() const noexcept {
  int d = degree();
  while (d > 1 && coeffs_[static_cast<std::size_t>(d - 1)] == 0.0) --d;
  return d;
}

double CostPolynomial::operator()(double x) const noexcept {
  // Horner without a constant term.
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = (acc + *it) * x;
  return acc;
}

double CostPolynomial::marginal_total(double x) const noexcept {
  double acc = 0.0;
  for (int i = degree(); i >= 1; --i) {
    acc = acc * x + (i + 1) * coeffs_[static_cast<std::size_t>(i - 1)];
  }
  return acc * x;
}

CostPolynomial CostPolynomial::scaled(double factor) const {
  if (!(factor > 0.0)) throw std::domain_error("scale factor must be positive");
  std::vector<double> out = coeffs_;
  for (double& c : out) c *= factor;
  return CostPolynomial(std::move(out));
}

}  // namespace lossq
