#include <cmath>

#include "doctest.h"
#include "lossq/params.hpp"

using namespace lossq;

TEST_CASE("system params") {
  const auto p = SystemParams::from_rates(20.0, 1.0 / 60.0, 400.0);
  CHECK(p.rho() == 20.0 / (1.0 / 60.0));
  CHECK(std::abs(p.rho() - 1200.0) <= 1e-12 * 1200.0);
  const auto q = SystemParams::from_load(1200.0, 1.0 / 60.0, 400.0);
  CHECK(std::abs(q.lambda() / q.mu() - q.rho()) <= 1e-15 * q.rho());
  CHECK_THROWS_AS(SystemParams::from_rates(0.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(SystemParams::from_rates(1.0, -1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(SystemParams::from_load(1.0, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(SystemParams::from_load(NAN, 1.0, 1.0), std::domain_error);
}

TEST_CASE("cost polynomial") {
  const CostPolynomial c({1.0, 0.5, 0.0, 2.0});
  CHECK(c.degree() == 4);
  CHECK(c.effective_degree() == 4);
  CHECK(c(0.0) == 0.0);
  CHECK(c(2.0) == 2.0 + 2.0 + 32.0);
  CHECK(c.coeff(3) == 0.0);
  CHECK(c.coeff(9) == 0.0);
  CHECK_THROWS_AS(c.coeff(0), std::out_of_range);
  // sum (i + 1) C_i x^i at x = 2: 2*2 + 3*0.5*4 + 5*2*16.
  CHECK(c.marginal_total(2.0) == 4.0 + 6.0 + 160.0);
  CHECK(CostPolynomial({0.0, 3.0, 0.0}).effective_degree() == 2);
  CHECK(c.scaled(2.0)(1.0) == 2.0 * c(1.0));

  CHECK_THROWS_AS(CostPolynomial({}), std::invalid_argument);
  CHECK_THROWS_AS(CostPolynomial({0.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(CostPolynomial({1.0, -0.1}), std::domain_error);
  CHECK_THROWS_AS(CostPolynomial({INFINITY}), std::domain_error);
}
