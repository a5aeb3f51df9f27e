#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "lossq/params.hpp"

// Scalar-generic Erlang recursions. erlang.cpp instantiates them for double;
// property tests instantiate them with a wide multiprecision type to resolve
// differences far below double precision.

namespace lossq::kernel {

/// B(k) = rho B(k-1) / (k + rho B(k-1)), B(0) = 1.
template <class Real>
Real erlang_b(const Real& rho, Threshold n) {
  Real b = 1;
  for (Threshold k = 1; k <= n; ++k) b = rho * b / (Real(k) + rho * b);
  return b;
}

/// E(L_n) = rho (1 - B_n), written as rho n / (n + rho B_{n-1}).
template <class Real>
Real expected_occupancy(const Real& rho, Threshold n) {
  if (n == 0) return Real(0);
  const Real b_prev = erlang_b(rho, n - 1);
  return rho * Real(n) / (Real(n) + rho * b_prev);
}

/// E(L_0) .. E(L_n) in one pass.
template <class Real>
std::vector<Real> expected_occupancy_table(const Real& rho, Threshold n) {
  std::vector<Real> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  out.emplace_back(0);
  Real b = 1;  // B_{k-1}
  for (Threshold k = 1; k <= n; ++k) {
    out.push_back(rho * Real(k) / (Real(k) + rho * b));
    b = rho * b / (Real(k) + rho * b);
  }
  return out;
}

/// Unnormalized weights anchored at the mode (largest weight = 1).
template <class Real>
std::vector<Real> mode_anchored_weights(const Real& rho, Threshold n) {
  using std::floor;
  std::vector<Real> w(static_cast<std::size_t>(n) + 1, Real(0));
  const Real fl = floor(rho);
  const Threshold mode = fl >= Real(n) ? n : static_cast<Threshold>(fl);
  w[static_cast<std::size_t>(mode)] = 1;
  for (Threshold m = mode; m > 0; --m) {
    w[static_cast<std::size_t>(m - 1)] = w[static_cast<std::size_t>(m)] * Real(m) / rho;
  }
  for (Threshold m = mode; m < n; ++m) {
    w[static_cast<std::size_t>(m + 1)] = w[static_cast<std::size_t>(m)] * rho / Real(m + 1);
  }
  return w;
}

}  // namespace lossq::kernel
