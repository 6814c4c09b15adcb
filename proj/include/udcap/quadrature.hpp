#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include "udcap/types.hpp"

namespace udcap {

template <typename Real>
struct QuadratureRule {
  Vector<Real> nodes;
  Vector<Real> weights;
};

/// n-point Gauss-Chebyshev rule of the second kind:
///   int_{-1}^{1} sqrt(1 - t^2) g(t) dt ~= sum_i w_i g(t_i),
/// with t_i = cos(i pi / (n+1)) and w_i = pi/(n+1) sin^2(i pi / (n+1)).
/// Rules with n + 1 = 2^k are nested, so doubling reuses every node.
template <typename Real>
QuadratureRule<Real> gauss_chebyshev_u(Index n) {
  QuadratureRule<Real> rule{Vector<Real>(n), Vector<Real>(n)};
  const Real h = std::numbers::pi_v<Real> / static_cast<Real>(n + 1);
  for (Index i = 0; i < n; ++i) {
    const Real theta = h * static_cast<Real>(i + 1);
    const Real s = std::sin(theta);
    rule.nodes(i) = std::cos(theta);
    rule.weights(i) = h * s * s;
  }
  return rule;
}

/// n-point Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
template <typename Real>
QuadratureRule<Real> gauss_legendre(Index n) {
  QuadratureRule<Real> rule{Vector<Real>(n), Vector<Real>(n)};
  const Index half = (n + 1) / 2;
  for (Index i = 0; i < half; ++i) {
    Real z = std::cos(std::numbers::pi_v<Real> * (static_cast<Real>(i) + Real(0.75)) /
                      (static_cast<Real>(n) + Real(0.5)));
    Real dp = 0;
    for (int it = 0; it < 100; ++it) {
      Real p1 = 1, p2 = 0;
      for (Index j = 1; j <= n; ++j) {
        const Real p3 = p2;
        p2 = p1;
        p1 = ((2 * static_cast<Real>(j) - 1) * z * p2 - (static_cast<Real>(j) - 1) * p3) /
             static_cast<Real>(j);
      }
      dp = static_cast<Real>(n) * (z * p1 - p2) / (z * z - 1);
      const Real dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 4 * std::numeric_limits<Real>::epsilon())
        break;
    }
    rule.nodes(i) = -z;
    rule.nodes(n - 1 - i) = z;
    rule.weights(i) = 2 / ((1 - z * z) * dp * dp);
    rule.weights(n - 1 - i) = rule.weights(i);
  }
  return rule;
}

} // namespace udcap
