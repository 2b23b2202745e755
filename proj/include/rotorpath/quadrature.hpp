#ifndef ROTORPATH_QUADRATURE_HPP
#define ROTORPATH_QUADRATURE_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "rotorpath/constants.hpp"
#include "rotorpath/error.hpp"

namespace rotorpath {

/// Gauss-Legendre nodes and weights on an interval.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t order() const noexcept { return nodes.size(); }

  template <class F>
  auto integrate(F&& f) const {
    decltype(f(0.0)) sum{};
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

/// n-point Gauss-Legendre rule on [-1, 1], exact for polynomials of degree 2n - 1.
/// Roots found by Newton iteration on P_n from the Tricomi initial guess.
inline QuadratureRule gauss_legendre(std::size_t n) {
  if (n == 0) throw ContractViolation("gauss_legendre: order must be positive");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-15) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0;
    double p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double kk = static_cast<double>(k);
      const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
      p0 = p1;
      p1 = p2;
    }
    dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

/// Maps a rule on [-1, 1] onto [a, b].
inline QuadratureRule mapped(const QuadratureRule& reference, double a, double b) {
  QuadratureRule out;
  out.nodes.resize(reference.order());
  out.weights.resize(reference.order());
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < reference.order(); ++i) {
    out.nodes[i] = mid + half * reference.nodes[i];
    out.weights[i] = half * reference.weights[i];
  }
  return out;
}

}  // namespace rotorpath

#endif
