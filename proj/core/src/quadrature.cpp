#include "resonalens/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace resonalens {

namespace {

// Legendre P_n and P_n' at x by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  QuadratureRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(n, x, p, dp);
    rule.points[n - 1 - i] = x;
    rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

QuadratureRule gauss_lobatto(int n) {
  if (n < 2) throw std::invalid_argument("gauss_lobatto: n must be >= 2");
  const int N = n - 1;
  QuadratureRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  // Newton on (1 - x^2) P_N'(x) seeded with Chebyshev-Gauss-Lobatto points.
  for (int i = 0; i < n; ++i) {
    double x = -std::cos(std::numbers::pi * i / N);
    if (i > 0 && i < N) {
      for (int it = 0; it < 100; ++it) {
        // P_N'' from the Legendre ODE: (1-x^2) P'' = 2x P' - N(N+1) P.
        double p = 0.0, dp = 0.0;
        legendre(N, x, p, dp);
        const double d2p = (2.0 * x * dp - N * (N + 1.0) * p) / (1.0 - x * x);
        const double dx = dp / d2p;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
    }
    double p = 0.0, dp = 0.0;
    if (i == 0 || i == N) {
      p = (i == 0 && N % 2 == 1) ? -1.0 : 1.0;
    } else {
      legendre(N, x, p, dp);
    }
    rule.points[i] = x;
    rule.weights[i] = 2.0 / (N * (N + 1.0) * p * p);
  }
  return rule;
}

LagrangeBasis::LagrangeBasis(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  const int n = size();
  inv_denominators_.assign(n, 1.0);
  for (int i = 0; i < n; ++i) {
    double den = 1.0;
    for (int j = 0; j < n; ++j) {
      if (j != i) den *= nodes_[i] - nodes_[j];
    }
    inv_denominators_[i] = 1.0 / den;
  }
}

void LagrangeBasis::values(double x, std::vector<double>& out) const {
  const int n = size();
  out.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double v = inv_denominators_[i];
    for (int j = 0; j < n; ++j) {
      if (j != i) v *= x - nodes_[j];
    }
    out[i] = v;
  }
}

void LagrangeBasis::derivatives(double x, std::vector<double>& out) const {
  const int n = size();
  out.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k == i) continue;
      double prod = 1.0;
      for (int j = 0; j < n; ++j) {
        if (j != i && j != k) prod *= x - nodes_[j];
      }
      sum += prod;
    }
    out[i] = sum * inv_denominators_[i];
  }
}

}  // namespace resonalens
