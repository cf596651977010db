#pragma once

#include <vector>

namespace resonalens {

/// Quadrature rule on the reference interval [-1, 1].
struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule, exact for polynomials of degree 2n-1.
QuadratureRule gauss_legendre(int n);

/// n-point Gauss-Lobatto-Legendre rule (n >= 2), endpoints included.
QuadratureRule gauss_lobatto(int n);

/// Lagrange polynomials through a fixed node set on [-1, 1].
class LagrangeBasis {
 public:
  explicit LagrangeBasis(std::vector<double> nodes);

  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }

  void values(double x, std::vector<double>& out) const;
  void derivatives(double x, std::vector<double>& out) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> inv_denominators_;
};

}  // namespace resonalens
