#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Core>

namespace resonalens {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Principal argument in [-pi, pi).
inline double arg_half_open(Complex z) {
  double a = std::arg(z);
  if (a >= kPi) a -= 2.0 * kPi;
  return a;
}

}  // namespace resonalens
