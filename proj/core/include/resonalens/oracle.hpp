#pragma once

#include <vector>

#include "resonalens/profiles.hpp"
#include "resonalens/types.hpp"

namespace resonalens {

/// Polynomial factor of the outgoing spherical Hankel function:
/// h1_n(z) = (-i)^{n+1} e^{iz} p_n(z) / z^{n+1}.
struct HankelPolynomial {
  int n = 0;
  /// coefficients[k] multiplies z^k; the leading one is 1.
  std::vector<Complex> coefficients;

  Complex operator()(Complex z) const;
  Complex derivative(Complex z) const;
  /// The polynomial with conjugated coefficients, which enters h2_n.
  HankelPolynomial conjugate() const;
};

inline constexpr int kMaxHankelDegree = 25;

/// Upward recurrence p_{n+1} = i(2n+1) p_n + z^2 p_{n-1}. 0 <= n <= 25.
HankelPolynomial hankel_polynomial(int n);

/// h1_n(z) and h2_n(z) through the polynomial factor.
Complex hankel1(int n, Complex z);
Complex hankel2(int n, Complex z);
/// Real spherical Bessel functions j_n and y_n (n >= 0).
double spherical_j(int n, double x);
double spherical_y(int n, double x);

/// Resonances of the sound-soft ball of radius r_b in mode n: roots of p_n
/// divided by r_b, sorted by real part. Empty for n = 0.
std::vector<Complex> hankel_resonances(int n, double r_b);

/// The first `count` positive Dirichlet eigenfrequencies of the annulus
/// r_b < r < R in mode n.
std::vector<double> annulus_dirichlet_eigs(double r_b, double R, int n, int count);

/// Resonance of the Dirichlet-truncated scaled problem on [r_b, R] closest
/// to `start` (typically the free resonance). The scaled solutions are
/// Hankel functions of omega * r_tilde, so the discrete problem converges to
/// this value as the mesh is refined at fixed R.
Complex truncated_resonance(const Profile& profile, int n, double r_b, double R, Complex start);

}  // namespace resonalens
