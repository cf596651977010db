#include "resonalens/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "resonalens/errors.hpp"
#include "resonalens/scaling.hpp"

namespace resonalens {

Complex HankelPolynomial::operator()(Complex z) const {
  Complex v = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) v = v * z + *it;
  return v;
}

Complex HankelPolynomial::derivative(Complex z) const {
  Complex v = 0.0;
  for (int k = static_cast<int>(coefficients.size()) - 1; k >= 1; --k) {
    v = v * z + static_cast<double>(k) * coefficients[k];
  }
  return v;
}

HankelPolynomial HankelPolynomial::conjugate() const {
  HankelPolynomial c = *this;
  for (auto& a : c.coefficients) a = std::conj(a);
  return c;
}

HankelPolynomial hankel_polynomial(int n) {
  if (n < 0 || n > kMaxHankelDegree) {
    throw ValidationError("hankel_polynomial: n must lie in [0, " +
                          std::to_string(kMaxHankelDegree) + "], got " + std::to_string(n));
  }
  std::vector<Complex> prev{1.0};
  if (n == 0) return {0, prev};
  std::vector<Complex> cur{kI, 1.0};
  for (int k = 1; k < n; ++k) {
    std::vector<Complex> next(k + 2, 0.0);
    for (std::size_t j = 0; j < cur.size(); ++j) next[j] += kI * static_cast<double>(2 * k + 1) * cur[j];
    for (std::size_t j = 0; j < prev.size(); ++j) next[j + 2] += prev[j];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return {n, cur};
}

Complex hankel1(int n, Complex z) {
  const auto p = hankel_polynomial(n);
  return std::pow(-kI, n + 1) * std::exp(kI * z) * p(z) / std::pow(z, n + 1);
}

Complex hankel2(int n, Complex z) {
  const auto p = hankel_polynomial(n).conjugate();
  return std::pow(kI, n + 1) * std::exp(-kI * z) * p(z) / std::pow(z, n + 1);
}

// The closed form cancels badly for x << n, so the real functions come from
// the standard library.
double spherical_j(int n, double x) {
  if (n < 0) throw ValidationError("spherical_j: n must be >= 0");
  return std::sph_bessel(static_cast<unsigned>(n), x);
}
double spherical_y(int n, double x) {
  if (n < 0) throw ValidationError("spherical_y: n must be >= 0");
  return std::sph_neumann(static_cast<unsigned>(n), x);
}

std::vector<Complex> hankel_resonances(int n, double r_b) {
  if (!(r_b > 0.0)) throw ValidationError("hankel_resonances: r_b must be > 0");
  const auto p = hankel_polynomial(n);
  std::vector<Complex> roots;
  if (n == 0) return roots;
  CMatrix companion = CMatrix::Zero(n, n);
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -p.coefficients[i];
  Eigen::ComplexEigenSolver<CMatrix> es(companion, false);
  for (int i = 0; i < n; ++i) {
    Complex z = es.eigenvalues()(i);
    for (int it = 0; it < 50; ++it) {
      const Complex step = p(z) / p.derivative(z);
      z -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    roots.push_back(z / r_b);
  }
  std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return roots;
}

std::vector<double> annulus_dirichlet_eigs(double r_b, double R, int n, int count) {
  if (!(r_b > 0.0) || !(R > r_b)) throw ValidationError("annulus_dirichlet_eigs: need R > r_b > 0");
  if (count < 1) throw ValidationError("annulus_dirichlet_eigs: count must be >= 1");
  if (n < 0) throw ValidationError("annulus_dirichlet_eigs: n must be >= 0");
  std::vector<double> out;
  const double spacing = kPi / (R - r_b);
  if (n == 0) {
    for (int m = 1; m <= count; ++m) out.push_back(m * spacing);
    return out;
  }
  auto f = [&](double k) {
    return spherical_j(n, k * r_b) * spherical_y(n, k * R) -
           spherical_j(n, k * R) * spherical_y(n, k * r_b);
  };
  const double dk = spacing / 32.0;
  double a = dk;
  double fa = f(a);
  while (static_cast<int>(out.size()) < count) {
    const double b = a + dk;
    const double fb = f(b);
    if (fa == 0.0) {
      out.push_back(a);
    } else if (fa * fb < 0.0) {
      double lo = a, hi = b, flo = fa;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (flo * fm <= 0.0) {
          hi = mid;
        } else {
          lo = mid;
          flo = fm;
        }
      }
      out.push_back(0.5 * (lo + hi));
    }
    a = b;
    fa = fb;
  }
  return out;
}

Complex truncated_resonance(const Profile& profile, int n, double r_b, double R, Complex start) {
  if (!(R > r_b)) throw ValidationError("truncated_resonance: need R > r_b");
  const auto p = hankel_polynomial(n);
  const auto pc = p.conjugate();
  const Complex ra = scaling_at(profile, r_b).r_tilde;
  const Complex rb = scaling_at(profile, R).r_tilde;
  // h1(a) h2(b) - h2(a) h1(b) with the common factors removed.
  auto g = [&](Complex w) {
    const Complex a = w * ra, b = w * rb;
    return p(a) * pc(b) - std::exp(2.0 * kI * (b - a)) * p(b) * pc(a);
  };
  Complex w0 = start, w1 = start * Complex(1.0 + 1e-7, 1e-7);
  Complex g0 = g(w0), g1 = g(w1);
  for (int it = 0; it < 200; ++it) {
    if (g1 == g0) break;
    const Complex w2 = w1 - g1 * (w1 - w0) / (g1 - g0);
    w0 = w1;
    g0 = g1;
    w1 = w2;
    g1 = g(w1);
    if (std::abs(w1 - w0) <= 1e-15 * std::abs(w1)) return w1;
  }
  if (std::abs(w1 - w0) <= 1e-12 * std::abs(w1)) return w1;
  throw SolverError("truncated_resonance: secant iteration did not converge");
}

}  // namespace resonalens
