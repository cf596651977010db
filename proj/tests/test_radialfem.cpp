#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <doctest.h>

#include "resonalens/errors.hpp"
#include "resonalens/quadrature.hpp"
#include "resonalens/radialfem.hpp"
#include "resonalens/spectra.hpp"

using namespace resonalens;

namespace {

Profile affine(double a0) { return make_profile({ProfileKind::Affine, a0, 1, 1.0}); }
Profile power(double a0, int m) { return make_profile({ProfileKind::Power, a0, m, 1.0}); }
Profile smooth(double a0) { return make_profile({ProfileKind::SmoothChi2, a0, 1, 1.0}); }
Profile unscaled() {
  ProfileSpec s{ProfileKind::Unscaled, 1.0, 1, 1.0};
  s.allow_unscaled = true;
  return make_profile(s);
}

RadialMesh aligned(const Profile& p, double R, int elements, int degree) {
  const auto k = coefficient_kinks(p);
  return build_mesh(1.0, R, elements, degree, std::nullopt, k);
}

double rel_asym(const CMatrix& A) { return (A - A.transpose()).norm() / A.norm(); }

double xnorm(const ModeMatrices& mm, const CVector& c) {
  return std::sqrt(std::abs(c.dot(mm.G * c)));
}

CVector random_vector(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
  return v;
}

}  // namespace

TEST_CASE("quadrature rules") {
  for (int n = 1; n <= 8; ++n) {
    const auto q = gauss_legendre(n);
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += q.weights[i] * std::pow(q.points[i], deg);
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
    }
  }
  const auto l = gauss_lobatto(4);
  CHECK(l.points.front() == -1.0);
  CHECK(l.points.back() == 1.0);
  CHECK(l.points[1] == doctest::Approx(-1.0 / std::sqrt(5.0)).epsilon(1e-14));
}

TEST_CASE("Lagrange interpolation reproduces polynomials up to the degree") {
  for (int p = 1; p <= 5; ++p) {
    const LagrangeBasis basis(gauss_lobatto(p + 1).points);
    std::vector<double> phi;
    for (double x : {-0.93, -0.2, 0.41, 0.88}) {
      basis.values(x, phi);
      double s = 0.0;
      for (int k = 0; k <= p; ++k) s += std::pow(basis.nodes()[k], p) * phi[k];
      CHECK(s == doctest::Approx(std::pow(x, p)).epsilon(1e-13).scale(1.0));
    }
  }
}

TEST_CASE("build_mesh") {
  auto m = build_mesh(1.0, 2.0, 2, 1);
  CHECK(m.breakpoints == std::vector<double>{1.0, 1.5, 2.0});
  CHECK(m.dofs() == 1);

  const std::vector<double> at_rb{1.0};
  m = build_mesh(1.0, 4.0, 6, 2, std::nullopt, at_rb);
  CHECK(m.elements() == 6);

  const std::vector<double> inside{1.2};
  m = build_mesh(1.0, 2.0, 4, 2, ExactMapSpec{MapKind::Log, -0.5, 2.0}, inside);
  CHECK(m.has_breakpoint(1.2));
  CHECK(m.elements() == 5);
  CHECK(m.last_quad_order == 2 * 2 + 6);

  const std::vector<double> outside{2.5};
  CHECK_THROWS_AS(build_mesh(1.0, 2.0, 4, 2, std::nullopt, outside), ValidationError);
  CHECK_THROWS_AS(build_mesh(1.0, 3.0, 4, 2, ExactMapSpec{MapKind::Log, -0.5, 2.0}), ValidationError);
}

TEST_CASE("P1 unscaled matrices on [1,2]") {
  const auto mm = assemble_mode(build_mesh(1.0, 2.0, 2, 1), unscaled(), 0);
  REQUIRE(mm.S.rows() == 1);
  CHECK(mm.S(0, 0).real() == doctest::Approx(28.0 / 3.0).epsilon(1e-14));
  CHECK(mm.M(0, 0).real() == doctest::Approx(91.0 / 120.0).epsilon(1e-14));
  CHECK(mm.S(0, 0).imag() == 0.0);
}

TEST_CASE("angular identity S(n) = S(0) + n(n+1) D") {
  for (const auto& p : {affine(3.0), power(1.0, 2), smooth(3.0)}) {
    const auto mesh = aligned(p, 4.0, 12, 3);
    const auto m0 = assemble_mode(mesh, p, 0);
    const auto m5 = assemble_mode(mesh, p, 5);
    CHECK((m5.S - m0.S - 30.0 * m0.D).norm() <= 1e-13 * m5.S.norm());
    CHECK((m5.D - m0.D).norm() == 0.0);
  }
}

TEST_CASE("complex symmetry and Gram positivity") {
  for (const auto& p : {affine(1.0), affine(3.0), power(1.0, 2), smooth(3.0)}) {
    for (int n : {0, 2}) {
      const auto mm = assemble_mode(aligned(p, 4.0, 10, 3), p, n);
      CHECK(rel_asym(mm.S) <= 1e-12);
      CHECK(rel_asym(mm.M) <= 1e-12);
      CHECK((mm.G - mm.G.adjoint()).norm() <= 1e-12 * mm.G.norm());
      Eigen::LLT<CMatrix> llt(mm.G);
      CHECK(llt.info() == Eigen::Success);
      Eigen::SelfAdjointEigenSolver<CMatrix> es(mm.G);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
  }
  const auto u = assemble_mode(build_mesh(1.0, 2.0, 8, 3), unscaled(), 1);
  CHECK(u.S.imag().norm() == 0.0);
  CHECK(u.M.imag().norm() == 0.0);
}

TEST_CASE("mass matrix absorbs beyond r1*") {
  const auto p = affine(1.0);
  const auto mm = assemble_mode(aligned(p, 3.0, 16, 1), p, 0);
  for (int i = 0; i < mm.M.rows(); ++i) {
    for (int j = std::max(0, i - 1); j <= std::min<int>(mm.M.rows() - 1, i + 1); ++j) {
      CHECK(mm.M(i, j).imag() > 0.0);
    }
  }
}

TEST_CASE("misaligned kinks are rejected") {
  const auto p = make_profile({ProfileKind::Affine, 1.0, 1, 1.3});
  CHECK_THROWS_AS(assemble_mode(build_mesh(1.0, 3.0, 4, 2), p, 0), ValidationError);
  CHECK_NOTHROW(assemble_mode(aligned(p, 3.0, 4, 2), p, 0));
}

TEST_CASE("doubling the quadrature order leaves the matrices unchanged") {
  for (const auto& p : {affine(3.0), power(1.0, 2), power(0.5, 3)}) {
    const auto mesh = aligned(p, 4.0, 24, 3);
    auto mesh2 = mesh;
    mesh2.quad_order *= 2;
    mesh2.last_quad_order *= 2;
    const auto a = assemble_mode(mesh, p, 2);
    const auto b = assemble_mode(mesh2, p, 2);
    CAPTURE(to_string(p.kind()));
    CHECK((a.S - b.S).cwiseAbs().maxCoeff() <= 1e-10 * a.S.cwiseAbs().maxCoeff());
    CHECK((a.M - b.M).cwiseAbs().maxCoeff() <= 1e-10 * a.M.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("smooth transition zone quadrature error is small and shrinks with h") {
  const auto p = smooth(3.0);
  double prev = INFINITY;
  for (int e : {24, 48}) {
    const auto mesh = aligned(p, 4.0, e, 3);
    auto mesh2 = mesh;
    mesh2.quad_order *= 2;
    mesh2.last_quad_order *= 2;
    const auto a = assemble_mode(mesh, p, 2);
    const auto b = assemble_mode(mesh2, p, 2);
    const double d = (a.S - b.S).cwiseAbs().maxCoeff() / a.S.cwiseAbs().maxCoeff();
    CHECK(d <= 1e-6);
    CHECK(d < 0.01 * prev);
    prev = d;
  }
}

TEST_CASE("unscaled Ritz value converges to pi^2 at rate h^(2p)") {
  for (int p : {1, 2}) {
    std::vector<std::pair<double, double>> pts;
    for (int e : {4, 8, 16, 32}) {
      const auto mm = assemble_mode(build_mesh(1.0, 2.0, e, p), unscaled(), 0);
      double lmin = INFINITY;
      for (const auto& ep : solve_gevp(mm.S, mm.M)) lmin = std::min(lmin, ep.lambda.real());
      pts.emplace_back(1.0 / e, lmin - kPi * kPi);
    }
    for (const auto& [h, err] : pts) CHECK(err > 0.0);
    const auto fit = fit_rate(pts, RateModel::Algebraic);
    CAPTURE(p);
    CHECK(fit.slope == doctest::Approx(2.0 * p).epsilon(0.1));
  }
}

TEST_CASE("exact variant mass weight stays integrable") {
  const auto p = affine(3.0);
  const ExactMapSpec map{MapKind::Log, -0.5, 2.0};
  double first = 0.0;
  for (int e : {4, 8, 16, 32}) {
    const auto mesh = build_mesh(1.0, 2.0, e, 3, map, coefficient_kinks(p, map));
    const auto mm = assemble_mode(mesh, p, 2);
    CHECK(mm.M.allFinite());
    CHECK(mm.S.allFinite());
    const double last = std::abs(mm.M(mm.M.rows() - 1, mm.M.rows() - 1));
    if (e == 4) first = last;
    CHECK(last <= 10.0 * first);
  }
}

TEST_CASE("a1 weights") {
  const auto p = affine(1.0);
  const Complex omega{1.0, 0.0};
  auto w = a1_weights(p, std::nullopt, 0.8, Branch::Lower, omega);
  CHECK(std::abs(w.radial - Complex(1.0, -1.0) / std::sqrt(2.0) * 0.64) <= 1e-14);

  // far out d_tilde -> d, so the lower radial weight tends to |d| r^2
  const double r = 1e5;
  w = a1_weights(p, std::nullopt, r, Branch::Lower, omega);
  const Complex ratio = w.radial / (std::abs(Complex(1.0, 1.0)) * r * r);
  CHECK(std::abs(ratio - 1.0) <= 2e-5);

  const auto mesh = aligned(p, 3.0, 8, 2);
  const CMatrix a0 = assemble_a1(mesh, p, 0, Branch::Lower, omega);
  const CMatrix weird = assemble_weighted(mesh, 0, [&](double s) {
    auto v = a1_weights(p, std::nullopt, s, Branch::Lower, omega);
    v.angular = Complex(1e6, -1e6);
    return v;
  });
  CHECK((a0 - weird).norm() <= 1e-14 * a0.norm());
  CHECK_THROWS_AS(assemble_a1(mesh, unscaled(), 0, Branch::Lower, omega), DomainError);
}

TEST_CASE("evaluate and interpolate round trip") {
  const auto mesh = build_mesh(1.0, 3.0, 7, 3);
  auto f = [](double r) { return Complex(std::sin(kPi * (r - 1.0) / 2.0), (r - 1.0) * (3.0 - r)); };
  const CVector c = interpolate(mesh, f);
  for (int g = 1; g + 1 < mesh.nodes(); ++g) {
    CHECK(std::abs(evaluate(mesh, c, mesh.node(g)) - f(mesh.node(g))) <= 1e-14);
  }
  CHECK(std::abs(evaluate(mesh, c, 2.123) - f(2.123)) <= 1e-3);
}

TEST_CASE("tail_xnorm") {
  const auto p = affine(3.0);
  const auto mesh = aligned(p, 5.0, 32, 3);
  const auto mm = assemble_mode(mesh, p, 2);
  const CVector v = random_vector(mesh.dofs(), 3);

  CHECK(tail_xnorm(mm, v, 1.0) == doctest::Approx(xnorm(mm, v)).epsilon(1e-12));

  for (double rho : {2.0, 3.25}) {
    CVector c = v;
    for (int g = 1; g + 1 < mesh.nodes(); ++g) {
      if (mesh.node(g) >= rho - 1e-12) c(g - 1) = 0.0;
    }
    CHECK(tail_xnorm(mm, c, rho) == 0.0);
    CHECK(tail_xnorm(mm, c, rho + 0.06) == 0.0);
  }

  ResonanceOptions opt;
  opt.window = {0.75, 0.95, -1.6, -1.4};
  const auto res = resonances(mm, opt);
  REQUIRE(res.entries.size() == 1);
  const CVector& u = res.entries[0].eigvec;
  double prev = INFINITY;
  for (double rho = 1.0; rho < 4.9; rho += 0.3) {
    const double t = tail_xnorm(mm, u, rho);
    CHECK(t < prev);
    prev = t;
  }
  CHECK_THROWS_AS(tail_xnorm(mm, u, 0.5), DomainError);
  CHECK_THROWS_AS(tail_xnorm(mm, u, 5.5), DomainError);
}

TEST_CASE("best_approximation_error") {
  const auto p = affine(3.0);
  const auto fine = aligned(p, 5.0, 32, 3);
  const auto coarse = aligned(p, 3.0, 16, 3);
  const auto mm = assemble_mode(fine, p, 2);

  const CVector u = random_vector(fine.dofs(), 5);
  CHECK(best_approximation_error(mm, u, fine) <= 1e-12 * xnorm(mm, u));

  const CVector cc = random_vector(coarse.dofs(), 9);
  const CVector ext = interpolate(fine, [&](double r) {
    return r < 3.0 ? evaluate(coarse, cc, r) : Complex(0.0);
  });
  CHECK(best_approximation_error(mm, ext, coarse) <= 1e-12 * xnorm(mm, ext));

  const auto skew = build_mesh(1.0, 3.0, 5, 3);
  CHECK_THROWS_AS(best_approximation_error(mm, u, skew), ValidationError);
  const auto longer = aligned(p, 6.0, 40, 3);
  CHECK_THROWS_AS(best_approximation_error(mm, u, longer), ValidationError);

  // the cutoff chi2(1 + r_n - r) u with r_n = R_c - 1 lies in the coarse space
  // and is within a constant of the tail beyond r_n
  ResonanceOptions opt;
  opt.window = {0.75, 0.95, -1.6, -1.4};
  const auto res = resonances(mm, opt);
  REQUIRE(res.entries.size() == 1);
  const CVector& mode = res.entries[0].eigvec;
  const double Rc = 3.0;
  const CVector cut = interpolate(fine, [&](double r) { return chi2(Rc - r) * evaluate(fine, mode, r); });
  const double witness = xnorm(mm, mode - cut);
  const double best = best_approximation_error(mm, mode, coarse);
  const double tail = tail_xnorm(mm, mode, Rc - 1.0);
  CHECK(best <= witness * (1.0 + 1e-12));
  CHECK(witness <= 10.0 * tail);
}

TEST_CASE("write_triplets") {
  CMatrix A(2, 2);
  A << Complex(1.0, 0.5), 0.0, Complex(0.0, -2.0), Complex(0.1, 0.0);
  std::ostringstream os;
  write_triplets(os, A);
  CHECK(os.str() == "0 0 1 0.5\n1 0 0 -2\n1 1 0.10000000000000001 0\n");
}
