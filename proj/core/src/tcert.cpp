#include "resonalens/tcert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "resonalens/errors.hpp"
#include "resonalens/quadrature.hpp"

namespace resonalens {

Symbol::Symbol(Profile profile, Complex omega, Branch branch, std::optional<ExactMapSpec> map)
    : profile_(std::move(profile)), omega_(omega), branch_(branch), map_(std::move(map)) {}

Complex Symbol::operator()(double r) const {
  Complex dt, dh;
  if (map_) {
    const auto p = exact_map_at(*map_, profile_, r);
    dt = p.d_tilde_e;
    dh = p.d_hat_e;
  } else {
    const auto p = scaling_at(profile_, r);
    dt = p.d_tilde;
    dh = p.d_hat;
  }
  if (branch_ == Branch::Lower) return std::conj(std::abs(dh) / dh);
  return std::conj(dh * std::norm(dt) / (dt * dt * std::abs(dh)));
}

Symbol t_symbol(const Profile& profile, Complex omega, const std::optional<ExactMapSpec>& map) {
  if (omega == Complex(0.0, 0.0)) throw DomainError("t_symbol: omega must be nonzero");
  if (!profile.is_scaled()) throw DomainError("t_symbol: undefined for the unscaled profile");
  if (map) validate_exact_combination(*map, profile);
  return Symbol(profile, omega, select_branch(omega, d_zero(profile)), map);
}

namespace {

// Chebyshev polynomials T_k(t) and their t-derivatives.
void chebyshev(double t, int degree, std::vector<double>& T, std::vector<double>& dT) {
  T.assign(degree + 1, 0.0);
  dT.assign(degree + 1, 0.0);
  T[0] = 1.0;
  if (degree == 0) return;
  T[1] = t;
  dT[1] = 1.0;
  for (int k = 1; k < degree; ++k) {
    T[k + 1] = 2.0 * t * T[k] - T[k - 1];
    dT[k + 1] = 2.0 * T[k] + 2.0 * t * dT[k] - dT[k - 1];
  }
}

}  // namespace

Complex SmoothedSymbol::fit(double r, Complex* derivative) const {
  const double half = 0.5 * (r_hat2_ - r_hat1_);
  const double t = std::clamp((r - r_hat1_) / half - 1.0, -1.0, 1.0);
  std::vector<double> T, dT;
  chebyshev(t, degree(), T, dT);
  Complex v = 0.0, dv = 0.0;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    v += coeffs_[k] * T[k];
    dv += coeffs_[k] * dT[k];
  }
  if (derivative) *derivative = dv / half;
  return v;
}

Complex SmoothedSymbol::operator()(double r) const {
  if (constant_ || r <= r_hat1_) return eta1_;
  if (r >= r_hat2_) return eta2_;
  const double b1 = chi2((r - r_hat1_) / width_);
  const double b2 = chi2((r_hat2_ - r) / width_);
  return eta1_ * (1.0 - b1) + b1 * (b2 * fit(r, nullptr) + (1.0 - b2) * eta2_);
}

Complex SmoothedSymbol::derivative(double r) const {
  if (constant_ || r <= r_hat1_ || r >= r_hat2_) return 0.0;
  const double b1 = chi2((r - r_hat1_) / width_);
  const double b2 = chi2((r_hat2_ - r) / width_);
  const double db1 = chi2_derivative((r - r_hat1_) / width_) / width_;
  const double db2 = -chi2_derivative((r_hat2_ - r) / width_) / width_;
  Complex df;
  const Complex f = fit(r, &df);
  const Complex inner = b2 * f + (1.0 - b2) * eta2_;
  return -db1 * eta1_ + db1 * inner + b1 * (db2 * f + b2 * df - db2 * eta2_);
}

SmoothedSymbol smooth_symbol(const Symbol& symbol, double epsilon, double r_hat1, double r_hat2,
                             std::pair<double, double> check_interval) {
  const double r1 = symbol.profile().r1_star();
  const auto [lo, hi] = check_interval;
  if (!(epsilon > 0.0)) throw ValidationError("smooth_symbol: epsilon must be > 0");
  if (!(r_hat1 > r1)) throw ValidationError("smooth_symbol: r_hat1 must exceed r1*");
  if (!(r_hat2 > r_hat1)) throw ValidationError("smooth_symbol: r_hat2 must exceed r_hat1");
  if (!(hi > r_hat2) || !(lo < r_hat1)) {
    throw ValidationError("smooth_symbol: check interval must contain [r_hat1, r_hat2]");
  }
  if (symbol.map() && !(hi <= symbol.map()->r2_star)) {
    throw ValidationError("smooth_symbol: check interval must end before r2*");
  }
  constexpr int kSamples = 10000;
  std::vector<double> xs(kSamples + 1);
  std::vector<Complex> eta(kSamples + 1);
  for (int k = 0; k <= kSamples; ++k) {
    xs[k] = lo + (hi - lo) * k / kSamples;
    // Stay off the singular end of the exact variant.
    if (symbol.map() && k == kSamples) xs[k] = hi - 1e-9 * (hi - lo);
    eta[k] = symbol(xs[k]);
  }
  SmoothedSymbol s(symbol);
  s.epsilon_ = epsilon;
  s.r_hat1_ = r_hat1;
  s.r_hat2_ = r_hat2;
  s.eta1_ = symbol(r_hat1);
  s.eta2_ = symbol(r_hat2);

  double spread = 0.0;
  for (const auto& e : eta) spread = std::max(spread, std::abs(e - s.eta1_));
  if (spread <= 1e-15) {
    s.constant_ = true;
    s.eta2_ = s.eta1_;
    s.coeffs_ = {s.eta1_};
    s.width_ = 0.5 * (r_hat2 - r_hat1);
    s.gap_ = spread;
    return s;
  }

  auto sup_gap = [&]() {
    double g = 0.0;
    for (int k = 0; k <= kSamples; ++k) g = std::max(g, std::abs(eta[k] - s(xs[k])));
    return g;
  };
  double best = std::numeric_limits<double>::infinity();
  for (double frac : {0.25, 0.125, 0.0625, 0.03125}) {
    s.width_ = frac * (r_hat2 - r_hat1);
    for (int degree : {4, 8, 16, 24, 32, 48, 64}) {
      const int m = 4 * degree + 16;
      CMatrix A(m, degree + 1);
      CVector b(m);
      std::vector<double> T, dT;
      for (int i = 0; i < m; ++i) {
        const double t = -std::cos(kPi * (i + 0.5) / m);
        const double r = r_hat1 + 0.5 * (t + 1.0) * (r_hat2 - r_hat1);
        chebyshev(t, degree, T, dT);
        for (int k = 0; k <= degree; ++k) A(i, k) = T[k];
        b(i) = symbol(r);
      }
      const CVector c = A.colPivHouseholderQr().solve(b);
      s.coeffs_.assign(c.data(), c.data() + c.size());
      const double gap = sup_gap();
      best = std::min(best, gap);
      if (gap < epsilon) {
        s.gap_ = gap;
        return s;
      }
    }
  }
  throw SolverError("smooth_symbol: sup gap " + std::to_string(best) + " stays above epsilon " +
                    std::to_string(epsilon) + "; move r_hat1 towards r1* or r_hat2 outwards");
}

double min_generalized_eigenvalue(const CMatrix& H, const CMatrix& G) {
  Eigen::LLT<CMatrix> llt(G);
  if (llt.info() != Eigen::Success) throw SolverError("Gram matrix is not positive definite");
  const CMatrix Linv = llt.matrixL().solve(CMatrix::Identity(G.rows(), G.cols()));
  CMatrix K = Linv * H * Linv.adjoint();
  K = 0.5 * (K + K.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(K, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

namespace {

double max_generalized_eigenvalue(const CMatrix& H, const CMatrix& G) {
  return -min_generalized_eigenvalue(-H, G);
}

void check_breakpoint(const RadialMesh& mesh, double r, const char* what) {
  if (r > mesh.r_b && r < mesh.r_end && !mesh.has_breakpoint(r)) {
    throw ValidationError(std::string("discrete_commutator_norm: ") + what + " = " +
                          std::to_string(r) + " is not a mesh breakpoint");
  }
}

}  // namespace

double discrete_commutator_norm(const RadialMesh& mesh, const Profile& profile,
                                const SmoothedSymbol& symbol, int n) {
  check_breakpoint(mesh, symbol.r_hat1(), "r_hat1");
  check_breakpoint(mesh, symbol.r_hat2(), "r_hat2");
  for (double k : coefficient_kinks(profile, mesh.map)) check_breakpoint(mesh, k, "kink");
  const int N = mesh.dofs();
  if (N == 0) return 0.0;
  const int last_node = mesh.nodes() - 1;
  const double ang = static_cast<double>(n) * (n + 1);
  const int p = mesh.degree;
  const LagrangeBasis basis(mesh.reference_nodes);
  CMatrix C = CMatrix::Zero(N, N), G = CMatrix::Zero(N, N);
  std::vector<double> phi, dphi;
  std::vector<Complex> psi(p + 1), dpsi(p + 1);
  std::vector<Complex> eta_nodes(p + 1);
  for (int e = 0; e < mesh.elements(); ++e) {
    const double a = mesh.breakpoints[e];
    const double h = mesh.element_width(e);
    const auto rule = gauss_legendre(mesh.quad_points(e) + 2 * p + 8);
    for (int k = 0; k <= p; ++k) eta_nodes[k] = symbol(mesh.node(e * p + k));
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double r = a + 0.5 * (rule.points[q] + 1.0) * h;
      const double w = 0.5 * h * rule.weights[q];
      basis.values(rule.points[q], phi);
      basis.derivatives(rule.points[q], dphi);
      const Complex eta = symbol(r);
      const Complex deta = symbol.derivative(r);
      for (int k = 0; k <= p; ++k) {
        const double dk = dphi[k] * 2.0 / h;
        psi[k] = (eta - eta_nodes[k]) * phi[k];
        dpsi[k] = deta * phi[k] + (eta - eta_nodes[k]) * dk;
        dphi[k] = dk;
      }
      const auto c = form_weights(profile, mesh.map, r);
      const double wm = ang * c.norm_angular + c.norm_mass;
      for (int i = 0; i <= p; ++i) {
        const int gi = e * p + i;
        if (gi == 0 || gi == last_node) continue;
        for (int j = 0; j <= p; ++j) {
          const int gj = e * p + j;
          if (gj == 0 || gj == last_node) continue;
          C(gi - 1, gj - 1) += w * (c.norm_radial * dpsi[j] * std::conj(dpsi[i]) +
                                    wm * psi[j] * std::conj(psi[i]));
          G(gi - 1, gj - 1) += w * (c.norm_radial * dphi[j] * dphi[i] + wm * phi[j] * phi[i]);
        }
      }
    }
  }
  // C_ij = <psi_j, psi_i>_X, so x* C x is the squared residual norm.
  return std::sqrt(std::max(0.0, max_generalized_eigenvalue(C, G)));
}

namespace {

struct Rotation {
  Branch branch;
  double tau;
  double tau1;
  Complex z;
  double bound;
};

Rotation rotation_for(const Profile& profile, Complex omega) {
  if (!profile.is_scaled()) throw DomainError("coercivity: undefined for the unscaled profile");
  const Complex d0 = d_zero(profile);
  const Complex iwd0 = kI * omega * d0;
  if (omega == Complex(0.0, 0.0) || std::abs(iwd0.real()) <= 1e-12 * std::abs(iwd0)) {
    throw DomainError("coercivity: omega lies on the essential line");
  }
  Rotation rot;
  rot.branch = select_branch(omega, d0);
  rot.tau = tau_bound(profile);
  const double arg_dh = std::arg(d_hat_inner(profile));
  const double arg_w = arg_half_open(-omega * omega * d0 * d0);
  if (rot.branch == Branch::Lower) {
    rot.tau1 = std::min({-2.0 * rot.tau, -arg_dh, arg_w});
    rot.z = kI * std::exp(-kI * (kPi + rot.tau1) / 2.0);
  } else {
    rot.tau1 = std::max({2.0 * rot.tau, arg_dh, arg_w});
    rot.z = -kI * std::exp(kI * (kPi - rot.tau1) / 2.0);
  }
  rot.bound = std::cos(rot.tau1 / 2.0) * std::min(1.0, std::norm(omega));
  return rot;
}

CoercivityCertificate certify(const Rotation& rot, Complex omega, const CMatrix& A1,
                              const CMatrix& G) {
  CoercivityCertificate c;
  c.omega = omega;
  c.branch = rot.branch;
  c.tau = rot.tau;
  c.tau1 = rot.tau1;
  c.rotation = rot.z;
  c.bound = rot.bound;
  const CMatrix zA = rot.z * A1;
  const CMatrix H = 0.5 * (zA + zA.adjoint());
  c.min_eig = min_generalized_eigenvalue(H, G);
  c.pass = c.min_eig >= c.bound - 1e-8;
  return c;
}

}  // namespace

CoercivityCertificate coercivity_certificate(const RadialMesh& mesh, const Profile& profile, int n,
                                             Complex omega) {
  const Rotation rot = rotation_for(profile, omega);
  const auto mm = assemble_mode(mesh, profile, n);
  const CMatrix A1 = assemble_a1(mesh, profile, n, rot.branch, omega);
  return certify(rot, omega, A1, mm.G);
}

CoercivityCertificate smoothed_coercivity_certificate(const RadialMesh& mesh,
                                                      const Profile& profile, int n,
                                                      const SmoothedSymbol& symbol) {
  const Complex omega = symbol.base().omega();
  const Rotation rot = rotation_for(profile, omega);
  const auto mm = assemble_mode(mesh, profile, n);
  const CMatrix A1 = assemble_weighted(mesh, n, [&](double r) {
    const auto f = form_weights(profile, mesh.map, r);
    const auto a1 = a1_weights(profile, mesh.map, r, rot.branch, omega);
    const Complex t = std::conj(symbol(r));
    return A1Weights{f.radial * t, f.angular * t, a1.mass};
  });
  return certify(rot, omega, A1, mm.G);
}

}  // namespace resonalens
