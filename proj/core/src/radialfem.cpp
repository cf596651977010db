#include "resonalens/radialfem.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include <Eigen/Dense>

#include "resonalens/errors.hpp"

namespace resonalens {

double RadialMesh::node(int g) const {
  int e = g / degree;
  if (e >= elements()) e = elements() - 1;
  const int k = g - e * degree;
  const double a = breakpoints[e];
  return a + 0.5 * (reference_nodes[k] + 1.0) * element_width(e);
}

std::vector<double> RadialMesh::node_coordinates() const {
  std::vector<double> x(nodes());
  for (int g = 0; g < nodes(); ++g) x[g] = node(g);
  return x;
}

int RadialMesh::element_of(double r) const {
  auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), r);
  int e = static_cast<int>(it - breakpoints.begin()) - 1;
  return std::clamp(e, 0, elements() - 1);
}

bool RadialMesh::has_breakpoint(double r, double tol) const {
  const double scale = std::max(1.0, std::abs(r_end));
  return std::any_of(breakpoints.begin(), breakpoints.end(),
                     [&](double b) { return std::abs(b - r) <= tol * scale; });
}

double RadialMesh::max_width() const {
  double h = 0.0;
  for (int e = 0; e < elements(); ++e) h = std::max(h, element_width(e));
  return h;
}

RadialMesh build_mesh(double r_b, double r_end, int elements, int degree,
                      const std::optional<ExactMapSpec>& map, std::span<const double> align_points) {
  if (!(r_b > 0.0)) throw ValidationError("mesh: r_b must be > 0");
  if (!(r_end > r_b)) throw ValidationError("mesh: r_end must exceed r_b");
  if (elements < 1) throw ValidationError("mesh: need at least one element");
  if (degree < 1) throw ValidationError("mesh: degree must be >= 1");
  if (map && std::abs(map->r2_star - r_end) > 1e-12 * std::max(1.0, r_end)) {
    throw ValidationError("mesh: the exact variant must end at r2_star");
  }
  RadialMesh mesh;
  mesh.r_b = r_b;
  mesh.r_end = r_end;
  mesh.degree = degree;
  mesh.map = map;
  mesh.quad_order = 2 * degree + 2;
  mesh.last_quad_order = map ? 2 * degree + 6 : mesh.quad_order;
  mesh.reference_nodes = gauss_lobatto(degree + 1).points;
  mesh.breakpoints.resize(elements + 1);
  for (int k = 0; k <= elements; ++k) {
    mesh.breakpoints[k] = r_b + (r_end - r_b) * static_cast<double>(k) / elements;
  }
  mesh.breakpoints.back() = r_end;
  const double tol = 1e-10 * std::max(1.0, r_end);
  for (double a : align_points) {
    if (a < r_b - tol || a > r_end + tol) {
      throw ValidationError("mesh: align point " + std::to_string(a) + " lies outside [r_b, r_end]");
    }
    if (mesh.has_breakpoint(a)) continue;
    mesh.breakpoints.insert(std::upper_bound(mesh.breakpoints.begin(), mesh.breakpoints.end(), a), a);
  }
  return mesh;
}

std::vector<double> coefficient_kinks(const Profile& profile, const std::optional<ExactMapSpec>& map) {
  auto kinks = profile.kinks();
  if (!map) return kinks;
  std::vector<double> mapped{profile.r1_star()};
  for (double k : kinks) {
    if (k > profile.r1_star()) mapped.push_back(exact_radius_inverse(*map, profile.r1_star(), k));
  }
  return mapped;
}

FormWeights form_weights(const Profile& profile, const std::optional<ExactMapSpec>& map, double r) {
  FormWeights w;
  if (!map) {
    const auto p = scaling_at(profile, r);
    const Complex dt2 = p.d_tilde * p.d_tilde;
    const double r2 = r * r;
    w.radial = dt2 / p.d * r2;
    w.angular = p.d;
    w.mass = dt2 * p.d * r2;
  } else {
    const auto p = exact_map_at(*map, profile, r);
    const Complex dt2 = p.d_tilde_e * p.d_tilde_e;
    const double gt2 = p.gamma_tilde_e * p.gamma_tilde_e;
    const double r2 = r * r;
    w.radial = gt2 / p.gamma_e * dt2 / p.d_e * r2;
    w.angular = p.gamma_e * p.d_e;
    w.mass = gt2 * p.gamma_e * dt2 * p.d_e * r2;
  }
  w.norm_radial = std::abs(w.radial);
  w.norm_angular = std::abs(w.angular);
  w.norm_mass = std::abs(w.mass);
  return w;
}

namespace {

struct ElementTables {
  std::vector<double> weights;
  std::vector<std::vector<double>> phi;
  std::vector<std::vector<double>> dphi;  // reference derivative
  std::vector<double> points;
};

ElementTables make_tables(const LagrangeBasis& basis, int quad_points) {
  const auto rule = gauss_legendre(quad_points);
  ElementTables t;
  t.weights = rule.weights;
  t.points = rule.points;
  t.phi.resize(quad_points);
  t.dphi.resize(quad_points);
  for (int q = 0; q < quad_points; ++q) {
    basis.values(rule.points[q], t.phi[q]);
    basis.derivatives(rule.points[q], t.dphi[q]);
  }
  return t;
}

// Calls visit(r, weight, phi, dphi_physical, first_global_node) for every
// quadrature point of the mesh.
template <class Visit>
void for_each_point(const RadialMesh& mesh, Visit&& visit) {
  const LagrangeBasis basis(mesh.reference_nodes);
  const ElementTables interior = make_tables(basis, mesh.quad_order);
  const ElementTables last = make_tables(basis, mesh.last_quad_order);
  std::vector<double> dphi(mesh.degree + 1);
  for (int e = 0; e < mesh.elements(); ++e) {
    const ElementTables& t = mesh.quad_points(e) == mesh.quad_order ? interior : last;
    const double a = mesh.breakpoints[e];
    const double h = mesh.element_width(e);
    for (std::size_t q = 0; q < t.points.size(); ++q) {
      const double r = a + 0.5 * (t.points[q] + 1.0) * h;
      for (int k = 0; k <= mesh.degree; ++k) dphi[k] = t.dphi[q][k] * 2.0 / h;
      visit(r, 0.5 * h * t.weights[q], t.phi[q], dphi, e * mesh.degree);
    }
  }
}

void check_alignment(const RadialMesh& mesh, const Profile& profile) {
  for (double k : coefficient_kinks(profile, mesh.map)) {
    if (k > mesh.r_b && k < mesh.r_end && !mesh.has_breakpoint(k)) {
      throw ValidationError("mesh: coefficient kink at r=" + std::to_string(k) +
                            " is not a breakpoint");
    }
  }
}

// Adds w * a_i * b_j to the DOF block, skipping the Dirichlet nodes.
template <class Mat>
void scatter(Mat& A, int first, int last_node, const std::vector<double>& a,
             const std::vector<double>& b, Complex w) {
  const int p = static_cast<int>(a.size()) - 1;
  for (int i = 0; i <= p; ++i) {
    const int gi = first + i;
    if (gi == 0 || gi == last_node) continue;
    for (int j = 0; j <= p; ++j) {
      const int gj = first + j;
      if (gj == 0 || gj == last_node) continue;
      A(gi - 1, gj - 1) += w * a[i] * b[j];
    }
  }
}

}  // namespace

ModeMatrices assemble_mode(const RadialMesh& mesh, const Profile& profile, int n) {
  if (n < 0) throw ValidationError("assemble_mode: n must be >= 0");
  if (mesh.map) validate_exact_combination(*mesh.map, profile);
  check_alignment(mesh, profile);
  const int N = mesh.dofs();
  const int last_node = mesh.nodes() - 1;
  CMatrix S0 = CMatrix::Zero(N, N), D = CMatrix::Zero(N, N), M = CMatrix::Zero(N, N);
  CMatrix G0 = CMatrix::Zero(N, N), Ga = CMatrix::Zero(N, N), Gm = CMatrix::Zero(N, N);
  for_each_point(mesh, [&](double r, double w, const std::vector<double>& phi,
                           const std::vector<double>& dphi, int first) {
    const auto c = form_weights(profile, mesh.map, r);
    scatter(S0, first, last_node, dphi, dphi, w * c.radial);
    scatter(D, first, last_node, phi, phi, w * c.angular);
    scatter(M, first, last_node, phi, phi, w * c.mass);
    scatter(G0, first, last_node, dphi, dphi, w * c.norm_radial);
    scatter(Ga, first, last_node, phi, phi, w * c.norm_angular);
    scatter(Gm, first, last_node, phi, phi, w * c.norm_mass);
  });
  const double ang = static_cast<double>(n) * (n + 1);
  ModeMatrices mm{n, S0 + ang * D, std::move(M), G0 + ang * Ga + Gm, std::move(D), mesh, profile};
  return mm;
}

A1Weights a1_weights(const Profile& profile, const std::optional<ExactMapSpec>& map, double r,
                     Branch branch, Complex omega) {
  if (!profile.is_scaled()) throw DomainError("a1: undefined for the unscaled profile");
  const Complex d0 = d_zero(profile);
  Complex dt, d, dh;
  double f_rad = 1.0, f_ang = 1.0, f_mass = 1.0;
  if (!map) {
    const auto p = scaling_at(profile, r);
    dt = p.d_tilde;
    d = p.d;
    dh = p.d_hat;
  } else {
    const auto p = exact_map_at(*map, profile, r);
    dt = p.d_tilde_e;
    d = p.d_e;
    dh = p.d_hat_e;
    const double gt2 = p.gamma_tilde_e * p.gamma_tilde_e;
    f_rad = gt2 / p.gamma_e;
    f_ang = p.gamma_e;
    f_mass = gt2 * p.gamma_e;
  }
  const Complex dt2 = dt * dt;
  const double r2 = r * r;
  A1Weights w;
  if (branch == Branch::Lower) {
    w.radial = dt2 * std::abs(dh) / (d * dh) * r2 * f_rad;
    w.angular = d * std::abs(dh) / dh * f_ang;
  } else {
    w.radial = dh * std::abs(dt2) / (d * std::abs(dh)) * r2 * f_rad;
    w.angular = d * dh * std::abs(dt2) / (dt2 * std::abs(dh)) * f_ang;
  }
  w.mass = -omega * omega * d0 * d0 * std::abs(dt2 * d) * r2 * f_mass;
  return w;
}

CMatrix assemble_weighted(const RadialMesh& mesh, int n,
                          const std::function<A1Weights(double)>& weights) {
  const int N = mesh.dofs();
  const int last_node = mesh.nodes() - 1;
  const double ang = static_cast<double>(n) * (n + 1);
  CMatrix A = CMatrix::Zero(N, N);
  for_each_point(mesh, [&](double r, double w, const std::vector<double>& phi,
                           const std::vector<double>& dphi, int first) {
    const auto c = weights(r);
    scatter(A, first, last_node, dphi, dphi, w * c.radial);
    if (n > 0) scatter(A, first, last_node, phi, phi, w * ang * c.angular);
    scatter(A, first, last_node, phi, phi, w * c.mass);
  });
  return A;
}

CMatrix assemble_a1(const RadialMesh& mesh, const Profile& profile, int n, Branch branch,
                    Complex omega) {
  if (!profile.is_scaled()) throw DomainError("assemble_a1: undefined for the unscaled profile");
  if (mesh.map) validate_exact_combination(*mesh.map, profile);
  check_alignment(mesh, profile);
  return assemble_weighted(mesh, n, [&](double r) {
    return a1_weights(profile, mesh.map, r, branch, omega);
  });
}

Complex evaluate(const RadialMesh& mesh, const CVector& coeffs, double r, Complex* derivative) {
  if (coeffs.size() != mesh.dofs()) throw ValidationError("evaluate: coefficient size mismatch");
  const int e = mesh.element_of(r);
  const double a = mesh.breakpoints[e];
  const double h = mesh.element_width(e);
  const double xi = 2.0 * (r - a) / h - 1.0;
  const LagrangeBasis basis(mesh.reference_nodes);
  std::vector<double> phi, dphi;
  basis.values(xi, phi);
  if (derivative) basis.derivatives(xi, dphi);
  Complex u = 0.0, du = 0.0;
  const int last_node = mesh.nodes() - 1;
  for (int k = 0; k <= mesh.degree; ++k) {
    const int g = e * mesh.degree + k;
    if (g == 0 || g == last_node) continue;
    u += coeffs(g - 1) * phi[k];
    if (derivative) du += coeffs(g - 1) * dphi[k] * 2.0 / h;
  }
  if (derivative) *derivative = du;
  return u;
}

double tail_xnorm(const ModeMatrices& mm, const CVector& coeffs, double rho) {
  const auto& mesh = mm.mesh;
  if (rho < mesh.r_b || rho > mesh.r_end) throw DomainError("tail_xnorm: rho outside the mesh");
  if (coeffs.size() != mesh.dofs()) throw ValidationError("tail_xnorm: coefficient size mismatch");
  const LagrangeBasis basis(mesh.reference_nodes);
  const double ang = static_cast<double>(mm.n) * (mm.n + 1);
  const int last_node = mesh.nodes() - 1;
  std::vector<double> phi, dphi;
  double sum = 0.0;
  for (int e = 0; e < mesh.elements(); ++e) {
    const double a = mesh.breakpoints[e];
    const double b = mesh.breakpoints[e + 1];
    if (b <= rho) continue;
    const double lo = std::max(a, rho);
    const double h = b - a;
    const auto rule = gauss_legendre(mesh.quad_points(e));
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double r = lo + 0.5 * (rule.points[q] + 1.0) * (b - lo);
      const double xi = 2.0 * (r - a) / h - 1.0;
      basis.values(xi, phi);
      basis.derivatives(xi, dphi);
      Complex u = 0.0, du = 0.0;
      for (int k = 0; k <= mesh.degree; ++k) {
        const int g = e * mesh.degree + k;
        if (g == 0 || g == last_node) continue;
        u += coeffs(g - 1) * phi[k];
        du += coeffs(g - 1) * dphi[k] * 2.0 / h;
      }
      const auto c = form_weights(mm.profile, mesh.map, r);
      const double integrand =
          c.norm_radial * std::norm(du) + (ang * c.norm_angular + c.norm_mass) * std::norm(u);
      sum += 0.5 * (b - lo) * rule.weights[q] * integrand;
    }
  }
  return std::sqrt(sum);
}

double best_approximation_error(const ModeMatrices& fine, const CVector& coeffs,
                                const RadialMesh& coarse) {
  const auto& mf = fine.mesh;
  const double tol = 1e-10 * std::max(1.0, mf.r_end);
  if (std::abs(coarse.r_b - mf.r_b) > tol || coarse.r_end > mf.r_end + tol ||
      coarse.degree > mf.degree || coarse.map.has_value() != mf.map.has_value()) {
    throw ValidationError("best_approximation_error: coarse mesh is not nested in the fine mesh");
  }
  for (double b : coarse.breakpoints) {
    if (!mf.has_breakpoint(b)) {
      throw ValidationError("best_approximation_error: coarse breakpoint " + std::to_string(b) +
                            " is not a fine breakpoint");
    }
  }
  if (coeffs.size() != mf.dofs()) {
    throw ValidationError("best_approximation_error: coefficient size mismatch");
  }
  // Prolongation: coarse basis functions sampled at the fine nodes.
  const int nf = mf.dofs();
  const int nc = coarse.dofs();
  if (nc <= 0) return std::sqrt(std::abs(coeffs.dot(fine.G * coeffs)));
  CMatrix P = CMatrix::Zero(nf, nc);
  const LagrangeBasis basis(coarse.reference_nodes);
  std::vector<double> phi;
  const int last_coarse = coarse.nodes() - 1;
  for (int g = 1; g + 1 < mf.nodes(); ++g) {
    const double x = mf.node(g);
    if (x >= coarse.r_end - tol) continue;
    const int e = coarse.element_of(x);
    const double a = coarse.breakpoints[e];
    const double xi = 2.0 * (x - a) / coarse.element_width(e) - 1.0;
    basis.values(xi, phi);
    for (int k = 0; k <= coarse.degree; ++k) {
      const int gc = e * coarse.degree + k;
      if (gc == 0 || gc == last_coarse) continue;
      P(g - 1, gc - 1) += phi[k];
    }
  }
  const CMatrix GP = fine.G * P;
  const CMatrix Gc = P.adjoint() * GP;
  const CVector y = Gc.ldlt().solve(GP.adjoint() * coeffs);
  const CVector res = coeffs - P * y;
  return std::sqrt(std::max(0.0, std::real(res.dot(fine.G * res))));
}

void write_triplets(std::ostream& os, const CMatrix& matrix) {
  const auto old_precision = os.precision(17);
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      const Complex v = matrix(i, j);
      if (v == Complex(0.0, 0.0)) continue;
      os << i << ' ' << j << ' ' << v.real() << ' ' << v.imag() << '\n';
    }
  }
  os.precision(old_precision);
}

}  // namespace resonalens
