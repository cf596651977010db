#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "resonalens/profiles.hpp"
#include "resonalens/quadrature.hpp"
#include "resonalens/scaling.hpp"
#include "resonalens/types.hpp"

namespace resonalens {

/// 1D high-order mesh on [r_b, r_end] with Dirichlet conditions at both ends.
///
/// Nodal Lagrange elements on Gauss-Lobatto points. Global node g of element
/// e, local node k is g = e * degree + k; the free DOFs are the interior
/// nodes 1 .. nodes() - 2, numbered from zero.
struct RadialMesh {
  double r_b = 1.0;
  double r_end = 2.0;
  std::vector<double> breakpoints;
  int degree = 1;
  /// Gauss points per element.
  int quad_order = 4;
  /// Gauss points on the last element (raised for the singular exact weights).
  int last_quad_order = 4;
  /// Set for the truncationless variant, whose mesh ends at r2*.
  std::optional<ExactMapSpec> map;
  /// Gauss-Lobatto nodes of one element on [-1, 1].
  std::vector<double> reference_nodes;

  int elements() const { return static_cast<int>(breakpoints.size()) - 1; }
  int nodes() const { return elements() * degree + 1; }
  int dofs() const { return nodes() - 2; }
  bool is_exact() const { return map.has_value(); }
  double element_width(int e) const { return breakpoints[e + 1] - breakpoints[e]; }
  int quad_points(int e) const { return e == elements() - 1 ? last_quad_order : quad_order; }
  /// Coordinate of global node g.
  double node(int g) const;
  std::vector<double> node_coordinates() const;
  /// Element containing r (the left one at a breakpoint).
  int element_of(double r) const;
  bool has_breakpoint(double r, double tol = 1e-10) const;
  double max_width() const;
};

/// Uniform mesh with `elements` cells, with every align point inserted as an
/// extra breakpoint. `map` selects the exact variant, in which case r_end must
/// equal map->r2_star. Align points outside (r_b, r_end) are rejected, except
/// that a point coinciding with an end is ignored.
RadialMesh build_mesh(double r_b, double r_end, int elements, int degree,
                      const std::optional<ExactMapSpec>& map = std::nullopt,
                      std::span<const double> align_points = {});

/// Coefficient kinks of `profile` expressed in mesh coordinates.
std::vector<double> coefficient_kinks(const Profile& profile,
                                      const std::optional<ExactMapSpec>& map = std::nullopt);

/// Pointwise coefficients of the scaled form and of the X inner product.
/// Radial and mass weights include the r^2 Jacobian; angular weights exclude
/// the n(n+1) factor.
struct FormWeights {
  Complex radial;
  Complex angular;
  Complex mass;
  double norm_radial = 0.0;
  double norm_angular = 0.0;
  double norm_mass = 0.0;
};

FormWeights form_weights(const Profile& profile, const std::optional<ExactMapSpec>& map, double r);

/// Per-mode matrices. S = S(0) + n(n+1) D; all are DOF x DOF.
struct ModeMatrices {
  int n = 0;
  CMatrix S;
  CMatrix M;
  CMatrix G;
  CMatrix D;
  RadialMesh mesh;
  Profile profile;
};

/// Assembles the stiffness, mass and Gram matrices of mode n. The profile kinks
/// must be mesh breakpoints.
ModeMatrices assemble_mode(const RadialMesh& mesh, const Profile& profile, int n);

/// Weights of the coercive part a1 of a(omega; u, T u) at r, for the branch
/// selected by the caller. Same conventions as FormWeights.
struct A1Weights {
  Complex radial;
  Complex angular;
  Complex mass;
};

A1Weights a1_weights(const Profile& profile, const std::optional<ExactMapSpec>& map, double r,
                     Branch branch, Complex omega);

CMatrix assemble_a1(const RadialMesh& mesh, const Profile& profile, int n, Branch branch,
                    Complex omega);

/// Assembles the form with pointwise weights weights(r), on the same
/// quadrature as assemble_mode.
CMatrix assemble_weighted(const RadialMesh& mesh, int n,
                          const std::function<A1Weights(double)>& weights);

/// Values of the FEM function with DOF vector `coeffs` at r.
Complex evaluate(const RadialMesh& mesh, const CVector& coeffs, double r,
                 Complex* derivative = nullptr);

/// Nodal interpolant of f on the free DOFs.
template <class F>
CVector interpolate(const RadialMesh& mesh, F&& f) {
  CVector c(mesh.dofs());
  for (int g = 1; g + 1 < mesh.nodes(); ++g) c(g - 1) = f(mesh.node(g));
  return c;
}

/// X-norm of the FEM function restricted to [rho, r_end].
double tail_xnorm(const ModeMatrices& matrices, const CVector& coeffs, double rho);

/// Distance in the X-norm of the fine function to the coarse FEM space
/// extended by zero beyond the coarse end. The coarse mesh must be nested.
double best_approximation_error(const ModeMatrices& fine, const CVector& coeffs,
                                const RadialMesh& coarse);

/// Debug export as "row col re im" lines, zero entries skipped.
void write_triplets(std::ostream& os, const CMatrix& matrix);

}  // namespace resonalens
