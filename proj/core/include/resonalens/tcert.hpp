#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "resonalens/profiles.hpp"
#include "resonalens/radialfem.hpp"
#include "resonalens/scaling.hpp"
#include "resonalens/types.hpp"

namespace resonalens {

/// Pointwise multiplier eta(r) of the operator T(omega).
///
/// Lower branch: conj(|d_hat| / d_hat). Upper branch:
/// conj(d_hat |d_tilde|^2 / (d_tilde^2 |d_hat|)). Both are unimodular. With
/// a map set, the mapped quantities of the exact variant are used.
class Symbol {
 public:
  Symbol(Profile profile, Complex omega, Branch branch, std::optional<ExactMapSpec> map);

  Complex operator()(double r) const;
  Branch branch() const { return branch_; }
  Complex omega() const { return omega_; }
  const Profile& profile() const { return profile_; }
  const std::optional<ExactMapSpec>& map() const { return map_; }

 private:
  Profile profile_;
  Complex omega_;
  Branch branch_;
  std::optional<ExactMapSpec> map_;
};

/// Builds the symbol with the branch picked from arg(-omega^2 d0^2).
/// Throws DomainError for omega == 0 or an unscaled profile.
Symbol t_symbol(const Profile& profile, Complex omega,
                const std::optional<ExactMapSpec>& map = std::nullopt);

/// Smooth approximation eta_eps of a symbol, constant on [r_b, r_hat1] and
/// on [r_hat2, inf).
///
/// In between, a Chebyshev least-squares fit of eta on [r_hat1, r_hat2] is
/// blended with chi2 ramps of width `width` into the two end values.
class SmoothedSymbol {
 public:
  Complex operator()(double r) const;
  Complex derivative(double r) const;

  double epsilon() const { return epsilon_; }
  double r_hat1() const { return r_hat1_; }
  double r_hat2() const { return r_hat2_; }
  double width() const { return width_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_constant() const { return constant_; }
  /// Sampled sup |eta - eta_eps| that certified the construction.
  double certified_gap() const { return gap_; }
  const Symbol& base() const { return base_; }

 private:
  friend SmoothedSymbol smooth_symbol(const Symbol&, double, double, double,
                                      std::pair<double, double>);
  explicit SmoothedSymbol(Symbol base) : base_(std::move(base)) {}

  Complex fit(double r, Complex* derivative) const;

  Symbol base_;
  double epsilon_ = 0.0;
  double r_hat1_ = 0.0;
  double r_hat2_ = 0.0;
  double width_ = 0.0;
  Complex eta1_;
  Complex eta2_;
  std::vector<Complex> coeffs_;
  bool constant_ = false;
  double gap_ = 0.0;
};

/// Certifies sup |eta - eta_eps| < epsilon on 10^4 uniform samples of
/// `check_interval`, escalating the fit degree and shrinking the ramps until
/// it holds. Throws SolverError when the refinement budget runs out and
/// ValidationError unless r1* < r_hat1 < r_hat2 < check_interval.second.
SmoothedSymbol smooth_symbol(const Symbol& symbol, double epsilon, double r_hat1, double r_hat2,
                             std::pair<double, double> check_interval);

/// sup over FEM functions u of ||(I - Pi_h)(eta_eps u)||_X / ||u||_X in mode
/// n, with Pi_h the nodal interpolant. The mesh must carry r_hat1, r_hat2
/// and the profile kinks as breakpoints.
double discrete_commutator_norm(const RadialMesh& mesh, const Profile& profile,
                                const SmoothedSymbol& symbol, int n = 0);

struct CoercivityCertificate {
  Complex omega;
  Branch branch = Branch::Lower;
  double tau = 0.0;
  double tau1 = 0.0;
  Complex rotation{1.0, 0.0};
  /// cos(tau1 / 2) min{1, |omega|^2}.
  double bound = 0.0;
  /// Smallest eigenvalue of the Hermitian part of z A1 relative to G.
  double min_eig = 0.0;
  bool pass = false;
};

/// Throws DomainError for an unscaled profile or omega on the essential line.
CoercivityCertificate coercivity_certificate(const RadialMesh& mesh, const Profile& profile, int n,
                                             Complex omega);

/// Same test with the multiplier factor of a1 replaced by the smoothed
/// symbol, i.e. the principal part of a(omega; u, eta_eps u).
CoercivityCertificate smoothed_coercivity_certificate(const RadialMesh& mesh,
                                                      const Profile& profile, int n,
                                                      const SmoothedSymbol& symbol);

/// Smallest eigenvalue of the Hermitian pencil (H, G), G positive definite.
double min_generalized_eigenvalue(const CMatrix& H, const CMatrix& G);

}  // namespace resonalens
