#pragma once

#include <span>
#include <string_view>

#include "resonalens/profiles.hpp"
#include "resonalens/types.hpp"

namespace resonalens {

/// Complex-scaling quantities of a profile at one radius.
struct ScalingPoint {
  double r = 0.0;
  double alpha_tilde = 0.0;
  Complex d_tilde{1.0, 0.0};  // 1 + i alpha_tilde
  double alpha = 0.0;         // r alpha_tilde' + alpha_tilde
  Complex d{1.0, 0.0};        // 1 + i alpha, derivative of r_tilde
  Complex d_hat{1.0, 0.0};    // d outside r1*, constant right limit inside
  Complex r_tilde{0.0, 0.0};  // d_tilde * r
};

ScalingPoint scaling_at(const Profile& profile, double r);

/// d_hat inside [0, r1*]: 1 + i alpha(r1*+).
Complex d_hat_inner(const Profile& profile);

/// Asymptotic phase of d_tilde; the essential spectrum is {t / d0 : t real}.
/// Throws DomainError for the unscaled profile.
Complex d_zero(const Profile& profile);

/// Case distinction of the T-operator symbol: Lower when
/// arg(-omega^2 d0^2) lies in [-pi, 0), Upper otherwise.
enum class Branch { Lower, Upper };

std::string_view to_string(Branch branch);
Branch select_branch(Complex omega, Complex d0);

/// Supremum of arg(d / d_tilde) over r > r1*, combining the grid with the
/// closed-form limits at r1*+ and at infinity. Throws DomainError when the
/// bound reaches pi/2 or the profile is unscaled.
double tau_bound(const Profile& profile, std::span<const double> grid);
double tau_bound(const Profile& profile);

enum class MapKind { Log, PowerBeta };

std::string_view to_string(MapKind kind);
MapKind map_kind_from_string(std::string_view name);

/// Real map squeezing (r1*, inf) onto (r1*, r2*).
struct ExactMapSpec {
  MapKind kind = MapKind::Log;
  double beta = -0.5;
  double r2_star = 2.0;
};

/// Throws ValidationError unless the map is admissible for `profile`:
/// r2* > r1*, beta in (-2/3, 0), and an affine or smooth profile.
void validate_exact_combination(const ExactMapSpec& map, const Profile& profile);

/// Mapped quantities at r in (0, r2*).
struct ExactPoint {
  double r = 0.0;
  double r_e = 0.0;            // mapped radius
  double gamma_e = 1.0;        // d r_e / d r
  double gamma_tilde_e = 1.0;  // r_e / r
  Complex d_tilde_e{1.0, 0.0};
  Complex d_e{1.0, 0.0};
  Complex d_hat_e{1.0, 0.0};
};

/// Mapped radius and its derivative; identity on [0, r1*]. Throws
/// DomainError for r >= r2*.
double exact_radius(const ExactMapSpec& map, double r1_star, double r, double* gamma = nullptr);

/// Inverse of exact_radius: the r with exact_radius(r) == r_e.
double exact_radius_inverse(const ExactMapSpec& map, double r1_star, double r_e);

ExactPoint exact_map_at(const ExactMapSpec& map, const Profile& profile, double r);

}  // namespace resonalens
