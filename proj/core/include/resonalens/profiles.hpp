#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace resonalens {

enum class ProfileKind { Affine, Power, SmoothChi2, Unscaled };

std::string_view to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(std::string_view name);

/// Parameters of a radial scaling profile alpha_tilde(r).
///
/// `r2` is only read for the smooth kind; when left at zero it defaults to
/// r1_star + 1. `allow_unscaled` must be set to build the identically-zero
/// profile, which exists for verification runs against the real annulus.
struct ProfileSpec {
  ProfileKind kind = ProfileKind::Affine;
  double alpha0 = 1.0;
  int m = 1;
  double r1_star = 1.0;
  double r2 = 0.0;
  bool allow_unscaled = false;
};

/// Immutable, evaluable scaling profile.
///
/// All derivatives are closed-form per kind. The profile vanishes on
/// [0, r1_star] and is non-decreasing beyond it.
class Profile {
 public:
  const ProfileSpec& spec() const { return spec_; }
  ProfileKind kind() const { return spec_.kind; }
  double r1_star() const { return spec_.r1_star; }
  double alpha0() const { return spec_.alpha0; }
  /// End of the transition zone for the smooth kind.
  double r2() const { return r2_; }
  bool is_scaled() const { return spec_.kind != ProfileKind::Unscaled; }

  double alpha_tilde(double r) const;
  double alpha_tilde_derivative(double r) const;
  /// alpha(r) = r * alpha_tilde'(r) + alpha_tilde(r), so that (r * d_tilde)' = 1 + i alpha.
  double alpha(double r) const;
  /// Right limit of alpha at r1_star.
  double alpha_right_limit() const;

  /// Points where a coefficient derivative jumps; meshes must carry them as
  /// breakpoints.
  std::vector<double> kinks() const;

 private:
  friend Profile make_profile(const ProfileSpec& spec);
  explicit Profile(ProfileSpec spec);

  ProfileSpec spec_;
  double r2_ = 0.0;
};

/// Validates `spec` and returns the profile. Throws ValidationError naming
/// the offending field.
Profile make_profile(const ProfileSpec& spec);

/// exp(-1/t) for t > 0 and 0 otherwise.
double chi1(double t);
/// Smooth monotone step from 0 (t <= 0) to 1 (t >= 1).
double chi2(double t);
double chi2_derivative(double t);

struct AssumptionItem {
  std::string id;
  bool pass = true;
  std::optional<double> witness;
  std::string detail;
};

struct AssumptionReport {
  std::vector<AssumptionItem> items;

  bool all_pass() const;
  const AssumptionItem& item(std::string_view id) const;
};

/// Item identifiers used in AssumptionReport.
namespace assumption {
inline constexpr std::string_view kVanishesInside = "vanishes_inside";
inline constexpr std::string_view kContinuous = "continuous";
inline constexpr std::string_view kPositiveOutside = "positive_outside";
inline constexpr std::string_view kNonDecreasing = "non_decreasing";
inline constexpr std::string_view kTwiceDifferentiable = "twice_differentiable";
inline constexpr std::string_view kTailPhaseAlignment = "tail_phase_alignment";
inline constexpr std::string_view kTailPhaseDerivative = "tail_phase_derivative";
}  // namespace assumption

/// Sampled description of an arbitrary profile, used to validate profiles
/// that are not one of the built-in kinds.
struct SampledProfile {
  std::function<double(double)> alpha_tilde;
  /// r * alpha_tilde' + alpha_tilde; estimated by central differences when empty.
  std::function<double(double)> alpha;
  double r1_star = 1.0;
};

/// Sampling tolerances. Continuity is checked by bisecting every grid
/// interval whose jump exceeds `jump_tolerance` down to width ~1e-12; tail
/// limits are read on [100 r1*, 1000 r1*].
struct ValidationTolerances {
  double jump_tolerance = 1e-6;
  double tail_alignment_max = 1e-2;
  double tail_derivative_max = 1e-4;
};

AssumptionReport validate_assumptions(const Profile& profile, std::span<const double> grid,
                                      const ValidationTolerances& tol = {});
AssumptionReport validate_assumptions(const SampledProfile& profile, std::span<const double> grid,
                                      const ValidationTolerances& tol = {});

/// Dense grid on [0, 1000 r1*] used when no grid is supplied.
std::vector<double> default_validation_grid(double r1_star);

}  // namespace resonalens
