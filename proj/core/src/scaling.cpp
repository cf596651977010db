#include "resonalens/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "resonalens/errors.hpp"

namespace resonalens {

ScalingPoint scaling_at(const Profile& profile, double r) {
  ScalingPoint p;
  p.r = r;
  p.alpha_tilde = profile.alpha_tilde(r);
  p.alpha = profile.alpha(r);
  p.d_tilde = Complex(1.0, p.alpha_tilde);
  p.d = Complex(1.0, p.alpha);
  p.d_hat = r > profile.r1_star() ? p.d : d_hat_inner(profile);
  p.r_tilde = p.d_tilde * r;
  return p;
}

Complex d_hat_inner(const Profile& profile) { return {1.0, profile.alpha_right_limit()}; }

Complex d_zero(const Profile& profile) {
  switch (profile.kind()) {
    case ProfileKind::Affine:
    case ProfileKind::SmoothChi2: {
      const Complex d(1.0, profile.alpha0());
      return d / std::abs(d);
    }
    case ProfileKind::Power:
      if (profile.spec().m == 1) {
        const Complex d(1.0, profile.alpha0());
        return d / std::abs(d);
      }
      return kI;
    case ProfileKind::Unscaled:
      break;
  }
  throw DomainError("d_zero: undefined for the unscaled profile");
}

std::string_view to_string(Branch branch) {
  return branch == Branch::Lower ? "lower" : "upper";
}

Branch select_branch(Complex omega, Complex d0) {
  const double a = arg_half_open(-omega * omega * d0 * d0);
  return a < 0.0 ? Branch::Lower : Branch::Upper;
}

double tau_bound(const Profile& profile, std::span<const double> grid) {
  if (!profile.is_scaled()) throw DomainError("tau_bound: undefined for the unscaled profile");
  const double r1 = profile.r1_star();
  // Limit r -> r1*+: d_tilde -> 1 and d -> d_hat(r1*). Limit r -> inf: 0.
  double sup = std::max(0.0, std::arg(d_hat_inner(profile)));
  for (double r : grid) {
    if (r <= r1) continue;
    const auto p = scaling_at(profile, r);
    sup = std::max(sup, std::arg(p.d) - std::arg(p.d_tilde));
  }
  if (sup >= kPi / 2.0 - 1e-9) {
    throw DomainError("tau_bound: sup arg(d/d_tilde) reaches pi/2");
  }
  return sup;
}

double tau_bound(const Profile& profile) {
  const double r1 = profile.r1_star();
  std::vector<double> grid;
  // Dense near r1* where the supremum of smooth profiles sits, then geometric.
  for (int k = 1; k <= 4000; ++k) grid.push_back(r1 * (1.0 + 4.0 * k / 4000.0));
  for (int k = 1; k <= 2000; ++k) grid.push_back(r1 * 5.0 * std::pow(200.0, k / 2000.0));
  return tau_bound(profile, grid);
}

std::string_view to_string(MapKind kind) {
  return kind == MapKind::Log ? "log" : "power-beta";
}

MapKind map_kind_from_string(std::string_view name) {
  if (name == "log") return MapKind::Log;
  if (name == "power-beta" || name == "beta") return MapKind::PowerBeta;
  throw ValidationError("map.kind: unknown map kind '" + std::string(name) + "'");
}

void validate_exact_combination(const ExactMapSpec& map, const Profile& profile) {
  if (!(map.r2_star > profile.r1_star())) {
    throw ValidationError("map.r2_star: must exceed profile.r1_star");
  }
  if (map.kind == MapKind::PowerBeta && !(map.beta > -2.0 / 3.0 && map.beta < 0.0)) {
    throw ValidationError("map.beta: must lie in (-2/3, 0)");
  }
  if (profile.kind() != ProfileKind::Affine && profile.kind() != ProfileKind::SmoothChi2) {
    throw UnsupportedCombination("exact variant: requires an affine or smooth-chi2 profile, got " +
                                 std::string(to_string(profile.kind())));
  }
}

double exact_radius(const ExactMapSpec& map, double r1, double r, double* gamma) {
  if (!(r < map.r2_star)) throw DomainError("exact map: r must be below r2_star");
  if (r <= r1) {
    if (gamma) *gamma = 1.0;
    return r;
  }
  const double gap = map.r2_star - r;
  const double width = map.r2_star - r1;
  if (map.kind == MapKind::Log) {
    if (gamma) *gamma = 1.0 / gap;
    return -(std::log(gap) - std::log(width)) + r1;
  }
  if (gamma) *gamma = -map.beta * std::pow(gap, map.beta - 1.0);
  return std::pow(gap, map.beta) - std::pow(width, map.beta) + r1;
}

double exact_radius_inverse(const ExactMapSpec& map, double r1, double r_e) {
  if (r_e <= r1) return r_e;
  const double width = map.r2_star - r1;
  if (map.kind == MapKind::Log) return map.r2_star - width * std::exp(-(r_e - r1));
  const double base = r_e - r1 + std::pow(width, map.beta);
  return map.r2_star - std::pow(base, 1.0 / map.beta);
}

ExactPoint exact_map_at(const ExactMapSpec& map, const Profile& profile, double r) {
  if (!(r > 0.0)) throw DomainError("exact_map_at: r must be positive");
  ExactPoint p;
  p.r = r;
  p.r_e = exact_radius(map, profile.r1_star(), r, &p.gamma_e);
  p.gamma_tilde_e = p.r_e / r;
  const auto s = scaling_at(profile, p.r_e);
  p.d_tilde_e = s.d_tilde;
  p.d_e = s.d;
  p.d_hat_e = s.d_hat;
  return p;
}

}  // namespace resonalens
