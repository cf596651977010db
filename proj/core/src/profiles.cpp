#include "resonalens/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "resonalens/errors.hpp"

namespace resonalens {

std::string_view to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::Affine:
      return "affine";
    case ProfileKind::Power:
      return "power";
    case ProfileKind::SmoothChi2:
      return "smooth-chi2";
    case ProfileKind::Unscaled:
      return "unscaled";
  }
  return "unknown";
}

ProfileKind profile_kind_from_string(std::string_view name) {
  if (name == "affine") return ProfileKind::Affine;
  if (name == "power") return ProfileKind::Power;
  if (name == "smooth-chi2" || name == "smooth") return ProfileKind::SmoothChi2;
  if (name == "unscaled") return ProfileKind::Unscaled;
  throw ValidationError("profile.kind: unknown profile kind '" + std::string(name) + "'");
}

double chi1(double t) {
  if (t <= 0.0) return 0.0;
  // exp underflows to zero for t below ~1.4e-3, which is the correct limit.
  return std::exp(-1.0 / t);
}

double chi2(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = chi1(t);
  const double b = chi1(1.0 - t);
  return a / (a + b);
}

double chi2_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double c = chi2(t);
  return c * (1.0 - c) * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t)));
}

Profile::Profile(ProfileSpec spec) : spec_(spec) {
  r2_ = spec_.kind == ProfileKind::SmoothChi2 ? spec_.r2 : 0.0;
}

Profile make_profile(const ProfileSpec& spec_in) {
  ProfileSpec spec = spec_in;
  if (!(spec.r1_star > 0.0) || !std::isfinite(spec.r1_star)) {
    throw ValidationError("profile.r1_star: must be a finite value > 0");
  }
  if (spec.kind != ProfileKind::Unscaled && (!(spec.alpha0 > 0.0) || !std::isfinite(spec.alpha0))) {
    throw ValidationError("profile.alpha0: must be a finite value > 0");
  }
  if (spec.kind == ProfileKind::Power && spec.m < 1) {
    throw ValidationError("profile.m: power profiles need m >= 1");
  }
  if (spec.kind == ProfileKind::SmoothChi2) {
    if (spec.r2 == 0.0) spec.r2 = spec.r1_star + 1.0;
    if (!(spec.r2 > spec.r1_star)) {
      throw ValidationError("profile.r2: must exceed profile.r1_star");
    }
  }
  if (spec.kind == ProfileKind::Unscaled && !spec.allow_unscaled) {
    throw ValidationError(
        "profile.kind: the unscaled profile is accepted only in verification mode");
  }
  Profile profile(spec);
  if (profile.is_scaled()) {
    const auto grid = default_validation_grid(spec.r1_star);
    const auto report = validate_assumptions(profile, grid);
    if (!report.all_pass()) {
      for (const auto& item : report.items) {
        if (!item.pass) {
          throw ValidationError("profile: assumption '" + item.id + "' violated: " + item.detail);
        }
      }
    }
  }
  return profile;
}

double Profile::alpha_tilde(double r) const {
  const double r1 = spec_.r1_star;
  if (r <= r1) return 0.0;
  switch (spec_.kind) {
    case ProfileKind::Affine:
      return spec_.alpha0 * (1.0 - r1 / r);
    case ProfileKind::Power:
      return spec_.alpha0 * std::pow(r - r1, spec_.m) / r;
    case ProfileKind::SmoothChi2:
      return spec_.alpha0 * chi2((r - r1) / (r2_ - r1));
    case ProfileKind::Unscaled:
      return 0.0;
  }
  return 0.0;
}

double Profile::alpha_tilde_derivative(double r) const {
  const double r1 = spec_.r1_star;
  if (r <= r1) return 0.0;
  switch (spec_.kind) {
    case ProfileKind::Affine:
      return spec_.alpha0 * r1 / (r * r);
    case ProfileKind::Power: {
      const double s = r - r1;
      const int m = spec_.m;
      return spec_.alpha0 * (m * std::pow(s, m - 1) * r - std::pow(s, m)) / (r * r);
    }
    case ProfileKind::SmoothChi2: {
      const double w = r2_ - r1;
      return spec_.alpha0 * chi2_derivative((r - r1) / w) / w;
    }
    case ProfileKind::Unscaled:
      return 0.0;
  }
  return 0.0;
}

double Profile::alpha(double r) const {
  const double r1 = spec_.r1_star;
  if (r <= r1) return 0.0;
  switch (spec_.kind) {
    case ProfileKind::Affine:
      return spec_.alpha0;
    case ProfileKind::Power:
      return spec_.m * spec_.alpha0 * std::pow(r - r1, spec_.m - 1);
    case ProfileKind::SmoothChi2:
      return r * alpha_tilde_derivative(r) + alpha_tilde(r);
    case ProfileKind::Unscaled:
      return 0.0;
  }
  return 0.0;
}

double Profile::alpha_right_limit() const {
  switch (spec_.kind) {
    case ProfileKind::Affine:
      return spec_.alpha0;
    case ProfileKind::Power:
      return spec_.m == 1 ? spec_.alpha0 : 0.0;
    case ProfileKind::SmoothChi2:
    case ProfileKind::Unscaled:
      return 0.0;
  }
  return 0.0;
}

std::vector<double> Profile::kinks() const {
  if (!is_scaled()) return {};
  std::vector<double> k{spec_.r1_star};
  if (spec_.kind == ProfileKind::SmoothChi2) k.push_back(r2_);
  return k;
}

bool AssumptionReport::all_pass() const {
  return std::all_of(items.begin(), items.end(), [](const AssumptionItem& i) { return i.pass; });
}

const AssumptionItem& AssumptionReport::item(std::string_view id) const {
  for (const auto& i : items) {
    if (i.id == id) return i;
  }
  throw std::out_of_range("AssumptionReport: no item '" + std::string(id) + "'");
}

std::vector<double> default_validation_grid(double r1_star) {
  std::vector<double> grid;
  // [0, r1*] coarse, (r1*, 10 r1*] fine, then geometric to 1000 r1*.
  for (int k = 0; k <= 50; ++k) grid.push_back(r1_star * k / 50.0);
  for (int k = 1; k <= 1800; ++k) grid.push_back(r1_star * (1.0 + 9.0 * k / 1800.0));
  for (int k = 1; k <= 400; ++k) grid.push_back(r1_star * 10.0 * std::pow(100.0, k / 400.0));
  return grid;
}

namespace {

std::string format_point(double r) {
  std::ostringstream os;
  os.precision(12);
  os << r;
  return os.str();
}

// Bisects [a, b] towards the half carrying the larger jump down to width
// ~1e-12 (relative). A jump is reported when it exceeds `tol` at the final
// width and has not shrunk with the bracket: a continuous function's
// increment falls in proportion to the width (1024x over the last ten
// halvings), which keeps steep but smooth coefficients from being flagged.
std::optional<double> find_discontinuity(const std::function<double(double)>& f, double a, double b,
                                         double tol) {
  double fa = f(a);
  double fb = f(b);
  if (!(std::abs(fb - fa) > tol)) return std::nullopt;
  std::vector<double> jumps{std::abs(fb - fa)};
  for (int it = 0; it < 60 && (b - a) > 1e-12 * std::max(1.0, std::abs(b)); ++it) {
    const double c = 0.5 * (a + b);
    const double fc = f(c);
    if (std::abs(fc - fa) >= std::abs(fb - fc)) {
      b = c;
      fb = fc;
    } else {
      a = c;
      fa = fc;
    }
    jumps.push_back(std::abs(fb - fa));
  }
  const double last = jumps.back();
  const double earlier = jumps[jumps.size() > 10 ? jumps.size() - 11 : 0];
  if (last > tol && last > 0.5 * earlier) return 0.5 * (a + b);
  return std::nullopt;
}

AssumptionReport validate_impl(const std::function<double(double)>& at,
                               const std::function<double(double)>& alpha, double r1,
                               std::span<const double> grid, const ValidationTolerances& tol) {
  if (grid.size() < 2) throw ValidationError("validate_assumptions: grid needs >= 2 points");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) {
      throw ValidationError("validate_assumptions: grid must be strictly increasing");
    }
  }

  AssumptionReport report;
  auto add = [&](std::string_view id) -> AssumptionItem& {
    report.items.push_back(AssumptionItem{std::string(id), true, std::nullopt, {}});
    return report.items.back();
  };
  auto fail = [](AssumptionItem& item, double r, std::string detail) {
    if (!item.pass) return;
    item.pass = false;
    item.witness = r;
    item.detail = std::move(detail) + " at r=" + format_point(r);
  };

  auto& inside = add(assumption::kVanishesInside);
  for (double r : grid) {
    if (r <= r1 && at(r) != 0.0) fail(inside, r, "alpha_tilde is nonzero inside r1*");
  }

  auto& cont = add(assumption::kContinuous);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (auto where = find_discontinuity(at, grid[k - 1], grid[k], tol.jump_tolerance)) {
      fail(cont, *where, "alpha_tilde jumps");
      break;
    }
  }

  auto& positive = add(assumption::kPositiveOutside);
  for (double r : grid) {
    if (r > r1 && !(at(r) > 0.0)) {
      fail(positive, r, "alpha_tilde is not positive beyond r1*");
      break;
    }
  }

  auto& monotone = add(assumption::kNonDecreasing);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double a = at(grid[k - 1]);
    const double b = at(grid[k]);
    if (b < a - 1e-13 * std::max(1.0, std::abs(a))) {
      fail(monotone, grid[k], "alpha_tilde decreases");
      break;
    }
  }

  auto& smooth = add(assumption::kTwiceDifferentiable);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double r = grid[k];
    if (r <= r1) continue;
    const double h = 1e-4 * std::min(r - r1, std::max(1.0, r) * 1e-2);
    if (!(h > 0.0)) continue;
    const double fm = at(r - h), f0 = at(r), fp = at(r + h);
    const double d1 = (fp - fm) / (2.0 * h);
    const double d2 = (fp - 2.0 * f0 + fm) / (h * h);
    if (!std::isfinite(d1) || !std::isfinite(d2) || !std::isfinite(alpha(r))) {
      fail(smooth, r, "non-finite derivative");
      break;
    }
  }
  if (smooth.pass) {
    // alpha carries the first derivative; it must be continuous on (r1*, inf).
    for (std::size_t k = 1; k < grid.size(); ++k) {
      if (grid[k - 1] <= r1) continue;
      if (auto where = find_discontinuity(alpha, grid[k - 1], grid[k], tol.jump_tolerance)) {
        fail(smooth, *where, "first derivative jumps");
        break;
      }
    }
  }

  // Tail limits, sampled on [100 r1*, 1000 r1*].
  std::vector<double> tail;
  for (int k = 0; k <= 20; ++k) tail.push_back(r1 * 100.0 * std::pow(10.0, k / 20.0));

  auto d_tilde = [&](double r) { return std::complex<double>(1.0, at(r)); };
  auto d_full = [&](double r) { return std::complex<double>(1.0, alpha(r)); };

  auto& align = add(assumption::kTailPhaseAlignment);
  double prev = std::numeric_limits<double>::infinity();
  for (double r : tail) {
    const auto dt = d_tilde(r);
    const auto d = d_full(r);
    const double q = std::abs(dt * std::abs(d) / (std::abs(dt) * d) - 1.0);
    if (!std::isfinite(q) || q > prev + 1e-14) {
      fail(align, r, "phase mismatch of d_tilde and d does not decrease");
      break;
    }
    prev = q;
  }
  if (align.pass && prev > tol.tail_alignment_max) {
    fail(align, tail.back(), "phase mismatch of d_tilde and d does not vanish");
  }

  auto& deriv = add(assumption::kTailPhaseDerivative);
  auto phase_rate = [&](auto&& fn, double r) {
    const double h = 1e-3 * r;
    const auto up = fn(r + h);
    const auto dn = fn(r - h);
    return std::abs((up / std::abs(up) - dn / std::abs(dn)) / (2.0 * h));
  };
  double prev_rate = std::numeric_limits<double>::infinity();
  for (double r : tail) {
    const double rate = std::max(phase_rate(d_tilde, r), phase_rate(d_full, r));
    if (!std::isfinite(rate) || rate > prev_rate * (1.0 + 1e-6) + 1e-14) {
      fail(deriv, r, "phase derivative does not decrease");
      break;
    }
    prev_rate = rate;
  }
  if (deriv.pass && prev_rate > tol.tail_derivative_max) {
    fail(deriv, tail.back(), "phase derivative does not vanish");
  }
  return report;
}

}  // namespace

AssumptionReport validate_assumptions(const Profile& profile, std::span<const double> grid,
                                      const ValidationTolerances& tol) {
  return validate_impl([&](double r) { return profile.alpha_tilde(r); },
                       [&](double r) { return profile.alpha(r); }, profile.r1_star(), grid, tol);
}

AssumptionReport validate_assumptions(const SampledProfile& profile, std::span<const double> grid,
                                      const ValidationTolerances& tol) {
  if (!profile.alpha_tilde) throw ValidationError("validate_assumptions: alpha_tilde is empty");
  std::function<double(double)> alpha = profile.alpha;
  if (!alpha) {
    alpha = [f = profile.alpha_tilde, r1 = profile.r1_star](double r) {
      if (r <= r1) return 0.0;
      const double h = 1e-6 * std::max(1.0, r);
      const double lo = std::max(r - h, r1);
      return r * (f(r + h) - f(lo)) / (r + h - lo) + f(r);
    };
  }
  return validate_impl(profile.alpha_tilde, alpha, profile.r1_star, grid, tol);
}

}  // namespace resonalens
