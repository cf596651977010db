#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "resonalens/errors.hpp"
#include "resonalens/profiles.hpp"

using namespace resonalens;

namespace {

Profile affine(double a0 = 1.0) { return make_profile({ProfileKind::Affine, a0, 1, 1.0}); }
Profile power(double a0, int m) { return make_profile({ProfileKind::Power, a0, m, 1.0}); }
Profile smooth(double a0) { return make_profile({ProfileKind::SmoothChi2, a0, 1, 1.0}); }

std::string what_of(const ProfileSpec& spec) {
  try {
    make_profile(spec);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("make_profile closed forms") {
  CHECK(affine().alpha_tilde(2.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(power(1.0, 2).alpha_tilde(2.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(affine().alpha_tilde(0.5) == 0.0);
  CHECK(smooth(3.0).alpha_tilde(2.5) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(smooth(3.0).r2() == doctest::Approx(2.0));
}

TEST_CASE("make_profile rejects bad fields by name") {
  CHECK(what_of({ProfileKind::Power, 1.0, 0, 1.0}).find("profile.m") != std::string::npos);
  CHECK(what_of({ProfileKind::Affine, -1.0, 1, 1.0}).find("profile.alpha0") != std::string::npos);
  CHECK(what_of({ProfileKind::Affine, 1.0, 1, 0.0}).find("profile.r1_star") != std::string::npos);
  CHECK(what_of({ProfileKind::SmoothChi2, 1.0, 1, 1.0, 0.5}).find("profile.r2") !=
        std::string::npos);
  CHECK_THROWS_AS(make_profile({ProfileKind::Unscaled, 1.0, 1, 1.0}), ValidationError);
  ProfileSpec u{ProfileKind::Unscaled, 1.0, 1, 1.0};
  u.allow_unscaled = true;
  CHECK_NOTHROW(make_profile(u));
  CHECK_THROWS_AS(profile_kind_from_string("gaussian"), ValidationError);
  CHECK(profile_kind_from_string("smooth-chi2") == ProfileKind::SmoothChi2);
}

TEST_CASE("chi2 values") {
  CHECK(chi2(-1.0) == 0.0);
  CHECK(chi2(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(chi2(2.0) == 1.0);
  CHECK(std::abs(chi2(0.0)) <= 1e-12);
  CHECK(std::abs(chi2(1.0) - 1.0) <= 1e-12);
  CHECK(chi1(1e-4) == 0.0);
  CHECK(chi1(-1.0) == 0.0);
}

TEST_CASE("chi2 is a monotone bijection of [0,1]") {
  double prev = chi2(0.0);
  for (int k = 1; k <= 1000; ++k) {
    const double v = chi2(k / 1000.0);
    CHECK(v >= prev);
    prev = v;
  }
  for (double t : {0.1, 0.3, 0.7, 0.9}) {
    const double fd = (chi2(t + 1e-6) - chi2(t - 1e-6)) / 2e-6;
    CHECK(chi2_derivative(t) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("validate_assumptions on built-in kinds") {
  const auto p = affine();
  std::vector<double> grid;
  for (int k = 0; k <= 10000; ++k) grid.push_back(k * 0.01);
  const auto rep = validate_assumptions(p, grid);
  for (const auto& item : rep.items) {
    INFO(item.id << ": " << item.detail);
    CHECK(item.pass);
  }
  CHECK(validate_assumptions(smooth(3.0), default_validation_grid(1.0)).all_pass());
  CHECK(validate_assumptions(power(1.0, 2), default_validation_grid(1.0)).all_pass());
}

TEST_CASE("validate_assumptions flags the unscaled profile") {
  ProfileSpec u{ProfileKind::Unscaled, 1.0, 1, 1.0};
  u.allow_unscaled = true;
  const auto rep = validate_assumptions(make_profile(u), default_validation_grid(1.0));
  CHECK_FALSE(rep.all_pass());
  CHECK_FALSE(rep.item(assumption::kPositiveOutside).pass);
  CHECK(rep.item(assumption::kVanishesInside).pass);
}

TEST_CASE("validate_assumptions finds a decreasing table") {
  SampledProfile table;
  table.r1_star = 1.0;
  table.alpha_tilde = [](double r) {
    if (r <= 1.0) return 0.0;
    if (r <= 3.0) return r - 1.0;
    return std::max(1.0, 2.0 - 0.5 * (r - 3.0));
  };
  std::vector<double> grid;
  for (int k = 0; k <= 2000; ++k) grid.push_back(k * 0.005);
  const auto rep = validate_assumptions(table, grid);
  const auto& mono = rep.item(assumption::kNonDecreasing);
  CHECK_FALSE(mono.pass);
  REQUIRE(mono.witness.has_value());
  CHECK(*mono.witness > 3.0);
  CHECK(*mono.witness < 5.0);
}

TEST_CASE("monotonicity on random pairs") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(0.0, 50.0);
  const std::vector<Profile> kinds{affine(2.0), power(1.0, 1), power(0.5, 3), smooth(3.0)};
  for (const auto& p : kinds) {
    for (int k = 0; k < 2000; ++k) {
      double a = dist(rng), b = dist(rng);
      if (a > b) std::swap(a, b);
      CHECK(p.alpha_tilde(b) >= p.alpha_tilde(a));
    }
  }
}

TEST_CASE("power kind matches the closed form") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(1.0, 20.0);
  for (int m : {1, 2, 3, 5}) {
    const auto p = power(0.7, m);
    for (int k = 0; k < 200; ++k) {
      const double r = dist(rng);
      const double expect = 0.7 * std::pow(r - 1.0, m) / r;
      CHECK(std::abs(p.alpha_tilde(r) - expect) <= 1e-13 * std::abs(expect));
    }
  }
}

TEST_CASE("alpha is r alpha_tilde' + alpha_tilde") {
  for (const auto& p : {affine(1.5), power(1.0, 2), smooth(3.0)}) {
    for (double r : {1.3, 1.7, 2.4, 6.0}) {
      const double fd = (p.alpha_tilde(r + 1e-6) - p.alpha_tilde(r - 1e-6)) / 2e-6;
      CHECK(p.alpha(r) == doctest::Approx(r * fd + p.alpha_tilde(r)).epsilon(1e-7));
    }
  }
}

TEST_CASE("kinks") {
  CHECK(affine().kinks() == std::vector<double>{1.0});
  CHECK(smooth(3.0).kinks() == std::vector<double>{1.0, 2.0});
}
