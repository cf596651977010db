#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "resonalens/radialfem.hpp"
#include "resonalens/types.hpp"

namespace resonalens {

struct Eigenpair {
  Complex lambda;
  CVector vector;
  /// ||(S - lambda M) x|| / ((||S|| + |lambda| ||M||) ||x||), Frobenius norms.
  double residual = 0.0;
};

/// All eigenpairs of the pencil (S, M) through M^{-1} S. Throws SolverError
/// when M is numerically singular.
std::vector<Eigenpair> solve_gevp(const CMatrix& S, const CMatrix& M);

/// Which half-plane Re(i omega d0) < 0 (lower) or > 0 (upper) is requested.
enum class Sector { Lower, Upper };
enum class SectorLabel { Lower, Upper, EssentialAdjacent };

std::string_view to_string(Sector sector);
std::string_view to_string(SectorLabel label);
Sector sector_from_string(std::string_view name);

struct Window {
  double re_min = -std::numeric_limits<double>::infinity();
  double re_max = std::numeric_limits<double>::infinity();
  double im_min = -std::numeric_limits<double>::infinity();
  double im_max = std::numeric_limits<double>::infinity();

  bool contains(Complex z) const {
    return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max;
  }
};

struct SpectrumEntry {
  Complex omega;
  Complex lambda;
  /// G-normalized: sqrt(x* G x) = 1.
  CVector eigvec;
  double residual = 0.0;
  SectorLabel sector = SectorLabel::EssentialAdjacent;
};

struct SpectrumResult {
  int n = 0;
  std::vector<SpectrumEntry> entries;
};

struct ResonanceOptions {
  Sector sector = Sector::Lower;
  Window window;
  /// Minimal angle, in radians, between i omega d0 and the imaginary axis.
  double margin = 0.05;
  /// Entries with a larger residual are dropped.
  double residual_tolerance = 1e-8;
  /// Disables the sector and margin filter; d0 = 1 is used for the labels
  /// when the profile is unscaled.
  bool verification = false;
};

/// Sector label of omega for the given d0 and margin.
SectorLabel classify(Complex omega, Complex d0, double margin);

/// Keeps the entries with the requested label inside the window.
std::vector<SpectrumEntry> filter_sector(std::span<const SpectrumEntry> entries, Sector sector,
                                         const Window& window);

/// Eigenvalues of the pencil mapped to both square roots and filtered.
/// Entries are sorted by real part, then imaginary part.
SpectrumResult resonances(const ModeMatrices& matrices, const ResonanceOptions& options = {});

struct OracleMatch {
  Complex oracle;
  std::optional<Complex> matched;
  /// Index into the computed list.
  std::optional<std::size_t> index;
  double error = std::numeric_limits<double>::infinity();
};

struct MatchResult {
  std::vector<OracleMatch> matches;
  /// Indices of computed values left unmatched.
  std::vector<std::size_t> spurious;
  std::size_t missed() const;
};

/// Greedy nearest matching within `radius`: the globally closest pair is
/// matched first.
MatchResult match_to_oracle(std::span<const Complex> computed, std::span<const Complex> oracle,
                            double radius);
MatchResult match_to_oracle(const SpectrumResult& result, std::span<const Complex> oracle,
                            double radius);

enum class RateModel { Algebraic, Exponential };
std::string_view to_string(RateModel model);

/// err ~ C param^s (algebraic) or err ~ C exp(-s param) (exponential).
struct RateFit {
  RateModel model = RateModel::Algebraic;
  /// Model exponent s.
  double slope = 0.0;
  /// Raw regression slope of log(err), negative for decaying errors.
  double log_slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

RateFit fit_rate(std::span<const std::pair<double, double>> points, RateModel model);

}  // namespace resonalens
