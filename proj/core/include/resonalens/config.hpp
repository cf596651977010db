#pragma once

#include <complex>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "resonalens/profiles.hpp"
#include "resonalens/scaling.hpp"
#include "resonalens/spectra.hpp"
#include "resonalens/types.hpp"

namespace resonalens {

enum class StudyKind { Truncation, Mesh, Diagonal, Exact, Commutator, Coercivity, VerifyAnnulus };

std::string_view to_string(StudyKind kind);
StudyKind study_kind_from_string(std::string_view name);

/// Smoothed-symbol parameters of the commutator study.
struct SymbolConfig {
  double epsilon = 0.05;
  double r_hat1 = 0.0;
  double r_hat2 = 0.0;
  /// Frequency that fixes the branch; defaults to the first oracle
  /// resonance of the mode, or 1 - i when there is none.
  std::optional<Complex> omega;
};

/// Optional acceptance thresholds evaluated by `run --check`.
struct CheckSpec {
  std::optional<double> slope_min;
  std::optional<double> slope_max;
  std::optional<double> log_slope_max;
  std::optional<double> r_squared_min;
  std::optional<double> final_error_max;
  /// Minimal ratio first error / last error.
  std::optional<double> reduction_min;
  bool decreasing = false;
  bool no_spurious = false;
  bool no_missed = false;
  bool certificates_pass = false;

  bool empty() const;
};

/// Normalized study description; see validate_config for the file format.
struct StudyConfig {
  StudyKind study = StudyKind::Truncation;
  ProfileSpec profile;
  double r_b = 1.0;
  std::vector<int> modes{0};
  int degree = 2;
  /// Truncation radii: swept (truncation, diagonal) or a single fixed value.
  std::vector<double> R;
  /// Mesh widths: swept (mesh, diagonal, exact, commutator, verify-annulus)
  /// or a single fixed value.
  std::vector<double> h;
  std::optional<ExactMapSpec> map;
  Sector sector = Sector::Lower;
  /// Unset means: boxes around the oracle values.
  std::optional<Window> window;
  double margin = 0.05;
  double match_radius = 0.05;
  /// Number of annulus eigenvalues tracked by verify-annulus.
  int count = 3;
  SymbolConfig symbol;
  /// Coercivity sample frequencies.
  std::vector<Complex> omegas;
  /// Also certify on one uniform refinement.
  bool refine = true;
  CheckSpec check;
  /// Write measured wall times; off keeps outputs byte-identical.
  bool timing = false;
  /// Export the assembled matrices of every sweep point as triplets.
  bool export_matrices = false;
};

/// Parses TOML text and checks every invariant. All violations are reported
/// together as "key.path: message" lines in a ValidationError, or in an
/// UnsupportedCombination when one of them is an unsupported pairing.
StudyConfig parse_config(std::string_view text, std::string_view source = "<config>");
StudyConfig validate_config(const std::filesystem::path& path);

/// Number of elements for a nominal width h on [a, b].
int elements_for(double a, double b, double h);

}  // namespace resonalens
