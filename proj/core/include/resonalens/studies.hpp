#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "resonalens/config.hpp"
#include "resonalens/spectra.hpp"
#include "resonalens/tcert.hpp"
#include "resonalens/types.hpp"

namespace resonalens {

/// One retained eigenvalue at one sweep point.
struct ReportRow {
  std::string study;
  int n = 0;
  std::string param_name;
  double param_value = 0.0;
  Complex omega;
  /// Set when the eigenvalue was matched to a reference value.
  std::optional<Complex> oracle;
  double error_abs = 0.0;
  double residual = 0.0;
  int dofs = 0;
  double runtime_ms = 0.0;
};

/// Convergence summary of one tracked quantity (a reference resonance, the
/// commutator norm, or the certificate set).
struct TrackedSummary {
  std::string study;
  int n = 0;
  std::string tracked;
  std::optional<Complex> oracle;
  /// (sweep parameter, error) in sweep order; unmatched points are absent.
  std::vector<std::pair<double, double>> series;
  std::optional<RateFit> fit;
  std::size_t missed = 0;
  std::size_t spurious = 0;
  /// Error at the last sweep point, or NaN when it was missed.
  double final_error = 0.0;
  bool decreasing = false;
  /// "pass", "fail" or "-" when no checks are configured.
  std::string check = "-";
  std::string check_detail;
};

struct CertificateRow {
  int n = 0;
  std::string mesh;  // "base" or "refined"
  int dofs = 0;
  Complex omega;
  /// "ok" or the domain error message.
  std::string status;
  std::optional<CoercivityCertificate> certificate;
};

struct CommutatorRow {
  int n = 0;
  double h = 0.0;
  int elements = 0;
  int dofs = 0;
  double norm = 0.0;
  double gap = 0.0;
  int fit_degree = 0;
  /// Certificate with the smoothed multiplier at the symbol frequency.
  std::optional<CoercivityCertificate> smoothed;
};

struct ConvergenceReport {
  std::string study;
  std::vector<ReportRow> rows;
  std::vector<TrackedSummary> summary;
  std::vector<CertificateRow> certificates;
  std::vector<CommutatorRow> commutator;

  bool checks_failed() const;
};

struct RunOptions {
  int jobs = 1;
  /// Directory for matrix exports when the config requests them.
  std::optional<std::filesystem::path> export_dir;
};

/// Runs the sweep. Errors keep their type and gain the sweep point as context.
ConvergenceReport run_study(const StudyConfig& config, const RunOptions& options = {});

/// Fills TrackedSummary::check from the config thresholds.
void apply_checks(ConvergenceReport& report, const CheckSpec& check);

/// Writes rows.csv, summary.csv, the *.dat series, and certificates.csv or
/// commutator.csv for those studies. Overwrites existing files.
void emit_report(const ConvergenceReport& report, const std::filesystem::path& dir);

/// The fixed rows.csv header.
inline constexpr const char* kRowsHeader =
    "study,n,param_name,param_value,omega_re,omega_im,oracle_re,oracle_im,error_abs,residual,"
    "dofs,runtime_ms";

/// 17 significant digits, "nan" and "inf" spelled out.
std::string format_real(double v);

}  // namespace resonalens
