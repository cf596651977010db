#include "resonalens/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "resonalens/errors.hpp"
#include "resonalens/scaling.hpp"

namespace resonalens {

std::vector<Eigenpair> solve_gevp(const CMatrix& S, const CMatrix& M) {
  if (S.rows() != S.cols() || M.rows() != M.cols() || S.rows() != M.rows()) {
    throw ValidationError("solve_gevp: S and M must be square and of equal size");
  }
  const Eigen::Index N = S.rows();
  std::vector<Eigenpair> out;
  if (N == 0) return out;
  Eigen::PartialPivLU<CMatrix> lu(M);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) {
    throw SolverError("solve_gevp: mass matrix is numerically singular (rcond " +
                      std::to_string(rcond) + ")");
  }
  const CMatrix A = lu.solve(S);
  Eigen::ComplexEigenSolver<CMatrix> es(A, true);
  if (es.info() != Eigen::Success) throw SolverError("solve_gevp: eigenvalue iteration failed");
  const double ns = S.norm(), nm = M.norm();
  out.reserve(N);
  for (Eigen::Index k = 0; k < N; ++k) {
    Eigenpair e;
    e.lambda = es.eigenvalues()(k);
    e.vector = es.eigenvectors().col(k);
    const double scale = (ns + std::abs(e.lambda) * nm) * e.vector.norm();
    e.residual = (S * e.vector - e.lambda * (M * e.vector)).norm() / scale;
    out.push_back(std::move(e));
  }
  return out;
}

std::string_view to_string(Sector sector) { return sector == Sector::Lower ? "lower" : "upper"; }

std::string_view to_string(SectorLabel label) {
  switch (label) {
    case SectorLabel::Lower: return "lower";
    case SectorLabel::Upper: return "upper";
    case SectorLabel::EssentialAdjacent: break;
  }
  return "essential-adjacent";
}

Sector sector_from_string(std::string_view name) {
  if (name == "lower") return Sector::Lower;
  if (name == "upper") return Sector::Upper;
  throw ValidationError("unknown sector '" + std::string(name) + "' (expected lower or upper)");
}

SectorLabel classify(Complex omega, Complex d0, double margin) {
  const double theta = std::arg(kI * omega * d0);
  if (std::abs(theta - kPi / 2) < margin || std::abs(theta + kPi / 2) < margin) {
    return SectorLabel::EssentialAdjacent;
  }
  return std::abs(theta) > kPi / 2 ? SectorLabel::Lower : SectorLabel::Upper;
}

std::vector<SpectrumEntry> filter_sector(std::span<const SpectrumEntry> entries, Sector sector,
                                         const Window& window) {
  const SectorLabel want = sector == Sector::Lower ? SectorLabel::Lower : SectorLabel::Upper;
  std::vector<SpectrumEntry> out;
  for (const auto& e : entries) {
    if (e.sector == want && window.contains(e.omega)) out.push_back(e);
  }
  return out;
}

SpectrumResult resonances(const ModeMatrices& mm, const ResonanceOptions& options) {
  const Complex d0 = mm.profile.is_scaled() ? d_zero(mm.profile) : Complex(1.0, 0.0);
  if (!mm.profile.is_scaled() && !options.verification) {
    throw DomainError("resonances: the unscaled profile needs verification mode");
  }
  SpectrumResult result;
  result.n = mm.n;
  for (auto& pair : solve_gevp(mm.S, mm.M)) {
    if (!(pair.residual <= options.residual_tolerance)) continue;
    const double gnorm = std::sqrt(std::abs(pair.vector.dot(mm.G * pair.vector)));
    const CVector x = pair.vector / gnorm;
    const Complex root = std::sqrt(pair.lambda);
    for (Complex w : {root, -root}) {
      SpectrumEntry e{w, pair.lambda, x, pair.residual, classify(w, d0, options.margin)};
      if (!options.window.contains(w)) continue;
      if (!options.verification) {
        const auto want = options.sector == Sector::Lower ? SectorLabel::Lower : SectorLabel::Upper;
        if (e.sector != want) continue;
      }
      result.entries.push_back(std::move(e));
    }
  }
  std::sort(result.entries.begin(), result.entries.end(),
            [](const SpectrumEntry& a, const SpectrumEntry& b) {
              if (a.omega.real() != b.omega.real()) return a.omega.real() < b.omega.real();
              return a.omega.imag() < b.omega.imag();
            });
  return result;
}

std::size_t MatchResult::missed() const {
  return static_cast<std::size_t>(
      std::count_if(matches.begin(), matches.end(), [](const OracleMatch& m) { return !m.matched; }));
}

MatchResult match_to_oracle(std::span<const Complex> computed, std::span<const Complex> oracle,
                            double radius) {
  if (!(radius > 0.0)) throw ValidationError("match_to_oracle: radius must be > 0");
  struct Candidate {
    double dist;
    std::size_t o, c;
  };
  std::vector<Candidate> cands;
  for (std::size_t o = 0; o < oracle.size(); ++o) {
    for (std::size_t c = 0; c < computed.size(); ++c) {
      const double d = std::abs(computed[c] - oracle[o]);
      if (d <= radius) cands.push_back({d, o, c});
    }
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& a, const Candidate& b) { return a.dist < b.dist; });
  MatchResult r;
  r.matches.resize(oracle.size());
  for (std::size_t o = 0; o < oracle.size(); ++o) r.matches[o].oracle = oracle[o];
  std::vector<bool> used(computed.size(), false);
  for (const auto& cd : cands) {
    if (used[cd.c] || r.matches[cd.o].matched) continue;
    used[cd.c] = true;
    r.matches[cd.o].matched = computed[cd.c];
    r.matches[cd.o].index = cd.c;
    r.matches[cd.o].error = cd.dist;
  }
  for (std::size_t c = 0; c < computed.size(); ++c) {
    if (!used[c]) r.spurious.push_back(c);
  }
  return r;
}

MatchResult match_to_oracle(const SpectrumResult& result, std::span<const Complex> oracle,
                            double radius) {
  std::vector<Complex> w;
  w.reserve(result.entries.size());
  for (const auto& e : result.entries) w.push_back(e.omega);
  return match_to_oracle(w, oracle, radius);
}

std::string_view to_string(RateModel model) {
  return model == RateModel::Algebraic ? "algebraic" : "exponential";
}

RateFit fit_rate(std::span<const std::pair<double, double>> points, RateModel model) {
  if (points.size() < 3) throw ValidationError("fit_rate: need at least 3 points");
  std::vector<double> x, y;
  for (const auto& [param, err] : points) {
    if (!(err > 0.0)) throw ValidationError("fit_rate: errors must be positive");
    if (model == RateModel::Algebraic && !(param > 0.0)) {
      throw ValidationError("fit_rate: algebraic model needs positive parameters");
    }
    x.push_back(model == RateModel::Algebraic ? std::log(param) : param);
    y.push_back(std::log(err));
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw ValidationError("fit_rate: parameters must not all coincide");
  RateFit fit;
  fit.model = model;
  fit.points = points.size();
  fit.log_slope = sxy / sxx;
  fit.intercept = my - fit.log_slope * mx;
  fit.slope = model == RateModel::Algebraic ? fit.log_slope : -fit.log_slope;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.log_slope * x[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

}  // namespace resonalens
