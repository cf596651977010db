// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "resonalens/config.hpp"
#include "resonalens/oracle.hpp"
#include "resonalens/radialfem.hpp"
#include "resonalens/spectra.hpp"
#include "resonalens/studies.hpp"
#include "resonalens/tcert.hpp"

using namespace resonalens;
namespace fs = std::filesystem;

namespace {

using Series = std::vector<std::pair<double, double>>;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Profile affine(double a0) { return make_profile({ProfileKind::Affine, a0, 1, 1.0}); }

Profile unscaled() {
  ProfileSpec s{ProfileKind::Unscaled, 1.0, 1, 1.0};
  s.allow_unscaled = true;
  return make_profile(s);
}

const Complex kOracle{std::sqrt(3.0) / 2.0, -1.5};
const Window kWindow{0.3, 1.4, -2.0, -1.0};

RadialMesh aligned(const Profile& p, double R, int elements, int degree,
                   std::vector<double> extra = {},
                   const std::optional<ExactMapSpec>& map = std::nullopt) {
  std::vector<double> align;
  for (double k : coefficient_kinks(p, map)) {
    if (k > 1.0 && k < R) align.push_back(k);
  }
  align.insert(align.end(), extra.begin(), extra.end());
  return build_mesh(1.0, R, elements, degree, map, align);
}

std::vector<SpectrumEntry> window_entries(const ModeMatrices& mm) {
  ResonanceOptions ro;
  ro.window = kWindow;
  ro.margin = 0.05;
  return resonances(mm, ro).entries;
}

// Nearest retained eigenvalue to `ref` inside the window, within `radius`.
std::optional<double> nearest_error(const ModeMatrices& mm, Complex ref, double radius) {
  std::optional<double> best;
  for (const auto& e : window_entries(mm)) {
    const double d = std::abs(e.omega - ref);
    if (d <= radius && (!best || d < *best)) best = d;
  }
  return best;
}

std::string series_text(const Series& s) {
  std::string out;
  for (const auto& [x, e] : s) out += fmt(" %.4g:%.3e", x, e);
  return out;
}

bool strictly_decreasing(const Series& s) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (!(s[i].second < s[i - 1].second)) return false;
  }
  return true;
}

Outcome annulus() {
  const auto t0 = std::chrono::steady_clock::now();
  Series s;
  for (int e : {8, 16, 32, 64}) {
    const auto mm = assemble_mode(build_mesh(1.0, 2.0, e, 2), unscaled(), 0);
    double wmin = INFINITY;
    for (const auto& ep : solve_gevp(mm.S, mm.M)) wmin = std::min(wmin, std::sqrt(ep.lambda.real()));
    s.emplace_back(1.0 / e, std::abs(wmin - kPi));
  }
  const double secs = seconds_since(t0);
  const auto fit = fit_rate(s, RateModel::Algebraic);
  const bool ok = std::abs(fit.slope - 4.0) <= 0.5 && fit.r_squared >= 0.98 &&
                  s.back().second <= 1e-6 && secs < 10.0;
  return {ok, fmt("slope=%.3f r2=%.6f final=%.3e runtime=%.2fs;", fit.slope, fit.r_squared,
                  s.back().second, secs) + series_text(s)};
}

Outcome capture() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = affine(3.0);
  const auto mm = assemble_mode(aligned(p, 5.0, 48, 3), p, 2);
  const auto entries = window_entries(mm);
  const double secs = seconds_since(t0);
  int near = 0;
  double err = INFINITY;
  std::string extra;
  const Complex d0 = d_zero(p);
  for (const auto& e : entries) {
    const double d = std::abs(e.omega - kOracle);
    if (d <= 0.05) {
      ++near;
      err = std::min(err, d);
    } else {
      const double theta = std::arg(kI * e.omega * d0);
      const double off = std::min(std::abs(theta - kPi / 2), std::abs(theta + kPi / 2));
      extra += fmt(" (%.5f%+.5fi, %.4f rad off the essential line)", e.omega.real(), e.omega.imag(), off);
    }
  }
  const std::size_t spurious = entries.size() - near;
  const bool ok = near == 1 && err <= 1e-3 && spurious == 0 && secs < 30.0;
  return {ok, fmt("within 0.05: %d, error=%.3e, other retained in window: %zu, runtime=%.2fs", near, err,
                  spurious, secs) + extra};
}

Outcome truncation() {
  const auto p = affine(3.0);
  const double h = 1.0 / 12.0;
  Series s;
  for (double R : {2.5, 3.0, 3.5, 4.0, 4.5, 5.0}) {
    const auto mm = assemble_mode(aligned(p, R, elements_for(1.0, R, h), 3), p, 2);
    const auto e = nearest_error(mm, kOracle, 0.2);
    if (!e) return {false, fmt("no eigenvalue within 0.2 of the oracle at R=%.2f", R)};
    s.emplace_back(R, *e);
  }
  const auto fit = fit_rate(s, RateModel::Exponential);
  const double reduction = s.front().second / s.back().second;
  const bool ok = fit.log_slope < 0.0 && fit.r_squared >= 0.9 && reduction >= 10.0;
  return {ok, fmt("log-error slope=%.3f (decay rate %.3f) r2=%.4f reduction=%.1fx;", fit.log_slope,
                  fit.slope, fit.r_squared, reduction) + series_text(s)};
}

Outcome mesh_rate() {
  const auto p = affine(3.0);
  const Complex ref = truncated_resonance(p, 2, 1.0, 4.0, kOracle);
  bool ok = true;
  std::string detail = fmt("reference %.10f%+.10fi;", ref.real(), ref.imag());
  for (int deg : {1, 2}) {
    Series s;
    for (double h : {0.125, 0.0625, 0.03125, 0.015625}) {
      const auto mm = assemble_mode(aligned(p, 4.0, elements_for(1.0, 4.0, h), deg), p, 2);
      const auto e = nearest_error(mm, ref, 0.2);
      if (!e) return {false, fmt("p=%d: no eigenvalue within 0.2 at h=%g", deg, h)};
      s.emplace_back(h, *e);
    }
    const auto fit = fit_rate(s, RateModel::Algebraic);
    ok = ok && std::abs(fit.slope - 2.0 * deg) <= 0.6 && fit.r_squared >= 0.95;
    detail += fmt(" p=%d slope=%.3f r2=%.6f", deg, fit.slope, fit.r_squared);
  }
  return {ok, detail};
}

Outcome diagonal() {
  const auto p = affine(3.0);
  Series s;
  for (int k = 0; k <= 3; ++k) {
    const double R = 2.0 + k, h = 0.5 * std::pow(2.0, -k);
    const auto mm = assemble_mode(aligned(p, R, elements_for(1.0, R, h), 3), p, 2);
    const auto e = nearest_error(mm, kOracle, 0.5);
    if (!e) return {false, fmt("no eigenvalue within 0.5 at R=%g", R)};
    s.emplace_back(R, *e);
  }
  const bool ok = strictly_decreasing(s) && s.back().second <= 1e-3;
  return {ok, fmt("h0=0.5 p=3, final=%.3e;", s.back().second) + series_text(s)};
}

Outcome commutator() {
  const double r1 = 1.0625, r2 = 3.875;
  const auto p = make_profile({ProfileKind::Power, 0.25, 2, 1.0});
  const auto sym = smooth_symbol(t_symbol(p, kOracle), 0.05, r1, r2, {1.0, 4.0});
  Series s;
  for (int e : {48, 96, 192, 384}) {
    s.emplace_back(3.0 / e, discrete_commutator_norm(aligned(p, 4.0, e, 2, {r1, r2}), p, sym, 0));
  }
  const auto fit = fit_rate(s, RateModel::Algebraic);

  const auto q = affine(1.0);
  const auto csym = smooth_symbol(t_symbol(q, {1.0, -0.2}), 0.05, r1, r2, {1.0, 4.0});
  const double zero = discrete_commutator_norm(aligned(q, 4.0, 48, 2, {r1, r2}), q, csym, 0);

  const bool ok = strictly_decreasing(s) && std::abs(fit.slope - 1.0) <= 0.3 && zero <= 1e-14;
  return {ok, fmt("smoothing degree %d gap %.4f, slope=%.3f r2=%.5f, constant symbol norm=%.3e;",
                  sym.degree(), sym.certified_gap(), fit.slope, fit.r_squared, zero) +
                  series_text(s)};
}

Outcome coercivity() {
  const std::vector<Complex> omegas{{0.866, -1.5}, {0.5, -0.1}, {1.5, -1.0}, {0.3, 0.2},
                                    {2.0, 0.5},    {-0.4, 0.9}, {1.0, 0.0},  {0.2, -2.0},
                                    {0.7, -0.6},   {1.2, -0.3}, {0.9, 1.8},  {0.4, -0.05}};
  int checked = 0, failed = 0, lower = 0, upper = 0;
  double worst = INFINITY;
  for (double a0 : {1.0, 3.0}) {
    const auto p = affine(a0);
    for (int n : {0, 2}) {
      for (Complex w : omegas) {
        for (int e : {24, 48}) {
          const auto c = coercivity_certificate(aligned(p, 4.0, e, 2), p, n, w);
          ++checked;
          if (!(c.min_eig >= c.bound - 1e-8)) ++failed;
          (c.branch == Branch::Lower ? lower : upper)++;
          worst = std::min(worst, c.min_eig - c.bound);
        }
      }
    }
  }
  const bool ok = failed == 0 && lower > 0 && upper > 0;
  return {ok, fmt("%d certificates (base E=24 and refined E=48), %d failed, branches lower=%d "
                  "upper=%d, min(min_eig - bound)=%.4f",
                  checked, failed, lower, upper, worst)};
}

Outcome exact() {
  const auto p = affine(3.0);
  auto run = [&](MapKind kind, const std::vector<int>& elements, Series& s) {
    const ExactMapSpec map{kind, -0.5, 2.0};
    std::optional<Complex> finest;
    for (int e : elements) {
      const auto mm = assemble_mode(aligned(p, 2.0, e, 3, {}, map), p, 2);
      std::optional<SpectrumEntry> best;
      for (const auto& en : window_entries(mm)) {
        if (!best || std::abs(en.omega - kOracle) < std::abs(best->omega - kOracle)) best = en;
      }
      if (!best || std::abs(best->omega - kOracle) > 0.2) return finest;
      s.emplace_back(1.0 / e, std::abs(best->omega - kOracle));
      finest = best->omega;
    }
    return finest;
  };
  Series log_s, beta_s;
  const auto wl = run(MapKind::Log, {4, 8, 16, 32, 64}, log_s);
  const auto wb = run(MapKind::PowerBeta, {64}, beta_s);
  if (!wl || !wb || log_s.size() != 5) return {false, "exact variant lost the resonance"};
  const double diff = std::abs(*wl - *wb);
  const bool ok = strictly_decreasing(log_s) && log_s.back().second <= 1e-2 && diff <= 5e-3;
  return {ok, fmt("log map final=%.3e, beta map final=%.3e, |log - beta|=%.3e;", log_s.back().second,
                  beta_s.back().second, diff) + series_text(log_s)};
}

Outcome invariants() {
  std::vector<std::string> bad;
  int checks = 0;
  const std::vector<Profile> profiles{affine(1.0), affine(3.0),
                                      make_profile({ProfileKind::Power, 1.0, 2, 1.0}),
                                      make_profile({ProfileKind::SmoothChi2, 3.0, 1, 1.0})};
  for (const auto& p : profiles) {
    for (int n : {0, 2, 5}) {
      const auto mm = assemble_mode(aligned(p, 4.0, 12, 3), p, n);
      ++checks;
      if ((mm.S - mm.S.transpose()).norm() > 1e-12 * mm.S.norm() ||
          (mm.M - mm.M.transpose()).norm() > 1e-12 * mm.M.norm()) {
        bad.push_back("symmetry " + std::string(to_string(p.kind())));
      }
      ++checks;
      Eigen::LLT<CMatrix> llt(mm.G);
      if (llt.info() != Eigen::Success || (mm.G - mm.G.adjoint()).norm() > 1e-12 * mm.G.norm()) {
        bad.push_back("gram " + std::string(to_string(p.kind())));
      }
    }
    for (Complex w : {Complex(1.0, -0.2), Complex(0.5, -2.0), Complex(0.3, 0.8)}) {
      const auto eta = t_symbol(p, w);
      for (int k = 0; k <= 1000; ++k) {
        ++checks;
        if (std::abs(std::abs(eta(0.5 + 0.01 * k)) - 1.0) > 1e-14) {
          bad.push_back("unimodular");
          break;
        }
      }
    }
  }
  for (int n = 1; n <= kMaxHankelDegree; ++n) {
    const auto poly = hankel_polynomial(n);
    for (Complex z : hankel_resonances(n, 1.0)) {
      ++checks;
      if (std::abs(poly(z)) / std::pow(1.0 + std::abs(z), n) > 1e-10) bad.push_back(fmt("root n=%d", n));
    }
  }

  const auto base = fs::temp_directory_path() / "resonalens_acceptance";
  fs::remove_all(base);
  const auto cfg = parse_config(R"(
study = "mesh"
[profile]
kind = "affine"
alpha0 = 3.0
[problem]
modes = [1, 2]
[sweep]
R = 4.0
h = [0.25, 0.125, 0.0625]
)");
  RunOptions par;
  par.jobs = 4;
  emit_report(run_study(cfg), base / "a");
  emit_report(run_study(cfg, par), base / "b");
  for (const auto& f : fs::directory_iterator(base / "a")) {
    auto read = [](const fs::path& path) {
      std::ifstream is(path, std::ios::binary);
      std::stringstream ss;
      ss << is.rdbuf();
      return ss.str();
    };
    ++checks;
    if (read(f.path()) != read(base / "b" / f.path().filename())) {
      bad.push_back("csv " + f.path().filename().string());
    }
  }
  fs::remove_all(base);

  std::string detail = fmt("%d checks (symmetry, Gram positivity, unimodular symbols, root residuals, "
                           "CSV determinism), %zu failures; module property suites run as separate tests",
                           checks, bad.size());
  for (const auto& b : bad) detail += " [" + b + "]";
  return {bad.empty(), detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"annulus verification", annulus},    {"oracle resonance capture", capture},
      {"exponential truncation decay", truncation}, {"mesh rate", mesh_rate},
      {"diagonal convergence", diagonal},   {"discrete commutator", commutator},
      {"coercivity certificates", coercivity}, {"exact method", exact},
      {"invariant suite", invariants}};
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("criterion %zu (%s): %s: %s\n", k + 1, criteria[k].first, o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
