#include "resonalens/studies.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>

#include "resonalens/errors.hpp"
#include "resonalens/oracle.hpp"
#include "resonalens/radialfem.hpp"

namespace resonalens {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool ConvergenceReport::checks_failed() const {
  return std::any_of(summary.begin(), summary.end(),
                     [](const TrackedSummary& s) { return s.check == "fail"; });
}

namespace {

/// Runs task(i) for i < count on `jobs` threads. The exception of the
/// lowest failing index is rethrown.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Re-raises the active exception with a context prefix, keeping its type.
[[noreturn]] void rethrow_with(const std::string& ctx) {
  try {
    throw;
  } catch (const UnsupportedCombination& e) {
    throw UnsupportedCombination(ctx + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(ctx + ": " + e.what());
  } catch (const DomainError& e) {
    throw DomainError(ctx + ": " + e.what());
  } catch (const SolverError& e) {
    throw SolverError(ctx + ": " + e.what());
  }
}

struct SweepPoint {
  std::string param_name;
  double param = 0.0;
  double r_end = 0.0;
  double h = 0.0;
};

std::vector<SweepPoint> sweep_points(const StudyConfig& c) {
  std::vector<SweepPoint> pts;
  switch (c.study) {
    case StudyKind::Truncation:
      for (double R : c.R) pts.push_back({"R", R, R, c.h[0]});
      break;
    case StudyKind::Diagonal:
      for (std::size_t k = 0; k < c.R.size(); ++k) pts.push_back({"R", c.R[k], c.R[k], c.h[k]});
      break;
    case StudyKind::Exact:
      for (double h : c.h) pts.push_back({"h", h, c.map->r2_star, h});
      break;
    case StudyKind::Mesh:
    case StudyKind::Commutator:
    case StudyKind::VerifyAnnulus:
      for (double h : c.h) pts.push_back({"h", h, c.R[0], h});
      break;
    case StudyKind::Coercivity:
      pts.push_back({"h", c.h[0], c.R[0], c.h[0]});
      break;
  }
  return pts;
}

std::string context(const StudyConfig& c, int n, const SweepPoint& p) {
  return std::string(to_string(c.study)) + " n=" + std::to_string(n) + " " + p.param_name + "=" +
         format_real(p.param);
}

RadialMesh mesh_for(const StudyConfig& c, const Profile& profile, const SweepPoint& p,
                    int refine = 1, std::vector<double> extra = {}) {
  const std::optional<ExactMapSpec> map = c.study == StudyKind::Exact ? c.map : std::nullopt;
  auto align = coefficient_kinks(profile, map);
  align.insert(align.end(), extra.begin(), extra.end());
  std::vector<double> inside;
  for (double a : align) {
    if (a > c.r_b && a < p.r_end) inside.push_back(a);
  }
  return build_mesh(c.r_b, p.r_end, refine * elements_for(c.r_b, p.r_end, p.h), c.degree, map,
                    inside);
}

bool strictly_decreasing(const std::vector<std::pair<double, double>>& s) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (!(s[i].second < s[i - 1].second)) return false;
  }
  return !s.empty();
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

void export_mode(const std::filesystem::path& dir, const ModeMatrices& mm, std::size_t point) {
  std::filesystem::create_directories(dir);
  const std::string tag = "_n" + std::to_string(mm.n) + "_p" + std::to_string(point) + ".txt";
  for (auto [name, mat] : {std::pair<const char*, const CMatrix*>{"S", &mm.S}, {"M", &mm.M},
                           {"G", &mm.G}}) {
    const auto path = dir / (std::string(name) + tag);
    std::ofstream os(path);
    if (!os) throw SolverError("cannot write " + path.string());
    write_triplets(os, *mat);
  }
}

// Reference values per mode: the tracked quantities of the spectral studies.
std::vector<Complex> references(const StudyConfig& c, const Profile& profile, int n,
                                const Window& window) {
  std::vector<Complex> refs;
  if (c.study == StudyKind::VerifyAnnulus) {
    for (double w : annulus_dirichlet_eigs(c.r_b, c.R[0], n, c.count)) refs.emplace_back(w, 0.0);
    return refs;
  }
  const Complex d0 = d_zero(profile);
  const SectorLabel want = c.sector == Sector::Lower ? SectorLabel::Lower : SectorLabel::Upper;
  for (Complex w : hankel_resonances(n, c.r_b)) {
    if (classify(w, d0, c.margin) == want && window.contains(w)) refs.push_back(w);
  }
  return refs;
}

Window auto_window(const StudyConfig& c, const Profile& profile, int n) {
  if (c.window) return *c.window;
  Window all;
  if (c.study == StudyKind::VerifyAnnulus) {
    const auto eigs = annulus_dirichlet_eigs(c.r_b, c.R[0], n, c.count);
    const double spacing = kPi / (c.R[0] - c.r_b);
    return Window{0.0, eigs.back() + 0.5 * spacing, -0.5, 0.5};
  }
  const auto refs = references(c, profile, n, all);
  if (refs.empty()) return all;
  Window w{refs[0].real(), refs[0].real(), refs[0].imag(), refs[0].imag()};
  for (Complex z : refs) {
    w.re_min = std::min(w.re_min, z.real());
    w.re_max = std::max(w.re_max, z.real());
    w.im_min = std::min(w.im_min, z.imag());
    w.im_max = std::max(w.im_max, z.imag());
  }
  w.re_min -= 0.5;
  w.re_max += 0.5;
  w.im_min -= 0.5;
  w.im_max += 0.5;
  return w;
}

void run_spectral(const StudyConfig& c, const Profile& profile, const RunOptions& opt,
                  ConvergenceReport& report) {
  const auto pts = sweep_points(c);
  const std::string study(to_string(c.study));
  const bool verify = c.study == StudyKind::VerifyAnnulus;
  struct Task {
    int n;
    std::size_t point;
  };
  std::vector<Task> tasks;
  for (int n : c.modes) {
    for (std::size_t i = 0; i < pts.size(); ++i) tasks.push_back({n, i});
  }
  struct Outcome {
    std::vector<ReportRow> rows;
    std::vector<Complex> refs;
    MatchResult match;
  };
  std::vector<Outcome> out(tasks.size());
  parallel_for(tasks.size(), opt.jobs, [&](std::size_t t) {
    const auto [n, i] = tasks[t];
    const auto& p = pts[i];
    try {
      const auto t0 = std::chrono::steady_clock::now();
      const Window window = auto_window(c, profile, n);
      auto refs = references(c, profile, n, window);
      if (c.study == StudyKind::Mesh) {
        for (auto& w : refs) w = truncated_resonance(profile, n, c.r_b, p.r_end, w);
      }
      const auto mesh = mesh_for(c, profile, p);
      const auto mm = assemble_mode(mesh, profile, n);
      if (c.export_matrices && opt.export_dir) export_mode(*opt.export_dir / "matrices", mm, i);
      ResonanceOptions ro;
      ro.sector = c.sector;
      ro.window = window;
      ro.margin = c.margin;
      ro.verification = verify;
      const auto spectrum = resonances(mm, ro);
      const double ms = c.timing ? elapsed_ms(t0) : 0.0;
      Outcome o;
      o.refs = refs;
      o.match = match_to_oracle(spectrum, refs, c.match_radius);
      for (std::size_t e = 0; e < spectrum.entries.size(); ++e) {
        const auto& entry = spectrum.entries[e];
        ReportRow row{study, n, p.param_name, p.param, entry.omega, std::nullopt,
                      std::numeric_limits<double>::quiet_NaN(), entry.residual, mesh.dofs(), ms};
        for (const auto& m : o.match.matches) {
          if (m.index && *m.index == e) {
            row.oracle = m.oracle;
            row.error_abs = m.error;
          }
        }
        o.rows.push_back(std::move(row));
      }
      out[t] = std::move(o);
    } catch (...) {
      rethrow_with(context(c, n, p));
    }
  });

  const RateModel model =
      c.study == StudyKind::Truncation || c.study == StudyKind::Diagonal ? RateModel::Exponential : RateModel::Algebraic;
  for (int n : c.modes) {
    std::vector<std::size_t> idx;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      if (tasks[t].n == n) idx.push_back(t);
    }
    std::size_t spurious = 0;
    for (std::size_t t : idx) spurious += out[t].match.spurious.size();
    const std::size_t tracked = out[idx.front()].refs.size();
    for (std::size_t k = 0; k < tracked; ++k) {
      TrackedSummary s;
      s.study = study;
      s.n = n;
      s.tracked = "omega" + std::to_string(k);
      // Reference at the last sweep point (differs per point in the mesh study only).
      s.oracle = out[idx.back()].refs[k];
      s.spurious = spurious;
      for (std::size_t t : idx) {
        const auto& m = out[t].match.matches[k];
        if (m.matched) {
          s.series.emplace_back(pts[tasks[t].point].param, m.error);
        } else {
          ++s.missed;
        }
      }
      const auto& last = out[idx.back()].match.matches[k];
      s.final_error = last.matched ? last.error : std::numeric_limits<double>::quiet_NaN();
      s.decreasing = s.missed == 0 && strictly_decreasing(s.series);
      if (s.series.size() >= 3) {
        try {
          s.fit = fit_rate(s.series, model);
        } catch (const ValidationError&) {
          // Zero errors: no rate to report.
        }
      }
      report.summary.push_back(std::move(s));
    }
    if (tracked == 0) {
      TrackedSummary s;
      s.study = study;
      s.n = n;
      s.tracked = "none";
      s.spurious = spurious;
      s.final_error = std::numeric_limits<double>::quiet_NaN();
      report.summary.push_back(std::move(s));
    }
  }
  for (auto& o : out) {
    for (auto& r : o.rows) report.rows.push_back(std::move(r));
  }
}

void run_commutator(const StudyConfig& c, const Profile& profile, const RunOptions& opt,
                    ConvergenceReport& report) {
  const auto pts = sweep_points(c);
  for (int n : c.modes) {
    Complex omega = c.symbol.omega.value_or(Complex(1.0, -1.0));
    if (!c.symbol.omega) {
      const auto refs = hankel_resonances(n, c.r_b);
      if (!refs.empty()) omega = refs.back();
    }
    std::optional<SmoothedSymbol> sym;
    try {
      sym = smooth_symbol(t_symbol(profile, omega), c.symbol.epsilon, c.symbol.r_hat1,
                          c.symbol.r_hat2, {c.r_b, c.R[0]});
    } catch (...) {
      rethrow_with("commutator n=" + std::to_string(n) + " symbol");
    }
    std::vector<CommutatorRow> rows(pts.size());
    parallel_for(pts.size(), opt.jobs, [&](std::size_t i) {
      try {
        const auto mesh = mesh_for(c, profile, pts[i], 1, {sym->r_hat1(), sym->r_hat2()});
        CommutatorRow row;
        row.n = n;
        row.h = pts[i].h;
        row.elements = mesh.elements();
        row.dofs = mesh.dofs();
        row.norm = discrete_commutator_norm(mesh, profile, *sym, n);
        row.gap = sym->certified_gap();
        row.fit_degree = sym->degree();
        try {
          row.smoothed = smoothed_coercivity_certificate(mesh, profile, n, *sym);
        } catch (const DomainError&) {
          // omega on the essential line: no certificate.
        }
        rows[i] = std::move(row);
      } catch (...) {
        rethrow_with(context(c, n, pts[i]));
      }
    });
    TrackedSummary s;
    s.study = "commutator";
    s.n = n;
    s.tracked = "commutator";
    for (const auto& r : rows) {
      if (r.norm > 0.0) {
        s.series.emplace_back(r.h, r.norm);
      } else {
        ++s.missed;
      }
    }
    s.final_error = rows.empty() ? 0.0 : rows.back().norm;
    s.decreasing = s.missed == 0 && strictly_decreasing(s.series);
    if (s.series.size() >= 3) s.fit = fit_rate(s.series, RateModel::Algebraic);
    report.summary.push_back(std::move(s));
    for (auto& r : rows) report.commutator.push_back(std::move(r));
  }
}

void run_coercivity(const StudyConfig& c, const Profile& profile, const RunOptions& opt,
                    ConvergenceReport& report) {
  const auto p = sweep_points(c).front();
  struct Task {
    int n;
    std::size_t k;
    int refine;
  };
  std::vector<Task> tasks;
  for (int n : c.modes) {
    for (std::size_t k = 0; k < c.omegas.size(); ++k) {
      tasks.push_back({n, k, 1});
      if (c.refine) tasks.push_back({n, k, 2});
    }
  }
  std::vector<CertificateRow> rows(tasks.size());
  parallel_for(tasks.size(), opt.jobs, [&](std::size_t t) {
    const auto [n, k, refine] = tasks[t];
    CertificateRow row;
    row.n = n;
    row.mesh = refine == 1 ? "base" : "refined";
    row.omega = c.omegas[k];
    try {
      const auto mesh = mesh_for(c, profile, p, refine);
      row.dofs = mesh.dofs();
      try {
        row.certificate = coercivity_certificate(mesh, profile, n, row.omega);
        row.status = "ok";
      } catch (const DomainError& e) {
        row.status = std::string("domain-error: ") + e.what();
      }
    } catch (...) {
      rethrow_with("coercivity n=" + std::to_string(n) + " omega=" + format_real(row.omega.real()) +
                   (row.omega.imag() < 0 ? "" : "+") + format_real(row.omega.imag()) + "i");
    }
    rows[t] = std::move(row);
  });
  for (int n : c.modes) {
    TrackedSummary s;
    s.study = "coercivity";
    s.n = n;
    s.tracked = "certificates";
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
      if (r.n != n || !r.certificate) continue;
      if (!r.certificate->pass) ++s.missed;
      worst = std::min(worst, r.certificate->min_eig - r.certificate->bound);
    }
    s.final_error = worst;
    report.summary.push_back(std::move(s));
  }
  report.certificates = std::move(rows);
}

}  // namespace

ConvergenceReport run_study(const StudyConfig& config, const RunOptions& options) {
  const Profile profile = make_profile(config.profile);
  ConvergenceReport report;
  report.study = std::string(to_string(config.study));
  switch (config.study) {
    case StudyKind::Commutator: run_commutator(config, profile, options, report); break;
    case StudyKind::Coercivity: run_coercivity(config, profile, options, report); break;
    default: run_spectral(config, profile, options, report); break;
  }
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const ReportRow& a, const ReportRow& b) {
                     if (a.n != b.n) return a.n < b.n;
                     if (a.param_value != b.param_value) return a.param_value < b.param_value;
                     if (a.omega.real() != b.omega.real()) return a.omega.real() < b.omega.real();
                     return a.omega.imag() < b.omega.imag();
                   });
  if (!config.check.empty()) apply_checks(report, config.check);
  return report;
}

void apply_checks(ConvergenceReport& report, const CheckSpec& chk) {
  for (auto& s : report.summary) {
    std::vector<std::string> failed;
    auto need = [&](bool ok, const std::string& what) {
      if (!ok) failed.push_back(what);
    };
    const bool certs = s.tracked == "certificates";
    if (certs) {
      if (chk.certificates_pass) need(s.missed == 0, "certificates_pass");
    } else {
      if (chk.slope_min) need(s.fit && s.fit->slope >= *chk.slope_min, "slope_min");
      if (chk.slope_max) need(s.fit && s.fit->slope <= *chk.slope_max, "slope_max");
      if (chk.log_slope_max) need(s.fit && s.fit->log_slope <= *chk.log_slope_max, "log_slope_max");
      if (chk.r_squared_min) need(s.fit && s.fit->r_squared >= *chk.r_squared_min, "r_squared_min");
      if (chk.final_error_max) need(s.final_error <= *chk.final_error_max, "final_error_max");
      if (chk.reduction_min) {
        need(s.series.size() >= 2 && s.series.front().second >= *chk.reduction_min * s.series.back().second,
             "reduction_min");
      }
      if (chk.decreasing) need(s.decreasing, "decreasing");
      if (chk.no_missed) need(s.missed == 0, "no_missed");
      if (chk.no_spurious) need(s.spurious == 0, "no_spurious");
    }
    s.check = failed.empty() ? "pass" : "fail";
    s.check_detail.clear();
    for (const auto& f : failed) s.check_detail += (s.check_detail.empty() ? "" : ";") + f;
  }
}

}  // namespace resonalens
