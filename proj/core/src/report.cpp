#include <exception>
#include <fstream>
#include <string>

#include "resonalens/errors.hpp"
#include "resonalens/studies.hpp"

namespace resonalens {

namespace {

class CsvFile {
 public:
  explicit CsvFile(const std::filesystem::path& path) : path_(path), os_(path) {
    if (!os_) throw SolverError("cannot write " + path.string());
  }
  ~CsvFile() noexcept(false) {
    os_.flush();
    if (!os_ && std::uncaught_exceptions() == 0) throw SolverError("write failed: " + path_.string());
  }

  std::ostream& line() { return os_; }

 private:
  std::filesystem::path path_;
  std::ofstream os_;
};

std::string fr(double v) { return format_real(v); }

std::string opt_re(const std::optional<Complex>& z) {
  return z ? fr(z->real()) : std::string("nan");
}
std::string opt_im(const std::optional<Complex>& z) {
  return z ? fr(z->imag()) : std::string("nan");
}

}  // namespace

void emit_report(const ConvergenceReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw SolverError("cannot create " + dir.string() + ": " + ec.message());

  {
    CsvFile f(dir / "rows.csv");
    auto& os = f.line();
    os << kRowsHeader << '\n';
    for (const auto& r : report.rows) {
      os << r.study << ',' << r.n << ',' << r.param_name << ',' << fr(r.param_value) << ','
         << fr(r.omega.real()) << ',' << fr(r.omega.imag()) << ',' << opt_re(r.oracle) << ','
         << opt_im(r.oracle) << ',' << fr(r.error_abs) << ',' << fr(r.residual) << ',' << r.dofs
         << ',' << fr(r.runtime_ms) << '\n';
    }
  }
  {
    CsvFile f(dir / "summary.csv");
    auto& os = f.line();
    os << "study,n,multiplicity,tracked,oracle_re,oracle_im,model,slope,log_slope,r_squared,"
          "points,missed,spurious,final_error,decreasing,check,check_detail\n";
    for (const auto& s : report.summary) {
      os << s.study << ',' << s.n << ',' << 2 * s.n + 1 << ',' << s.tracked << ','
         << opt_re(s.oracle) << ',' << opt_im(s.oracle) << ',';
      if (s.fit) {
        os << to_string(s.fit->model) << ',' << fr(s.fit->slope) << ',' << fr(s.fit->log_slope)
           << ',' << fr(s.fit->r_squared) << ',' << s.fit->points;
      } else {
        os << "-,nan,nan,nan," << s.series.size();
      }
      os << ',' << s.missed << ',' << s.spurious << ',' << fr(s.final_error) << ','
         << (s.decreasing ? "true" : "false") << ',' << s.check << ',' << s.check_detail << '\n';
    }
  }
  for (const auto& s : report.summary) {
    if (s.series.empty()) continue;
    CsvFile f(dir / (s.study + "_n" + std::to_string(s.n) + "_" + s.tracked + ".dat"));
    auto& os = f.line();
    os << "# " << s.study << " n=" << s.n << ' ' << s.tracked << "\n# param error\n";
    for (const auto& [x, e] : s.series) os << fr(x) << ' ' << fr(e) << '\n';
  }
  if (!report.certificates.empty()) {
    CsvFile f(dir / "certificates.csv");
    auto& os = f.line();
    os << "n,mesh,dofs,omega_re,omega_im,status,branch,tau,tau1,rotation_re,rotation_im,bound,"
          "min_eig,pass\n";
    for (const auto& r : report.certificates) {
      os << r.n << ',' << r.mesh << ',' << r.dofs << ',' << fr(r.omega.real()) << ','
         << fr(r.omega.imag()) << ",\"" << r.status << "\",";
      if (const auto& c = r.certificate) {
        os << to_string(c->branch) << ',' << fr(c->tau) << ',' << fr(c->tau1) << ','
           << fr(c->rotation.real()) << ',' << fr(c->rotation.imag()) << ',' << fr(c->bound) << ','
           << fr(c->min_eig) << ',' << (c->pass ? "true" : "false") << '\n';
      } else {
        os << "-,nan,nan,nan,nan,nan,nan,false\n";
      }
    }
  }
  if (!report.commutator.empty()) {
    CsvFile f(dir / "commutator.csv");
    auto& os = f.line();
    os << "n,h,elements,dofs,norm,sup_gap,fit_degree,smoothed_bound,smoothed_min_eig,"
          "smoothed_pass\n";
    for (const auto& r : report.commutator) {
      os << r.n << ',' << fr(r.h) << ',' << r.elements << ',' << r.dofs << ',' << fr(r.norm) << ','
         << fr(r.gap) << ',' << r.fit_degree << ',';
      if (r.smoothed) {
        os << fr(r.smoothed->bound) << ',' << fr(r.smoothed->min_eig) << ','
           << (r.smoothed->pass ? "true" : "false") << '\n';
      } else {
        os << "nan,nan,false\n";
      }
    }
  }
}

}  // namespace resonalens
