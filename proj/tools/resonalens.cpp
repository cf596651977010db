// Command line front end: run and validate study configs, print oracle values.

#include <cstdio>
#include <functional>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "resonalens/config.hpp"
#include "resonalens/errors.hpp"
#include "resonalens/oracle.hpp"
#include "resonalens/studies.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kNumerical = 2, kCheck = 3 };

using namespace resonalens;

void print_summary(const ConvergenceReport& report) {
  for (const auto& s : report.summary) {
    std::cout << s.study << " n=" << s.n << " " << s.tracked;
    if (s.oracle) {
      std::cout << " ref=" << format_real(s.oracle->real()) << (s.oracle->imag() < 0 ? "" : "+")
                << format_real(s.oracle->imag()) << "i";
    }
    if (s.fit) {
      std::cout << " " << to_string(s.fit->model) << " slope=" << format_real(s.fit->slope)
                << " r2=" << format_real(s.fit->r_squared);
    }
    std::cout << " final=" << format_real(s.final_error) << " missed=" << s.missed
              << " spurious=" << s.spurious;
    if (s.check != "-") std::cout << " check=" << s.check;
    if (!s.check_detail.empty()) std::cout << " (" << s.check_detail << ")";
    std::cout << "\n";
  }
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const DomainError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const SolverError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resonances of a sound-soft ball by complex scaling and high-order radial FEM"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "resonalens-out";
  int jobs = 1;
  bool check = false;
  auto* run = app.add_subcommand("run", "Run a study and write CSV reports");
  run->add_option("config", config_path, "Study configuration (TOML)")->required();
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--jobs", jobs, "Worker threads for sweep points")->check(CLI::PositiveNumber);
  run->add_flag("--check", check, "Exit with 3 when a configured [check] threshold fails");

  auto* validate = app.add_subcommand("validate", "Check a configuration and print it normalized");
  validate->add_option("config", config_path, "Study configuration (TOML)")->required();

  int n = 2;
  double rb = 1.0;
  auto* oracle = app.add_subcommand("oracle", "Print the resonances of the Dirichlet ball");
  oracle->add_option("--n", n, "Spherical-harmonic degree")->required();
  oracle->add_option("--rb", rb, "Obstacle radius")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  if (*run) {
    return guarded([&] {
      const auto cfg = validate_config(config_path);
      RunOptions opt;
      opt.jobs = jobs;
      opt.export_dir = std::filesystem::path(out_dir);
      const auto report = run_study(cfg, opt);
      emit_report(report, out_dir);
      print_summary(report);
      if (check && cfg.check.empty()) {
        std::cerr << "warning: --check given but the config has no [check] section\n";
      }
      return check && report.checks_failed() ? kCheck : kOk;
    });
  }
  if (*validate) {
    return guarded([&] {
      const auto c = validate_config(config_path);
      std::cout << "study = " << to_string(c.study) << "\n"
                << "profile = " << to_string(c.profile.kind) << " alpha0=" << format_real(c.profile.alpha0)
                << " m=" << c.profile.m << " r1_star=" << format_real(c.profile.r1_star) << "\n"
                << "r_b = " << format_real(c.r_b) << "\ndegree = " << c.degree << "\nmodes =";
      for (int m : c.modes) std::cout << " " << m;
      std::cout << "\nR =";
      for (double v : c.R) std::cout << " " << format_real(v);
      std::cout << "\nh =";
      for (double v : c.h) std::cout << " " << format_real(v);
      std::cout << "\nsector = " << to_string(c.sector) << "\nmargin = " << format_real(c.margin)
                << "\nmatch_radius = " << format_real(c.match_radius) << "\n";
      if (c.window) {
        std::cout << "window = [" << format_real(c.window->re_min) << ", "
                  << format_real(c.window->re_max) << ", " << format_real(c.window->im_min) << ", "
                  << format_real(c.window->im_max) << "]\n";
      } else {
        std::cout << "window = auto\n";
      }
      if (c.map) {
        std::cout << "map = " << to_string(c.map->kind) << " beta=" << format_real(c.map->beta)
                  << " r2_star=" << format_real(c.map->r2_star) << "\n";
      }
      std::cout << "ok\n";
      return kOk;
    });
  }
  return guarded([&] {
    for (Complex z : hankel_resonances(n, rb)) {
      std::cout << format_real(z.real()) << " " << format_real(z.imag()) << "\n";
    }
    return kOk;
  });
}
