#include "resonalens/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "resonalens/errors.hpp"

namespace resonalens {

std::string_view to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::Truncation: return "truncation";
    case StudyKind::Mesh: return "mesh";
    case StudyKind::Diagonal: return "diagonal";
    case StudyKind::Exact: return "exact";
    case StudyKind::Commutator: return "commutator";
    case StudyKind::Coercivity: return "coercivity";
    case StudyKind::VerifyAnnulus: break;
  }
  return "verify-annulus";
}

StudyKind study_kind_from_string(std::string_view name) {
  for (auto k : {StudyKind::Truncation, StudyKind::Mesh, StudyKind::Diagonal, StudyKind::Exact,
                 StudyKind::Commutator, StudyKind::Coercivity, StudyKind::VerifyAnnulus}) {
    if (to_string(k) == name) return k;
  }
  throw ValidationError("unknown study '" + std::string(name) + "'");
}

bool CheckSpec::empty() const {
  return !slope_min && !slope_max && !log_slope_max && !r_squared_min && !final_error_max &&
         !reduction_min && !decreasing && !no_spurious && !no_missed && !certificates_pass;
}

int elements_for(double a, double b, double h) {
  return std::max(1, static_cast<int>(std::lround((b - a) / h)));
}

namespace {

class Reader {
 public:
  std::vector<std::string> errors;
  bool unsupported = false;

  void fail(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

  const toml::table* section(const toml::table& root, const char* name,
                             std::initializer_list<const char*> keys) {
    const auto* node = root.get(name);
    if (!node) return nullptr;
    const auto* t = node->as_table();
    if (!t) {
      fail(name, "expected a table");
      return nullptr;
    }
    check_keys(*t, name, keys);
    return t;
  }

  void check_keys(const toml::table& t, const std::string& prefix,
                  std::initializer_list<const char*> keys) {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : t) {
      (void)v;
      const std::string key(k.str());
      if (!allowed.count(key)) fail(join(prefix, key), "unknown key");
    }
  }

  static std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
  }

  std::optional<double> number(const toml::table* t, const std::string& prefix, const char* key) {
    if (!t) return std::nullopt;
    const auto* node = t->get(key);
    if (!node) return std::nullopt;
    if (auto v = node->value<double>()) {
      if (!std::isfinite(*v)) {
        fail(join(prefix, key), "must be finite");
        return std::nullopt;
      }
      return *v;
    }
    fail(join(prefix, key), "expected a number");
    return std::nullopt;
  }

  std::optional<int> integer(const toml::table* t, const std::string& prefix, const char* key) {
    if (!t) return std::nullopt;
    const auto* node = t->get(key);
    if (!node) return std::nullopt;
    if (node->is_integer()) return static_cast<int>(node->as_integer()->get());
    fail(join(prefix, key), "expected an integer");
    return std::nullopt;
  }

  std::optional<bool> boolean(const toml::table* t, const std::string& prefix, const char* key) {
    if (!t) return std::nullopt;
    const auto* node = t->get(key);
    if (!node) return std::nullopt;
    if (node->is_boolean()) return node->as_boolean()->get();
    fail(join(prefix, key), "expected true or false");
    return std::nullopt;
  }

  std::optional<std::string> string(const toml::table* t, const std::string& prefix,
                                    const char* key) {
    if (!t) return std::nullopt;
    const auto* node = t->get(key);
    if (!node) return std::nullopt;
    if (node->is_string()) return node->as_string()->get();
    fail(join(prefix, key), "expected a string");
    return std::nullopt;
  }

  /// A number or an array of numbers.
  std::optional<std::vector<double>> numbers(const toml::table* t, const std::string& prefix,
                                             const char* key) {
    if (!t) return std::nullopt;
    const auto* node = t->get(key);
    if (!node) return std::nullopt;
    if (auto v = node->value<double>()) return std::vector<double>{*v};
    const auto* arr = node->as_array();
    if (!arr) {
      fail(join(prefix, key), "expected a number or an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < arr->size(); ++i) {
      auto v = (*arr)[i].value<double>();
      if (!v || !std::isfinite(*v)) {
        fail(join(prefix, key) + "[" + std::to_string(i) + "]", "expected a finite number");
        return std::nullopt;
      }
      out.push_back(*v);
    }
    return out;
  }

  std::optional<std::vector<int>> integers(const toml::table* t, const std::string& prefix,
                                           const char* key) {
    if (!t) return std::nullopt;
    const auto* node = t->get(key);
    if (!node) return std::nullopt;
    if (node->is_integer()) return std::vector<int>{static_cast<int>(node->as_integer()->get())};
    const auto* arr = node->as_array();
    if (!arr) {
      fail(join(prefix, key), "expected an integer or an array of integers");
      return std::nullopt;
    }
    std::vector<int> out;
    for (std::size_t i = 0; i < arr->size(); ++i) {
      if (!(*arr)[i].is_integer()) {
        fail(join(prefix, key) + "[" + std::to_string(i) + "]", "expected an integer");
        return std::nullopt;
      }
      out.push_back(static_cast<int>((*arr)[i].as_integer()->get()));
    }
    return out;
  }
};

bool monotone(const std::vector<double>& v) {
  bool inc = true, dec = true;
  for (std::size_t i = 1; i < v.size(); ++i) {
    inc = inc && v[i] > v[i - 1];
    dec = dec && v[i] < v[i - 1];
  }
  return inc || dec;
}

}  // namespace

StudyConfig parse_config(std::string_view text, std::string_view source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
       << e.description();
    throw ValidationError(os.str());
  }
  Reader rd;
  StudyConfig cfg;
  rd.check_keys(root, "", {"study", "profile", "problem", "sweep", "map", "spectrum", "symbol",
                           "coercivity", "check", "report"});

  if (auto s = rd.string(&root, "", "study")) {
    try {
      cfg.study = study_kind_from_string(*s);
    } catch (const ValidationError& e) {
      rd.fail("study", e.what());
    }
  } else if (!root.get("study")) {
    rd.fail("study", "required");
  }
  const bool verify = cfg.study == StudyKind::VerifyAnnulus;

  // [profile]
  const auto* prof = rd.section(root, "profile", {"kind", "alpha0", "m", "r1_star", "r2"});
  if (!prof && !verify) rd.fail("profile", "required");
  if (auto k = rd.string(prof, "profile", "kind")) {
    try {
      cfg.profile.kind = profile_kind_from_string(*k);
    } catch (const ValidationError& e) {
      rd.fail("profile.kind", e.what());
    }
  } else if (verify) {
    cfg.profile.kind = ProfileKind::Unscaled;
  } else if (prof && !prof->get("kind")) {
    rd.fail("profile.kind", "required");
  }
  if (auto v = rd.number(prof, "profile", "alpha0")) cfg.profile.alpha0 = *v;
  if (auto v = rd.integer(prof, "profile", "m")) cfg.profile.m = *v;
  if (auto v = rd.number(prof, "profile", "r1_star")) cfg.profile.r1_star = *v;
  if (auto v = rd.number(prof, "profile", "r2")) cfg.profile.r2 = *v;
  if (verify && cfg.profile.kind != ProfileKind::Unscaled) {
    rd.fail("profile.kind", "verify-annulus runs the unscaled profile");
  }
  if (!verify && cfg.profile.kind == ProfileKind::Unscaled) {
    rd.fail("profile.kind", "the unscaled profile is reserved for verify-annulus");
  }
  cfg.profile.allow_unscaled = verify;
  std::optional<Profile> profile;
  try {
    profile = make_profile(cfg.profile);
  } catch (const ValidationError& e) {
    rd.fail("profile", e.what());
  }

  // [problem]
  const auto* prob = rd.section(root, "problem", {"r_b", "modes", "degree"});
  if (auto v = rd.number(prob, "problem", "r_b")) cfg.r_b = *v;
  if (!(cfg.r_b > 0.0)) rd.fail("problem.r_b", "must be > 0");
  if (auto v = rd.integers(prob, "problem", "modes")) cfg.modes = *v;
  if (cfg.modes.empty()) rd.fail("problem.modes", "must not be empty");
  for (int n : cfg.modes) {
    if (n < 0 || n > 25) rd.fail("problem.modes", "mode " + std::to_string(n) + " outside [0, 25]");
  }
  if (auto v = rd.integer(prob, "problem", "degree")) cfg.degree = *v;
  if (cfg.degree < 1 || cfg.degree > 12) rd.fail("problem.degree", "must lie in [1, 12]");

  // [sweep]
  const auto* sweep = rd.section(root, "sweep", {"R", "h"});
  if (auto v = rd.numbers(sweep, "sweep", "R")) cfg.R = *v;
  if (auto v = rd.numbers(sweep, "sweep", "h")) cfg.h = *v;
  for (double h : cfg.h) {
    if (!(h > 0.0)) rd.fail("sweep.h", "widths must be > 0");
  }
  for (double R : cfg.R) {
    if (!(R > cfg.r_b)) rd.fail("sweep.R", "radii must exceed problem.r_b");
  }
  auto need_list = [&](const char* key, const std::vector<double>& v) {
    if (v.empty()) {
      rd.fail(std::string("sweep.") + key, "required (non-empty list)");
    } else if (!monotone(v)) {
      rd.fail(std::string("sweep.") + key, "must be strictly monotone");
    }
  };
  auto need_single = [&](const char* key, const std::vector<double>& v) {
    if (v.size() != 1) rd.fail(std::string("sweep.") + key, "expected a single value");
  };
  switch (cfg.study) {
    case StudyKind::Truncation:
      need_list("R", cfg.R);
      need_single("h", cfg.h);
      break;
    case StudyKind::Mesh:
    case StudyKind::Commutator:
    case StudyKind::VerifyAnnulus:
      need_list("h", cfg.h);
      need_single("R", cfg.R);
      break;
    case StudyKind::Diagonal:
      need_list("R", cfg.R);
      need_list("h", cfg.h);
      if (cfg.R.size() != cfg.h.size()) {
        rd.fail("sweep.R, sweep.h", "diagonal sweeps pair R and h; lengths " +
                                        std::to_string(cfg.R.size()) + " and " +
                                        std::to_string(cfg.h.size()) + " differ");
      }
      break;
    case StudyKind::Exact:
      need_list("h", cfg.h);
      if (!cfg.R.empty()) rd.fail("sweep.R", "the exact study ends at map.r2_star");
      break;
    case StudyKind::Coercivity:
      need_single("h", cfg.h);
      need_single("R", cfg.R);
      break;
  }

  // [map]
  const auto* map = rd.section(root, "map", {"kind", "beta", "r2_star"});
  if (map) {
    ExactMapSpec m;
    if (auto k = rd.string(map, "map", "kind")) {
      try {
        m.kind = map_kind_from_string(*k);
      } catch (const ValidationError& e) {
        rd.fail("map.kind", e.what());
      }
    }
    if (auto v = rd.number(map, "map", "beta")) m.beta = *v;
    if (auto v = rd.number(map, "map", "r2_star")) m.r2_star = *v;
    cfg.map = m;
  }
  if (cfg.study == StudyKind::Exact) {
    if (!cfg.map) {
      rd.fail("map", "required by the exact study");
    } else {
      if (!(cfg.map->r2_star > cfg.r_b)) rd.fail("map.r2_star", "must exceed problem.r_b");
      if (profile) {
        try {
          validate_exact_combination(*cfg.map, *profile);
        } catch (const UnsupportedCombination& e) {
          rd.unsupported = true;
          rd.fail("map", e.what());
        } catch (const ValidationError& e) {
          rd.fail("map", e.what());
        }
      } else if (cfg.profile.kind == ProfileKind::Power) {
        rd.unsupported = true;
        rd.fail("map", "the exact variant does not support the power profile");
      }
    }
  } else if (cfg.map) {
    rd.fail("map", "only used by the exact study");
  }

  // [spectrum]
  const auto* spec =
      rd.section(root, "spectrum", {"sector", "window", "margin", "match_radius", "count"});
  if (auto s = rd.string(spec, "spectrum", "sector")) {
    try {
      cfg.sector = sector_from_string(*s);
    } catch (const ValidationError& e) {
      rd.fail("spectrum.sector", e.what());
    }
  }
  if (auto v = rd.numbers(spec, "spectrum", "window")) {
    if (v->size() != 4 || !((*v)[0] < (*v)[1]) || !((*v)[2] < (*v)[3])) {
      rd.fail("spectrum.window", "expected [re_min, re_max, im_min, im_max] with min < max");
    } else {
      cfg.window = Window{(*v)[0], (*v)[1], (*v)[2], (*v)[3]};
    }
  }
  if (auto v = rd.number(spec, "spectrum", "margin")) cfg.margin = *v;
  if (!(cfg.margin >= 0.0 && cfg.margin < kPi / 2)) rd.fail("spectrum.margin", "must lie in [0, pi/2)");
  if (auto v = rd.number(spec, "spectrum", "match_radius")) cfg.match_radius = *v;
  if (!(cfg.match_radius > 0.0)) rd.fail("spectrum.match_radius", "must be > 0");
  if (auto v = rd.integer(spec, "spectrum", "count")) cfg.count = *v;
  if (cfg.count < 1) rd.fail("spectrum.count", "must be >= 1");

  // [symbol]
  const auto* sym = rd.section(root, "symbol", {"epsilon", "r_hat1", "r_hat2", "omega"});
  if (auto v = rd.number(sym, "symbol", "epsilon")) cfg.symbol.epsilon = *v;
  if (auto v = rd.number(sym, "symbol", "r_hat1")) cfg.symbol.r_hat1 = *v;
  if (auto v = rd.number(sym, "symbol", "r_hat2")) cfg.symbol.r_hat2 = *v;
  if (auto v = rd.numbers(sym, "symbol", "omega")) {
    if (v->size() != 2) {
      rd.fail("symbol.omega", "expected [re, im]");
    } else {
      cfg.symbol.omega = Complex((*v)[0], (*v)[1]);
    }
  }
  if (cfg.study == StudyKind::Commutator) {
    if (!(cfg.symbol.epsilon > 0.0)) rd.fail("symbol.epsilon", "must be > 0");
    if (!sym || !sym->get("r_hat1")) rd.fail("symbol.r_hat1", "required");
    if (!sym || !sym->get("r_hat2")) rd.fail("symbol.r_hat2", "required");
    if (!(cfg.symbol.r_hat1 > cfg.profile.r1_star)) rd.fail("symbol.r_hat1", "must exceed profile.r1_star");
    if (!(cfg.symbol.r_hat2 > cfg.symbol.r_hat1)) rd.fail("symbol.r_hat2", "must exceed symbol.r_hat1");
    if (cfg.R.size() == 1 && !(cfg.symbol.r_hat2 < cfg.R[0])) rd.fail("symbol.r_hat2", "must lie below sweep.R");
  } else if (sym) {
    rd.fail("symbol", "only used by the commutator study");
  }

  // [coercivity]
  const auto* coer = rd.section(root, "coercivity", {"omega_re", "omega_im", "refine"});
  if (cfg.study == StudyKind::Coercivity) {
    auto re = rd.numbers(coer, "coercivity", "omega_re");
    auto im = rd.numbers(coer, "coercivity", "omega_im");
    if (!re || !im || re->empty()) {
      rd.fail("coercivity.omega_re, coercivity.omega_im", "required (non-empty lists)");
    } else if (re->size() != im->size()) {
      rd.fail("coercivity.omega_re, coercivity.omega_im", "lengths differ");
    } else {
      for (std::size_t i = 0; i < re->size(); ++i) cfg.omegas.emplace_back((*re)[i], (*im)[i]);
    }
    if (auto v = rd.boolean(coer, "coercivity", "refine")) cfg.refine = *v;
  } else if (coer) {
    rd.fail("coercivity", "only used by the coercivity study");
  }

  // [check]
  const auto* chk = rd.section(root, "check",
                               {"slope_min", "slope_max", "log_slope_max", "r_squared_min",
                                "final_error_max", "reduction_min", "decreasing", "no_spurious",
                                "no_missed", "certificates_pass"});
  cfg.check.slope_min = rd.number(chk, "check", "slope_min");
  cfg.check.slope_max = rd.number(chk, "check", "slope_max");
  cfg.check.log_slope_max = rd.number(chk, "check", "log_slope_max");
  cfg.check.r_squared_min = rd.number(chk, "check", "r_squared_min");
  cfg.check.final_error_max = rd.number(chk, "check", "final_error_max");
  cfg.check.reduction_min = rd.number(chk, "check", "reduction_min");
  cfg.check.decreasing = rd.boolean(chk, "check", "decreasing").value_or(false);
  cfg.check.no_spurious = rd.boolean(chk, "check", "no_spurious").value_or(false);
  cfg.check.no_missed = rd.boolean(chk, "check", "no_missed").value_or(false);
  cfg.check.certificates_pass = rd.boolean(chk, "check", "certificates_pass").value_or(false);

  // [report]
  const auto* rep = rd.section(root, "report", {"timing", "export_matrices"});
  cfg.timing = rd.boolean(rep, "report", "timing").value_or(false);
  cfg.export_matrices = rd.boolean(rep, "report", "export_matrices").value_or(false);

  if (!rd.errors.empty()) {
    std::string msg = std::string(source) + ": invalid configuration";
    for (const auto& e : rd.errors) msg += "\n  " + e;
    if (rd.unsupported) throw UnsupportedCombination(msg);
    throw ValidationError(msg);
  }
  return cfg;
}

StudyConfig validate_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path.string() + ": cannot open configuration");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

}  // namespace resonalens
