#include "heislab/runconfig.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace heislab {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& raw, const std::string& what) {
  const std::string s = trim(raw);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw std::invalid_argument("config: " + what + " is not a number: '" +
                                raw + "'");
  }
  return v;
}

}  // namespace

bool IniData::has(const std::string& section, const std::string& key) const {
  const auto it = sections.find(section);
  return it != sections.end() && it->second.count(key) > 0;
}

std::string IniData::get(const std::string& section, const std::string& key,
                         const std::string& fallback) const {
  const auto it = sections.find(section);
  if (it == sections.end()) return fallback;
  const auto kit = it->second.find(key);
  return kit == it->second.end() ? fallback : kit->second;
}

double IniData::get_double(const std::string& section, const std::string& key,
                           double fallback) const {
  if (!has(section, key)) return fallback;
  return parse_double(get(section, key, ""), section + "." + key);
}

long IniData::get_long(const std::string& section, const std::string& key,
                       long fallback) const {
  if (!has(section, key)) return fallback;
  const double v = parse_double(get(section, key, ""), section + "." + key);
  const long r = std::lround(v);
  if (std::abs(v - static_cast<double>(r)) > 1e-9) {
    throw std::invalid_argument("config: " + section + "." + key +
                                " must be an integer");
  }
  return r;
}

std::uint64_t IniData::get_u64(const std::string& section,
                               const std::string& key,
                               std::uint64_t fallback) const {
  if (!has(section, key)) return fallback;
  const long v = get_long(section, key, 0);
  if (v < 0) {
    throw std::invalid_argument("config: " + section + "." + key +
                                " must be nonnegative");
  }
  return static_cast<std::uint64_t>(v);
}

bool IniData::get_bool(const std::string& section, const std::string& key,
                       bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = trim(get(section, key, ""));
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw std::invalid_argument("config: " + section + "." + key +
                              " must be a boolean");
}

std::vector<double> IniData::get_poly(
    const std::string& section, const std::string& key,
    const std::vector<double>& fallback) const {
  if (!has(section, key)) return fallback;
  std::istringstream in(get(section, key, ""));
  std::vector<double> coeffs;
  std::string tok;
  while (in >> tok) {
    coeffs.push_back(parse_double(tok, section + "." + key));
  }
  if (coeffs.empty()) {
    throw std::invalid_argument("config: " + section + "." + key +
                                " has no coefficients");
  }
  return coeffs;
}

IniData parse_ini(const std::string& text) {
  IniData ini;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3) {
        throw std::invalid_argument("config: malformed section at line " +
                                    std::to_string(lineno));
      }
      section = trim(t.substr(1, t.size() - 2));
      ini.sections[section];
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: expected key = value at line " +
                                  std::to_string(lineno));
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("config: empty key at line " +
                                  std::to_string(lineno));
    }
    ini.sections[section][key] = value;
  }
  return ini;
}

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) {
    throw std::invalid_argument("config: " + msg);
  };
  if (family_type != "identity" && family_type != "linear" &&
      family_type != "mixed" && family_type != "polynomial") {
    fail("unknown family type '" + family_type + "'");
  }
  if (!(eps > 0.0)) fail("eps must be positive");
  if (family_type == "mixed" && mixed_lambda == 0.0) {
    fail("mixed family needs lambda != 0");
  }
  if (perturbation_type != "none" && perturbation_type != "nilpotent_bump" &&
      perturbation_type != "exponential_mixed") {
    fail("unknown perturbation type '" + perturbation_type + "'");
  }
  if (perturbation_type == "nilpotent_bump") {
    if (!(bump_support > 0.0) || bump_support >= eps) {
      fail("bump support must lie in (0, eps)");
    }
  }
  if (perturbation_type == "exponential_mixed") {
    if (family_type != "mixed") {
      fail("exponential_mixed perturbs the mixed family only");
    }
    if (pert_lambda == 0.0) fail("exponential_mixed needs lambda != 0");
    if (std::abs(pert_lambda - mixed_lambda) > 1e-12) {
      fail("perturbation lambda must match the family lambda");
    }
  }
  if (!(dt > 0.0)) fail("dt must be positive");
  if (!(dt < 0.1)) fail("dt must be below 0.1");
  if (!(tau_horizon > 0.0)) fail("tau_horizon must be positive");
  if (grid_points < 8) fail("grid_points must be at least 8");
  if (!(delta_near > 0.0)) fail("delta_near must be positive");
  if (translation_iterations < 1) fail("translation_iterations must be >= 1");
  if (!seed_set) fail("seed is required for reproducibility");
  if (jobs < 1) fail("jobs must be >= 1");
  if (discrepancy_samples < 1) fail("discrepancy_samples must be >= 1");
  if (discrepancy_boxes < 1) fail("discrepancy_boxes must be >= 1");
  if (birkhoff_n < 1) fail("birkhoff_n must be >= 1");
  if (monomial_range < 1) fail("monomial_range must be >= 1");
  if (n_starts < 1) fail("n_starts must be >= 1");
}

RunConfig config_from_ini(const IniData& ini, const std::string& name) {
  RunConfig cfg;
  cfg.name = name;

  cfg.family_type = ini.get("family", "type", cfg.family_type);
  cfg.eps = ini.get_double("family", "eps", cfg.eps);
  if (cfg.family_type == "linear") {
    Mat3 b{};
    b(0, 0) = ini.get_double("family", "b11", 0.0);
    b(0, 1) = ini.get_double("family", "b12", 0.0);
    b(1, 0) = ini.get_double("family", "b21", 0.0);
    b(1, 1) = ini.get_double("family", "b22", 0.0);
    b(2, 0) = ini.get_double("family", "b31", 0.0);
    b(2, 1) = ini.get_double("family", "b32", 0.0);
    b(2, 2) = b(0, 0) + b(1, 1);
    cfg.linear_b = b;
  }
  cfg.mixed_lambda = ini.get_double("family", "lambda", cfg.mixed_lambda);
  if (cfg.family_type == "polynomial") {
    const char* keys[6] = {"a11", "a12", "a21", "a22", "a31", "a32"};
    const std::vector<double> one{1.0}, zero{0.0};
    for (int i = 0; i < 6; ++i) {
      cfg.polys[i] =
          ini.get_poly("family", keys[i], (i == 0 || i == 3) ? one : zero);
    }
  }

  cfg.perturbation_type =
      ini.get("perturbation", "type", cfg.perturbation_type);
  cfg.bump_amplitude =
      ini.get_double("perturbation", "amplitude", cfg.bump_amplitude);
  cfg.bump_support =
      ini.get_double("perturbation", "support", cfg.bump_support);
  cfg.pert_lambda = ini.get_double("perturbation", "lambda", cfg.mixed_lambda);
  cfg.pert_c = ini.get_double("perturbation", "c", cfg.pert_c);

  cfg.dt = ini.get_double("numerics", "dt", cfg.dt);
  cfg.tau_horizon = ini.get_double("numerics", "tau_horizon", cfg.tau_horizon);
  cfg.grid_points = static_cast<int>(
      ini.get_long("numerics", "grid_points", cfg.grid_points));
  cfg.delta_near = ini.get_double("numerics", "delta_near", cfg.delta_near);
  cfg.translation_iterations = static_cast<int>(ini.get_long(
      "numerics", "translation_iterations", cfg.translation_iterations));
  if (ini.has("numerics", "seed")) {
    cfg.seed = ini.get_u64("numerics", "seed", cfg.seed);
    cfg.seed_set = true;
  }
  cfg.jobs = static_cast<int>(ini.get_long("numerics", "jobs", cfg.jobs));

  cfg.run_discrepancy =
      ini.get_bool("ergodic", "run_discrepancy", cfg.run_discrepancy);
  cfg.discrepancy_samples = ini.get_long("ergodic", "discrepancy_samples",
                                         cfg.discrepancy_samples);
  cfg.discrepancy_boxes = static_cast<int>(
      ini.get_long("ergodic", "discrepancy_boxes", cfg.discrepancy_boxes));
  cfg.skew_c = ini.get_double("ergodic", "skew_c", cfg.skew_c);
  cfg.birkhoff_n = ini.get_long("ergodic", "birkhoff_n", cfg.birkhoff_n);
  cfg.monomial_range = static_cast<int>(
      ini.get_long("ergodic", "monomial_range", cfg.monomial_range));
  cfg.n_starts =
      static_cast<int>(ini.get_long("ergodic", "n_starts", cfg.n_starts));

  return cfg;
}

RunConfig load_config(const std::string& path, const std::string& name) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("config: cannot open '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_ini(parse_ini(buf.str()), name);
}

std::string resolve_scenario(const std::string& scenario,
                             const std::string& scenario_dir) {
  namespace fs = std::filesystem;
  if (fs::exists(scenario) && !fs::is_directory(scenario)) return scenario;
  const fs::path candidate = fs::path(scenario_dir) / (scenario + ".ini");
  if (fs::exists(candidate)) return candidate.string();
  throw std::invalid_argument("config: unknown scenario '" + scenario +
                              "' (searched " + candidate.string() + ")");
}

AutoFamily family_from_config(const RunConfig& cfg) {
  if (cfg.family_type == "identity") return identity_family(cfg.eps);
  if (cfg.family_type == "linear") return linear_family(cfg.linear_b, cfg.eps);
  if (cfg.family_type == "mixed") {
    return mixed_family(cfg.mixed_lambda, cfg.eps);
  }
  if (cfg.family_type == "polynomial") {
    return polynomial_family(cfg.polys[0], cfg.polys[1], cfg.polys[2],
                             cfg.polys[3], cfg.polys[4], cfg.polys[5],
                             cfg.eps);
  }
  throw std::invalid_argument("config: unknown family type '" +
                              cfg.family_type + "'");
}

ExperimentSpec experiment_from_config(const RunConfig& cfg) {
  cfg.validate();
  ExperimentSpec spec;
  spec.name = cfg.name;
  spec.family = family_from_config(cfg);
  if (cfg.perturbation_type == "none") {
    spec.perturbation = PerturbationKind::none;
  } else if (cfg.perturbation_type == "nilpotent_bump") {
    spec.perturbation = PerturbationKind::nilpotent_bump;
  } else {
    spec.perturbation = PerturbationKind::exponential_mixed;
  }
  spec.bump = Bump{cfg.bump_amplitude, cfg.bump_support};
  spec.lambda = cfg.pert_lambda;
  spec.c = cfg.pert_c;
  spec.eps = cfg.eps;
  spec.dt = cfg.dt;
  spec.tau_horizon = cfg.tau_horizon;
  spec.grid_points = cfg.grid_points;
  spec.delta_near = cfg.delta_near;
  spec.translation_iterations = cfg.translation_iterations;
  spec.run_discrepancy = cfg.run_discrepancy;
  spec.discrepancy_samples = cfg.discrepancy_samples;
  spec.discrepancy_boxes = cfg.discrepancy_boxes;
  spec.seed = cfg.seed;
  spec.jobs = cfg.jobs;
  return spec;
}

}  // namespace heislab
