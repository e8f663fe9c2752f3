#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "heislab/actions.hpp"
#include "heislab/stability.hpp"

/// Plain-text run configuration: INI-style sections of key = value lines,
/// full-line comments with ';' or '#'.  Configs describe a family, an
/// optional perturbation, and the numerical budget; canned scenarios are
/// just config files shipped under scenarios/.  Every malformed input is
/// reported as std::invalid_argument with the offending line or key, which
/// the CLI maps to exit code 2.

namespace heislab {

struct IniData {
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  long get_long(const std::string& section, const std::string& key,
                long fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key,
                        std::uint64_t fallback) const;
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const;
  /// Whitespace-separated coefficients, ascending powers.
  std::vector<double> get_poly(const std::string& section,
                               const std::string& key,
                               const std::vector<double>& fallback) const;
};

IniData parse_ini(const std::string& text);

struct RunConfig {
  std::string name = "custom";

  // [family]
  std::string family_type = "identity";
  double eps = 1.0;
  Mat3 linear_b{};                     // type = linear
  double mixed_lambda = 0.0;           // type = mixed
  std::array<std::vector<double>, 6> polys;  // a11,a12,a21,a22,a31,a32

  // [perturbation]
  std::string perturbation_type = "none";
  double bump_amplitude = 0.05;
  double bump_support = 0.2;
  double pert_lambda = 0.0;
  double pert_c = 0.0;

  // [numerics]
  double dt = 1e-3;
  double tau_horizon = 200.0;
  int grid_points = 401;
  double delta_near = 0.1;
  int translation_iterations = 200;
  std::uint64_t seed = 1;
  bool seed_set = false;  // reproducibility requires an explicit seed
  int jobs = 1;

  // [ergodic]
  bool run_discrepancy = false;
  long discrepancy_samples = 100000;
  int discrepancy_boxes = 8;
  double skew_c = 0.6180339887498949;  // (sqrt 5 - 1)/2
  long birkhoff_n = 100000;
  int monomial_range = 3;
  int n_starts = 20;

  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

RunConfig config_from_ini(const IniData& ini, const std::string& name);

/// Read and parse a config file.  Throws std::invalid_argument on missing
/// or malformed files.
RunConfig load_config(const std::string& path, const std::string& name);

/// A scenario argument is either a path to an .ini file or a bare name
/// resolved as <scenario_dir>/<name>.ini.
std::string resolve_scenario(const std::string& scenario,
                             const std::string& scenario_dir);

AutoFamily family_from_config(const RunConfig& cfg);
ExperimentSpec experiment_from_config(const RunConfig& cfg);

}  // namespace heislab
