// Command-line front end for the action laboratory: canned scenarios or
// custom configs in, JSON reports and CSV tables out.  All outputs are
// deterministic functions of the config (seed included); nothing here
// writes timestamps or machine-dependent values.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "heislab/ergodic.hpp"
#include "heislab/holonomy.hpp"
#include "heislab/runconfig.hpp"
#include "heislab/stability.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace heislab;

namespace {

struct CommonOpts {
  std::string config;
  std::string scenario;
  std::string scenario_dir = "scenarios";
  std::string out_dir = "out";
  long long seed = -1;
  int jobs = 0;
  double dt = 0.0;
  double horizon = 0.0;
};

void add_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--config", o.config, "Path to an INI config file");
  sub->add_option("--scenario", o.scenario,
                  "Canned scenario name (resolved in --scenario-dir) or path");
  sub->add_option("--scenario-dir", o.scenario_dir,
                  "Directory holding canned scenario files");
  sub->add_option("--out-dir", o.out_dir, "Directory for report files");
  sub->add_option("--seed", o.seed, "Override the RNG seed");
  sub->add_option("--jobs", o.jobs, "Worker thread cap");
  sub->add_option("--dt", o.dt, "Override the integrator step");
  sub->add_option("--horizon", o.horizon, "Override the drift horizon T");
}

RunConfig resolve_config(const CommonOpts& o) {
  RunConfig cfg;
  if (!o.config.empty()) {
    cfg = load_config(o.config, fs::path(o.config).stem().string());
  } else if (!o.scenario.empty()) {
    const std::string path = resolve_scenario(o.scenario, o.scenario_dir);
    cfg = load_config(path, fs::path(path).stem().string());
  } else {
    throw std::invalid_argument("config: need --config or --scenario");
  }
  if (o.seed >= 0) {
    cfg.seed = static_cast<std::uint64_t>(o.seed);
    cfg.seed_set = true;
  }
  if (o.jobs > 0) cfg.jobs = o.jobs;
  if (o.dt > 0.0) cfg.dt = o.dt;
  if (o.horizon > 0.0) cfg.tau_horizon = o.horizon;
  cfg.validate();
  return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  std::cout << "wrote " << path.string() << "\n";
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

json verdict_json(const StabilityVerdict& v) {
  json evidence = json::array();
  for (const Criterion c : v.evidence) evidence.push_back(to_string(c));
  return json{
      {"l_status", to_string(v.l_status)},
      {"t_status", to_string(v.t_status)},
      {"evidence", evidence},
      {"eigen",
       {{"trace", v.eigen.trace},
        {"det", v.eigen.det},
        {"discriminant", v.eigen.discriminant},
        {"nilpotent", v.eigen.nilpotent},
        {"wedge", to_string(v.eigen.wedge)},
        {"eigenvalues",
         {{v.eigen.eigenvalues[0].real(), v.eigen.eigenvalues[0].imag()},
          {v.eigen.eigenvalues[1].real(), v.eigen.eigenvalues[1].imag()}}}}}};
}

json drift_json(const DriftReport& d) {
  json trend = json::array();
  for (const auto& v : d.trend) trend.push_back({v[0], v[1]});
  json j{{"value", {d.value[0], d.value[1]}},
         {"horizon", d.horizon},
         {"dt", d.dt},
         {"trend", trend},
         {"converged", d.converged}};
  if (d.exit) {
    j["strip_exit"] = {{"time", d.exit->time}, {"z", d.exit->z}};
  } else {
    j["strip_exit"] = nullptr;
  }
  return j;
}

const char* translation_status(const TranslationResult& t) {
  switch (t.status) {
    case TranslationResult::Status::ok:
      return "ok";
    case TranslationResult::Status::fixed_point:
      return "fixed_point";
    default:
      return "left_domain";
  }
}

json translation_json(const TranslationResult& t) {
  return json{{"status", translation_status(t)},
              {"value", t.value},
              {"iterations", t.iterations}};
}

json relations_json(const RelationsReport& r) {
  return json{{"max_r12", r.max_r12},
              {"max_r13", r.max_r13},
              {"max_r23", r.max_r23},
              {"min_frame_volume", r.min_frame_volume},
              {"n_samples", r.n_samples}};
}

json pseudogroup_json(const PseudogroupReport& p) {
  return json{{"max_dev_comm", p.max_dev_comm},
              {"max_dev_31", p.max_dev_31},
              {"max_dev_32", p.max_dev_32},
              {"n_checked", p.n_checked},
              {"n_skipped", p.n_skipped}};
}

json experiment_json(const ExperimentReport& rep) {
  json j{{"name", rep.name},
         {"verdict", verdict_json(rep.verdict)},
         {"relations", relations_json(rep.relations)},
         {"translation", translation_json(rep.translation)},
         {"horizontal_generator",
          {rep.horizontal_generator.v1, rep.horizontal_generator.v2,
           rep.horizontal_generator.v3}},
         {"failures", rep.failures},
         {"ok", rep.ok()}};
  if (rep.maps) {
    j["holonomy"] = {{"built", true},
                     {"max_displacement",
                      {rep.maps->max_displacement(0),
                       rep.maps->max_displacement(1),
                       rep.maps->max_displacement(2)}},
                     {"pseudogroup", pseudogroup_json(rep.pseudogroup)},
                     {"compact_at_zero", rep.compact_at_zero},
                     {"abelian_at_zero", rep.abelian_at_zero}};
  } else {
    j["holonomy"] = {{"built", false}};
  }
  j["tau_e3"] = rep.tau_e3 ? drift_json(*rep.tau_e3) : json(nullptr);
  j["tau_horizontal"] =
      rep.tau_horizontal ? drift_json(*rep.tau_horizontal) : json(nullptr);
  j["xi_e3"] =
      rep.xi_e3 ? json{(*rep.xi_e3)[0], (*rep.xi_e3)[1]} : json(nullptr);
  j["discrepancy"] = rep.discrepancy ? json(*rep.discrepancy) : json(nullptr);
  return j;
}

std::string summary_csv(const ExperimentReport& rep) {
  std::string out =
      "scenario,l_status,t_status,compact_at_zero,abelian_at_zero,"
      "translation_status,translation_value,tau_e3_x,tau_e3_y,"
      "tau_h_x,tau_h_y,xi_x,xi_y,discrepancy,ok\n";
  const Vec2 te3 = rep.tau_e3 ? rep.tau_e3->value : Vec2{0.0, 0.0};
  const Vec2 th = rep.tau_horizontal ? rep.tau_horizontal->value
                                     : Vec2{0.0, 0.0};
  const Vec2 xi = rep.xi_e3 ? *rep.xi_e3 : Vec2{0.0, 0.0};
  out += rep.name;
  out += "," + to_string(rep.verdict.l_status);
  out += "," + to_string(rep.verdict.t_status);
  out += rep.compact_at_zero ? ",true" : ",false";
  out += rep.abelian_at_zero ? ",true" : ",false";
  out += std::string(",") + translation_status(rep.translation);
  out += "," + fmt(rep.translation.value);
  out += "," + fmt(te3[0]) + "," + fmt(te3[1]);
  out += "," + fmt(th[0]) + "," + fmt(th[1]);
  out += "," + fmt(xi[0]) + "," + fmt(xi[1]);
  out += "," + (rep.discrepancy ? fmt(*rep.discrepancy) : std::string("nan"));
  out += rep.ok() ? ",true\n" : ",false\n";
  return out;
}

/// Plot data: displacement of each holonomy map from the identity.
std::string displacement_csv(const HolonomyMaps& maps) {
  std::string out = "z,d1,d2,d3\n";
  char buf[160];
  for (std::size_t k = 0; k < maps.grid.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g\n", maps.grid[k],
                  maps.f_vals[0][k] - maps.grid[k],
                  maps.f_vals[1][k] - maps.grid[k],
                  maps.f_vals[2][k] - maps.grid[k]);
    out += buf;
  }
  return out;
}

int cmd_classify(const CommonOpts& o) {
  const RunConfig cfg = resolve_config(o);
  const StabilityVerdict v = classify(family_from_config(cfg));
  json j = verdict_json(v);
  j["scenario"] = cfg.name;
  write_file(fs::path(o.out_dir) / "classify.json", j.dump(2) + "\n");
  std::cout << cfg.name << ": " << to_string(v.l_status) << ", "
            << to_string(v.t_status) << "\n";
  return 0;
}

int cmd_ergodic(const CommonOpts& o) {
  const RunConfig cfg = resolve_config(o);
  HaarSampler sampler(cfg.seed);
  std::string csv = "test,parameter,count,value,pass\n";
  char row[256];
  bool all_pass = true;
  auto emit = [&](const std::string& test, const std::string& param,
                  long count, double value, bool pass) {
    std::snprintf(row, sizeof(row), "%s,%s,%ld,%.12g,%s\n", test.c_str(),
                  param.c_str(), count, value, pass ? "true" : "false");
    csv += row;
    all_pass = all_pass && pass;
  };

  // Geometric closed form for the u-only monomials.
  const long n_closed = std::min<long>(cfg.birkhoff_n, 10000);
  for (const int n : {1, -1, 2, -2, 3, -3}) {
    const TorusPoint p0{sampler.uniform(), sampler.uniform()};
    const Monomial f{n, 0};
    const auto direct = birkhoff_avg(f, cfg.skew_c, p0, n_closed);
    const auto closed = birkhoff_closed_form(f, cfg.skew_c, p0, n_closed);
    const double residual = std::abs(direct - closed);
    emit("closed_form", "n=" + std::to_string(n), n_closed, residual,
         residual < 1e-10);
  }

  // Decay of every nonconstant monomial over random starts.
  std::vector<TorusPoint> starts;
  for (int s = 0; s < cfg.n_starts; ++s) {
    starts.push_back({sampler.uniform(), sampler.uniform()});
  }
  for (int n = -cfg.monomial_range; n <= cfg.monomial_range; ++n) {
    for (int m = -cfg.monomial_range; m <= cfg.monomial_range; ++m) {
      if (n == 0 && m == 0) continue;
      double worst = 0.0;
      for (const auto& p0 : starts) {
        worst = std::max(
            worst, std::abs(birkhoff_avg({n, m}, cfg.skew_c, p0,
                                         cfg.birkhoff_n)));
      }
      emit("birkhoff",
           "n=" + std::to_string(n) + ";m=" + std::to_string(m),
           cfg.birkhoff_n, worst, worst < 0.05);
    }
  }

  // Equidistribution of the (1, sqrt 2, 0) flow, sampled two ways.
  {
    const NilPoint start = sampler.sample();
    const double v2 = std::sqrt(2.0);
    std::vector<NilPoint> section_pts;
    section_pts.reserve(cfg.discrepancy_samples);
    Vec2 yw{start.y2, start.y3};
    for (long k = 0; k < cfg.discrepancy_samples; ++k) {
      section_pts.push_back(NilPoint{start.y1, yw[0], yw[1]});
      yw = return_map(v2, 0.0, start.y1, yw);
    }
    const double d_section =
        box_discrepancy(section_pts, cfg.discrepancy_boxes);
    emit("discrepancy", "return_map", cfg.discrepancy_samples, d_section,
         d_section < 0.05);

    const auto orbit = unit_time_orbit(AlgebraVec{1.0, v2, 0.0}, start,
                                       cfg.discrepancy_samples);
    const double d_orbit = box_discrepancy(orbit, cfg.discrepancy_boxes);
    emit("discrepancy", "group_orbit", cfg.discrepancy_samples, d_orbit,
         d_orbit < 0.05);
  }

  write_file(fs::path(o.out_dir) / "ergodic.csv", csv);
  std::cout << (all_pass ? "all rows pass\n" : "some rows FAIL\n");
  return 0;
}

int cmd_holonomy(const CommonOpts& o) {
  const RunConfig cfg = resolve_config(o);
  const ExperimentSpec spec = experiment_from_config(cfg);
  const ActionFields fields = fields_from_spec(spec);
  GridSpec grid;
  grid.n_points = spec.grid_points;
  grid.delta_near = spec.delta_near;
  grid.dt = spec.dt;
  const HolonomyMaps maps =
      holonomy_maps(fields, identity_elem(), grid, spec.jobs);
  const PseudogroupReport pg = check_pseudogroup_relations(maps);
  const TranslationResult tr =
      translation_number(maps, 0.0, spec.translation_iterations);

  json j{{"scenario", cfg.name},
         {"max_displacement",
          {maps.max_displacement(0), maps.max_displacement(1),
           maps.max_displacement(2)}},
         {"pseudogroup", pseudogroup_json(pg)},
         {"compact_at_zero", is_compact_leaf(maps, 0.0)},
         {"abelian_at_zero", is_abelian_leaf(maps, 0.0)},
         {"translation", translation_json(tr)}};
  write_file(fs::path(o.out_dir) / "holonomy.json", j.dump(2) + "\n");
  write_file(fs::path(o.out_dir) / "holonomy.csv", holonomy_csv(maps));
  write_file(fs::path(o.out_dir) / "displacement.csv",
             displacement_csv(maps));
  return 0;
}

int cmd_tau(const CommonOpts& o) {
  const RunConfig cfg = resolve_config(o);
  ExperimentSpec spec = experiment_from_config(cfg);
  spec.run_discrepancy = false;
  const ExperimentReport rep = run_experiment(spec);
  json j{{"scenario", cfg.name},
         {"translation", translation_json(rep.translation)},
         {"horizontal_generator",
          {rep.horizontal_generator.v1, rep.horizontal_generator.v2,
           rep.horizontal_generator.v3}},
         {"tau_e3", rep.tau_e3 ? drift_json(*rep.tau_e3) : json(nullptr)},
         {"tau_horizontal", rep.tau_horizontal
                                ? drift_json(*rep.tau_horizontal)
                                : json(nullptr)},
         {"xi_e3", rep.xi_e3 ? json{(*rep.xi_e3)[0], (*rep.xi_e3)[1]}
                             : json(nullptr)},
         {"failures", rep.failures}};
  write_file(fs::path(o.out_dir) / "tau.json", j.dump(2) + "\n");
  return rep.ok() ? 0 : 1;
}

int cmd_experiment(const CommonOpts& o) {
  const RunConfig cfg = resolve_config(o);
  const ExperimentSpec spec = experiment_from_config(cfg);
  const ExperimentReport rep = run_experiment(spec);

  write_file(fs::path(o.out_dir) / "experiment.json",
             experiment_json(rep).dump(2) + "\n");
  write_file(fs::path(o.out_dir) / "summary.csv", summary_csv(rep));
  if (rep.maps) {
    write_file(fs::path(o.out_dir) / "holonomy.csv", holonomy_csv(*rep.maps));
    write_file(fs::path(o.out_dir) / "displacement.csv",
               displacement_csv(*rep.maps));
  }
  // One plot-ready lift: the gamma_2 loop from the middle of the strip.
  try {
    const ActionFields fields = fields_from_spec(spec);
    const LiftResult lift = lift_path(
        fields, generator_path(identity_elem(), 2, 1.0), 0.0, spec.dt);
    write_file(fs::path(o.out_dir) / "trajectory.csv",
               trajectory_csv(lift.traj));
  } catch (const std::exception& e) {
    std::cout << "trajectory skipped: " << e.what() << "\n";
  }

  std::cout << rep.name << ": " << to_string(rep.verdict.l_status) << ", "
            << to_string(rep.verdict.t_status)
            << (rep.compact_at_zero ? "; compact at 0" : "; noncompact at 0");
  if (!rep.failures.empty()) {
    std::cout << "; " << rep.failures.size() << " stage failure(s)";
  }
  std::cout << "\n";
  return rep.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for locally free actions on the "
               "Heisenberg nilmanifold strip"};
  app.require_subcommand(1);
  CommonOpts opts;

  auto* classify_cmd =
      app.add_subcommand("classify", "Stability verdict of a family");
  auto* ergodic_cmd = app.add_subcommand(
      "ergodic", "Birkhoff averages and equidistribution tests");
  auto* holonomy_cmd =
      app.add_subcommand("holonomy", "Holonomy pseudogroup of an action");
  auto* tau_cmd =
      app.add_subcommand("tau", "Abelianized drift estimates");
  auto* experiment_cmd =
      app.add_subcommand("experiment", "Full report for a scenario");
  for (auto* sub :
       {classify_cmd, ergodic_cmd, holonomy_cmd, tau_cmd, experiment_cmd}) {
    add_common(sub, opts);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (classify_cmd->parsed()) return cmd_classify(opts);
    if (ergodic_cmd->parsed()) return cmd_ergodic(opts);
    if (holonomy_cmd->parsed()) return cmd_holonomy(opts);
    if (tau_cmd->parsed()) return cmd_tau(opts);
    if (experiment_cmd->parsed()) return cmd_experiment(opts);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
