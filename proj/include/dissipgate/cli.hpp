#pragma once

// Command-line front end. Resolves a run configuration from an optional JSON
// document plus flag overrides, executes one subcommand, and writes
// figure-ready CSV/JSON artifacts. Every CSV embeds the fully resolved config
// so the file can be reproduced byte-identically (timestamp line aside).

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dissipgate/analytic.hpp"
#include "dissipgate/optimize.hpp"

namespace dissipgate {

using Json = nlohmann::ordered_json;

struct RunConfig {
  std::string gate = "or-spont";  // or-spont | or-osc | or-hybrid | nor | xor
  SystemParams params;
  bool noise_enabled = true;
  // sweep
  std::string axis = "r";
  double axis_min = 0.2, axis_max = 0.8;
  int axis_points = 13;
  std::string axis2;
  double axis2_min = 0.01, axis2_max = 0.6;
  int axis2_points = 25;
  std::string reoptimize;  // "" or "omega"
  double omega_min = 0.07, omega_max = 0.2;
  int omega_points = 6;
  // optimize
  std::vector<std::string> free_params{"omega", "gamma"};
  std::vector<double> bounds_min{0.01, 0.01};
  std::vector<double> bounds_max{0.4, 0.6};
  std::optional<std::vector<double>> start;
  int coarse_points = 5;
  int max_evals = 80;
  // analytic
  double scan_min = 0.05, scan_max = 0.3;
  int scan_points = 20;
  // simulate
  double t_final = 0.0;  // 0: auto from the engineered rates
  int sim_points = 200;
  // common
  std::string out_dir = ".";
  int threads = 0;
  unsigned seed = 0;
};

namespace detail {

inline GateScheme scheme_of(const std::string& gate) {
  if (gate == "or-spont") return GateScheme::kSpontaneous;
  if (gate == "or-osc") return GateScheme::kOscillator;
  if (gate == "or-hybrid") return GateScheme::kHybrid;
  throw std::invalid_argument("gate '" + gate + "' is not a single-phase OR scheme");
}

inline void require_keys(const Json& j, const char* where,
                         std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok)
      throw std::invalid_argument(std::string("config: unknown key '") + key +
                                  "' in " + where);
  }
}

inline void get_if(const Json& j, const char* key, double& out) {
  if (j.contains(key)) out = j.at(key).get<double>();
}
inline void get_if(const Json& j, const char* key, int& out) {
  if (j.contains(key)) out = j.at(key).get<int>();
}
inline void get_if(const Json& j, const char* key, bool& out) {
  if (j.contains(key)) out = j.at(key).get<bool>();
}
inline void get_if(const Json& j, const char* key, std::string& out) {
  if (j.contains(key)) out = j.at(key).get<std::string>();
}

}  // namespace detail

// applies a parsed JSON document onto cfg; rejects unknown keys everywhere
inline void apply_config(RunConfig& cfg, const Json& j) {
  detail::require_keys(j, "top level",
                       {"gate", "params", "noise", "sweep", "optimize",
                        "analytic", "simulate", "out", "threads", "seed"});
  detail::get_if(j, "gate", cfg.gate);
  detail::get_if(j, "out", cfg.out_dir);
  detail::get_if(j, "threads", cfg.threads);
  if (j.contains("seed")) cfg.seed = j.at("seed").get<unsigned>();
  if (j.contains("params")) {
    const Json& p = j.at("params");
    detail::require_keys(p, "params",
                         {"g", "gamma", "kappa", "omega", "delta", "Delta",
                          "r", "gamma_g", "fock"});
    detail::get_if(p, "g", cfg.params.g);
    detail::get_if(p, "gamma", cfg.params.gamma);
    detail::get_if(p, "kappa", cfg.params.kappa);
    detail::get_if(p, "omega", cfg.params.omega);
    detail::get_if(p, "delta", cfg.params.delta);
    detail::get_if(p, "Delta", cfg.params.Delta);
    if (p.contains("r") && !p.at("r").is_null())
      cfg.params.r = p.at("r").get<double>();
    if (p.contains("gamma_g") && !p.at("gamma_g").is_null())
      cfg.params.gamma_g = p.at("gamma_g").get<double>();
    detail::get_if(p, "fock", cfg.params.fock_cutoff);
  }
  if (j.contains("noise")) {
    const Json& n = j.at("noise");
    detail::require_keys(n, "noise", {"t1", "t2", "enabled"});
    detail::get_if(n, "t1", cfg.params.t1);
    detail::get_if(n, "t2", cfg.params.t2);
    detail::get_if(n, "enabled", cfg.noise_enabled);
  }
  if (j.contains("sweep")) {
    const Json& s = j.at("sweep");
    detail::require_keys(s, "sweep",
                         {"axis", "min", "max", "points", "axis2", "min2",
                          "max2", "points2", "reoptimize", "omega_min",
                          "omega_max", "omega_points"});
    detail::get_if(s, "axis", cfg.axis);
    detail::get_if(s, "min", cfg.axis_min);
    detail::get_if(s, "max", cfg.axis_max);
    detail::get_if(s, "points", cfg.axis_points);
    detail::get_if(s, "axis2", cfg.axis2);
    detail::get_if(s, "min2", cfg.axis2_min);
    detail::get_if(s, "max2", cfg.axis2_max);
    detail::get_if(s, "points2", cfg.axis2_points);
    detail::get_if(s, "reoptimize", cfg.reoptimize);
    detail::get_if(s, "omega_min", cfg.omega_min);
    detail::get_if(s, "omega_max", cfg.omega_max);
    detail::get_if(s, "omega_points", cfg.omega_points);
  }
  if (j.contains("optimize")) {
    const Json& o = j.at("optimize");
    detail::require_keys(
        o, "optimize", {"free", "min", "max", "start", "coarse", "max_evals"});
    if (o.contains("free"))
      cfg.free_params = o.at("free").get<std::vector<std::string>>();
    if (o.contains("min"))
      cfg.bounds_min = o.at("min").get<std::vector<double>>();
    if (o.contains("max"))
      cfg.bounds_max = o.at("max").get<std::vector<double>>();
    if (o.contains("start") && !o.at("start").is_null())
      cfg.start = o.at("start").get<std::vector<double>>();
    detail::get_if(o, "coarse", cfg.coarse_points);
    detail::get_if(o, "max_evals", cfg.max_evals);
  }
  if (j.contains("analytic")) {
    const Json& a = j.at("analytic");
    detail::require_keys(a, "analytic", {"min", "max", "points"});
    detail::get_if(a, "min", cfg.scan_min);
    detail::get_if(a, "max", cfg.scan_max);
    detail::get_if(a, "points", cfg.scan_points);
  }
  if (j.contains("simulate")) {
    const Json& s = j.at("simulate");
    detail::require_keys(s, "simulate", {"t_final", "points"});
    detail::get_if(s, "t_final", cfg.t_final);
    detail::get_if(s, "points", cfg.sim_points);
  }
}

// the complete resolved state; parseable by apply_config and echoed into
// every artifact
inline Json resolved_json(const RunConfig& c) {
  Json j;
  j["gate"] = c.gate;
  Json p;
  p["g"] = c.params.g;
  p["gamma"] = c.params.gamma;
  p["kappa"] = c.params.kappa;
  p["omega"] = c.params.omega;
  p["delta"] = c.params.delta;
  p["Delta"] = c.params.Delta;
  if (c.params.r) p["r"] = *c.params.r;
  if (c.params.gamma_g) p["gamma_g"] = *c.params.gamma_g;
  p["fock"] = c.params.fock_cutoff;
  j["params"] = p;
  j["noise"] = Json{{"t1", c.params.t1}, {"t2", c.params.t2},
                    {"enabled", c.noise_enabled}};
  j["sweep"] = Json{{"axis", c.axis},
                    {"min", c.axis_min},
                    {"max", c.axis_max},
                    {"points", c.axis_points},
                    {"axis2", c.axis2},
                    {"min2", c.axis2_min},
                    {"max2", c.axis2_max},
                    {"points2", c.axis2_points},
                    {"reoptimize", c.reoptimize},
                    {"omega_min", c.omega_min},
                    {"omega_max", c.omega_max},
                    {"omega_points", c.omega_points}};
  Json o;
  o["free"] = c.free_params;
  o["min"] = c.bounds_min;
  o["max"] = c.bounds_max;
  if (c.start) o["start"] = *c.start;
  o["coarse"] = c.coarse_points;
  o["max_evals"] = c.max_evals;
  j["optimize"] = o;
  j["analytic"] =
      Json{{"min", c.scan_min}, {"max", c.scan_max}, {"points", c.scan_points}};
  j["simulate"] = Json{{"t_final", c.t_final}, {"points", c.sim_points}};
  j["out"] = c.out_dir;
  j["threads"] = c.threads;
  j["seed"] = c.seed;
  return j;
}

namespace detail {

inline std::string sci(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.8e", v);
  return buf;
}

struct CsvWriter {
  std::ofstream out;
  CsvWriter(const std::string& path, const std::string& command,
            const Json& config) {
    out.open(path);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    char stamp[64];
    const std::time_t now = std::time(nullptr);
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out << "# dissipgate " << command << "\n";
    out << "# config: " << config.dump() << "\n";
    out << "# generated: " << stamp << "\n";
  }
  void header(const std::vector<std::string>& cols) {
    for (size_t i = 0; i < cols.size(); ++i)
      out << cols[i] << (i + 1 < cols.size() ? "," : "\n");
  }
  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i)
      out << cells[i] << (i + 1 < cells.size() ? "," : "\n");
  }
};

inline void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << j.dump(2) << "\n";
}

inline std::string out_path(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

inline GateSchedule schedule_for(const RunConfig& cfg) {
  GateSchedule gs =
      cfg.gate == "nor" ? build_nor(cfg.params) : build_xor(cfg.params);
  if (cfg.noise_enabled)
    gs = with_ground_noise(std::move(gs), cfg.params.t1, cfg.params.t2);
  return gs;
}

inline double schedule_time(const GateSchedule& gs) {
  double total = 0.0;
  for (const auto& [model, dt] : gs.schedule.phases) total += dt;
  return total;
}

// error series for any gate name; scheduled gates sample per phase
inline ErrorSeries series_for(const RunConfig& cfg) {
  if (cfg.gate == "nor" || cfg.gate == "xor")
    return error_series(schedule_for(cfg), std::max(2, cfg.sim_points / 8));
  GateSystem sys = build_gate(cfg.params, scheme_of(cfg.gate));
  if (cfg.noise_enabled)
    sys = with_ground_noise(std::move(sys), cfg.params.t1, cfg.params.t2);
  std::vector<double> times;
  if (cfg.t_final > 0.0) times = default_time_grid(cfg.t_final, cfg.sim_points);
  return error_series(sys, times);
}

}  // namespace detail

inline int cmd_simulate(const RunConfig& cfg) {
  const Json config = resolved_json(cfg);
  const ErrorSeries series = detail::series_for(cfg);
  const GateResult best = optimal_gate_time(series);

  detail::CsvWriter csv(detail::out_path(cfg, "simulate.csv"), "simulate",
                        config);
  csv.header({"time_ns", "pe_00", "pe_01", "pe_10", "pe_11", "pe_avg"});
  static const char* kInputs[] = {"00", "01", "10", "11"};
  for (size_t i = 0; i < series.times.size(); ++i) {
    std::vector<std::string> cells{detail::sci(series.times[i])};
    for (const char* in : kInputs)
      cells.push_back(detail::sci(series.errors.at(in)[i]));
    cells.push_back(detail::sci(series.average[i]));
    csv.row(cells);
  }

  Json summary;
  summary["t_opt_ns"] = best.t_opt;
  summary["min_error"] = best.min_error;
  summary["boundary"] = best.boundary;
  if (cfg.gate != "nor" && cfg.gate != "xor" && best.t_opt > 0.0) {
    GateSystem sys = build_gate(cfg.params, detail::scheme_of(cfg.gate));
    if (cfg.noise_enabled)
      sys = with_ground_noise(std::move(sys), cfg.params.t1, cfg.params.t2);
    Json photons;
    double avg = 0.0;
    for (const char* in : kInputs) {
      const double n = photon_count(sys, in, best.t_opt);
      photons[in] = n;
      avg += 0.25 * n;
    }
    summary["photons"] = photons;
    summary["photons_avg"] = avg;
  }
  summary["config"] = config;
  detail::write_json(detail::out_path(cfg, "simulate_summary.json"), summary);
  return 0;
}

inline int cmd_sweep(const RunConfig& cfg) {
  const Json config = resolved_json(cfg);
  SweepSpec spec;
  spec.base = cfg.params;
  spec.scheme = detail::scheme_of(cfg.gate);
  spec.noise = cfg.noise_enabled;
  spec.threads = cfg.threads;
  spec.axis1 = {cfg.axis, log_grid(cfg.axis_min, cfg.axis_max, cfg.axis_points)};
  if (!cfg.axis2.empty())
    spec.axis2 = AxisSpec{
        cfg.axis2, log_grid(cfg.axis2_min, cfg.axis2_max, cfg.axis2_points)};
  if (cfg.reoptimize == "omega") {
    spec.omega_grid = log_grid(cfg.omega_min, cfg.omega_max, cfg.omega_points);
  } else if (!cfg.reoptimize.empty()) {
    throw std::invalid_argument("sweep: can only re-optimize 'omega'");
  }
  const SweepResult res = sweep(spec);

  detail::CsvWriter csv(detail::out_path(cfg, "sweep.csv"), "sweep", config);
  std::vector<std::string> cols{cfg.axis};
  if (spec.axis2) cols.push_back(cfg.axis2);
  cols.insert(cols.end(),
              {"drive_omega", "min_error", "t_opt_ns", "boundary", "failed"});
  csv.header(cols);
  for (const auto& pt : res.points) {
    std::vector<std::string> cells{detail::sci(pt.x1)};
    if (spec.axis2) cells.push_back(detail::sci(pt.x2));
    cells.insert(cells.end(),
                 {detail::sci(pt.omega), detail::sci(pt.min_error),
                  detail::sci(pt.t_opt), pt.boundary ? "1" : "0",
                  pt.failed ? "1" : "0"});
    csv.row(cells);
  }

  Json summary;
  summary["points"] = res.points.size();
  summary["best_index"] = res.best_index;
  if (res.best_index >= 0) {
    const auto& b = res.points[res.best_index];
    summary["best"] = Json{{cfg.axis, b.x1},
                           {"drive_omega", b.omega},
                           {"min_error", b.min_error},
                           {"t_opt_ns", b.t_opt}};
    if (spec.axis2) summary["best"][cfg.axis2] = b.x2;
  }
  summary["config"] = config;
  detail::write_json(detail::out_path(cfg, "sweep_summary.json"), summary);
  return 0;
}

inline int cmd_optimize(const RunConfig& cfg) {
  const Json config = resolved_json(cfg);
  MinimizeOptions opt;
  opt.free = cfg.free_params;
  if (cfg.bounds_min.size() != opt.free.size() ||
      cfg.bounds_max.size() != opt.free.size())
    throw std::invalid_argument("optimize: min/max bounds must match free list");
  for (size_t i = 0; i < opt.free.size(); ++i)
    opt.bounds.emplace_back(cfg.bounds_min[i], cfg.bounds_max[i]);
  opt.start = cfg.start;
  opt.coarse_points = cfg.coarse_points;
  opt.max_evals = cfg.max_evals;
  opt.scheme = detail::scheme_of(cfg.gate);
  opt.noise = cfg.noise_enabled;
  opt.threads = cfg.threads;
  const MinimizeResult res = minimize(cfg.params, opt);

  detail::CsvWriter csv(detail::out_path(cfg, "optimize.csv"), "optimize",
                        config);
  std::vector<std::string> cols{"eval"};
  cols.insert(cols.end(), cfg.free_params.begin(), cfg.free_params.end());
  cols.push_back("min_error");
  csv.header(cols);
  for (size_t i = 0; i < res.trace.size(); ++i) {
    std::vector<std::string> cells{std::to_string(i)};
    for (double x : res.trace[i].x) cells.push_back(detail::sci(x));
    cells.push_back(detail::sci(res.trace[i].error));
    csv.row(cells);
  }

  Json summary;
  for (const auto& name : cfg.free_params)
    summary["best"][name] = get_param(res.params, name);
  summary["min_error"] = res.result.min_error;
  summary["t_opt_ns"] = res.result.t_opt;
  summary["hit_bounds"] = res.hit_bounds;
  summary["evaluations"] = res.trace.size();
  summary["config"] = config;
  detail::write_json(detail::out_path(cfg, "optimize_summary.json"), summary);
  return 0;
}

inline int cmd_analytic(const RunConfig& cfg) {
  const Json config = resolved_json(cfg);
  detail::CsvWriter csv(detail::out_path(cfg, "analytic.csv"), "analytic",
                        config);
  csv.header({"omega", "t_opt_analytic", "t_opt_full", "pe_analytic",
              "pe_full"});
  const auto omegas = log_grid(cfg.scan_min, cfg.scan_max, cfg.scan_points);
  double best_an = 1e9, best_full = 1e9, om_an = 0, om_full = 0;
  for (double om : omegas) {
    SystemParams p = cfg.params;
    p.omega = om;
    const AnalyticSolution an = analytic_gate(p);
    const GateResult full = evaluate_point(p, detail::scheme_of(cfg.gate),
                                           cfg.noise_enabled);
    csv.row({detail::sci(om), detail::sci(an.t_opt), detail::sci(full.t_opt),
             detail::sci(an.pe_avg_min), detail::sci(full.min_error)});
    if (an.valid_regime && an.pe_avg_min < best_an) {
      best_an = an.pe_avg_min;
      om_an = om;
    }
    if (full.min_error < best_full) {
      best_full = full.min_error;
      om_full = om;
    }
  }
  Json summary;
  summary["analytic"] = Json{{"omega", om_an}, {"min_error", best_an}};
  summary["full"] = Json{{"omega", om_full}, {"min_error", best_full}};
  summary["config"] = config;
  detail::write_json(detail::out_path(cfg, "analytic_summary.json"), summary);
  return 0;
}

inline int cmd_photons(const RunConfig& cfg) {
  const Json config = resolved_json(cfg);
  static const char* kInputs[] = {"00", "01", "10", "11"};
  Json summary;
  detail::CsvWriter csv(detail::out_path(cfg, "photons.csv"), "photons",
                        config);
  csv.header({"input", "photons"});
  double avg = 0.0;
  if (cfg.gate == "nor" || cfg.gate == "xor") {
    const GateSchedule gs = detail::schedule_for(cfg);
    for (const char* in : kInputs) {
      const double n = photon_count(gs, in);
      csv.row({in, detail::sci(n)});
      summary["photons"][in] = n;
      avg += 0.25 * n;
    }
    summary["t_opt_ns"] = detail::schedule_time(gs);
  } else {
    GateSystem sys = build_gate(cfg.params, detail::scheme_of(cfg.gate));
    if (cfg.noise_enabled)
      sys = with_ground_noise(std::move(sys), cfg.params.t1, cfg.params.t2);
    const GateResult best = evaluate_gate(sys);
    for (const char* in : kInputs) {
      const double n = best.photon_counts.at(in);
      csv.row({in, detail::sci(n)});
      summary["photons"][in] = n;
      avg += 0.25 * n;
    }
    summary["t_opt_ns"] = best.t_opt;
    summary["min_error"] = best.min_error;
  }
  summary["photons_avg"] = avg;
  summary["config"] = config;
  detail::write_json(detail::out_path(cfg, "photons_summary.json"), summary);
  return 0;
}

inline int cmd_selftest(const RunConfig& cfg) {
  int failures = 0;
  const auto check = [&](const char* name, bool ok) {
    std::printf("%-38s %s\n", name, ok ? "PASS" : "FAIL");
    if (!ok) ++failures;
  };
  SystemParams p = cfg.params;
  const GateSystem sys = build_gate(p, GateScheme::kSpontaneous);
  const auto q = resolve_frequencies(p, 1.0);
  check("resonance condition delta*Delta = g^2",
        std::abs(q.delta * q.Delta - q.g * q.g) < 1e-12 * q.g * q.g);
  const OptimalDetunings od = optimal_detunings(p.g, p.gamma, p.kappa);
  check("detuning optimum identity r = gamma/kappa",
        std::abs(od.r_opt - p.gamma / p.kappa) < 1e-12);
  const AnalyticSolution an = resonant_solution(p);
  check("closed-form initial condition pe01(0)=1",
        std::abs(an.pe01(0.0) - 1.0) < 1e-9);
  const int n = sys.model.space.total();
  Matrix rho0 = Matrix::Zero(n, n);
  const int k01 = sys.ground_basis.at("01");
  rho0(k01, k01) = 1.0;
  const Trajectory traj =
      evolve(sys.model, DensityMatrix{sys.model.space, rho0}, {0.0, 2.0, 5.0});
  bool phys = true;
  for (const auto& st : traj.states) {
    phys = phys && std::abs(st.mat.trace().real() - 1.0) < 1e-8;
    phys = phys && (st.mat - st.mat.adjoint()).cwiseAbs().maxCoeff() < 1e-8;
  }
  check("trace and Hermiticity preserved", phys);
  const RateSet rs = rates(p);
  check("engineered rates positive and ordered",
        rs.gamma_plus > rs.gamma_minus && rs.gamma_minus > 0.0);
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 3;
}

inline int run_cli(int argc, const char* const* argv) {
  RunConfig cfg;
  std::string command;
  try {
    CLI::App app{"dissipation-engineered classical gate simulator"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    std::string config_path, preset;
    std::optional<double> g, gamma, kappa, omega, delta, big_delta, r, t1, t2;
    std::optional<int> fock, threads;
    std::optional<std::string> gate, out_dir;
    bool no_noise = false;
    std::optional<std::string> axis, axis2, reoptimize, omega_scan, free_list;
    std::optional<double> axis_min, axis_max, t_final;
    std::optional<int> axis_points, axis2_points, sim_points;

    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--preset", preset, "named parameter preset");
    app.add_option("--gate", gate, "or-spont | or-osc | or-hybrid | nor | xor");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker thread cap");
    app.add_option("--fock", fock, "oscillator truncation");
    app.add_option("--g", g, "coupling /2pi GHz");
    app.add_option("--gamma", gamma, "emitter decay /2pi GHz");
    app.add_option("--kappa", kappa, "oscillator decay /2pi GHz");
    app.add_option("--omega", omega, "drive /2pi GHz");
    app.add_option("--delta", delta, "oscillator detuning /2pi GHz");
    app.add_option("--big-delta", big_delta, "excited-state detuning /2pi GHz");
    app.add_option("--r", r, "detuning ratio Delta/delta");
    app.add_option("--t1", t1, "ground-flip time scale us");
    app.add_option("--t2", t2, "coherence time scale us");
    app.add_flag("--no-noise", no_noise, "disable the T1/T2 channels");

    CLI::App* sim = app.add_subcommand("simulate", "error series over time");
    sim->add_option("--t-final", t_final, "series end time ns (0: auto)");
    sim->add_option("--points", sim_points, "number of time samples");
    CLI::App* swp = app.add_subcommand("sweep", "grid sweep over parameters");
    swp->add_option("--axis", axis, "first swept parameter");
    swp->add_option("--min", axis_min, "axis start");
    swp->add_option("--max", axis_max, "axis end");
    swp->add_option("--points", axis_points, "axis resolution");
    swp->add_option("--axis2", axis2, "second swept parameter");
    swp->add_option("--points2", axis2_points, "second axis resolution");
    swp->add_option("--reoptimize", reoptimize, "re-optimize 'omega' per point");
    CLI::App* opt = app.add_subcommand("optimize", "derivative-free minimum");
    opt->add_option("--free", free_list, "comma-separated free parameters");
    CLI::App* ana =
        app.add_subcommand("analytic", "closed form vs full simulation");
    ana->add_option("--omega-scan", omega_scan, "drive scan lo:hi:points");
    app.add_subcommand("photons", "scattered photons at the optimal time");
    app.add_subcommand("selftest", "quick invariant checks");

    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      app.exit(e);
      return 2;
    }
    command = app.get_subcommands().front()->get_name();

    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in)
        throw std::invalid_argument("cannot read config file " + config_path);
      Json j;
      in >> j;
      apply_config(cfg, j);
    }
    if (!preset.empty()) {
      if (preset != "paper-hardware")
        throw std::invalid_argument("unknown preset '" + preset + "'");
      cfg.params.g = 4.4;
      cfg.params.gamma = 0.3;
      cfg.params.kappa = 0.6;
      cfg.params.t1 = 20.0;
      cfg.params.t2 = 1.0;
    }
    if (gate) cfg.gate = *gate;
    if (out_dir) cfg.out_dir = *out_dir;
    if (threads) cfg.threads = *threads;
    if (fock) cfg.params.fock_cutoff = *fock;
    if (g) cfg.params.g = *g;
    if (gamma) cfg.params.gamma = *gamma;
    if (kappa) cfg.params.kappa = *kappa;
    if (omega) cfg.params.omega = *omega;
    if (delta) cfg.params.delta = *delta;
    if (big_delta) cfg.params.Delta = *big_delta;
    if (r) cfg.params.r = *r;
    if (t1) cfg.params.t1 = *t1;
    if (t2) cfg.params.t2 = *t2;
    if (no_noise) cfg.noise_enabled = false;
    if (axis) cfg.axis = *axis;
    if (axis_min) cfg.axis_min = *axis_min;
    if (axis_max) cfg.axis_max = *axis_max;
    if (axis_points) cfg.axis_points = *axis_points;
    if (axis2) cfg.axis2 = *axis2;
    if (axis2_points) cfg.axis2_points = *axis2_points;
    if (reoptimize) cfg.reoptimize = *reoptimize;
    if (t_final) cfg.t_final = *t_final;
    if (sim_points) cfg.sim_points = *sim_points;
    if (free_list) {
      cfg.free_params.clear();
      std::stringstream ss(*free_list);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) cfg.free_params.push_back(item);
    }
    if (omega_scan) {
      std::stringstream ss(*omega_scan);
      std::string a, b, c;
      if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') ||
          !std::getline(ss, c))
        throw std::invalid_argument("--omega-scan expects lo:hi:points");
      cfg.scan_min = std::stod(a);
      cfg.scan_max = std::stod(b);
      cfg.scan_points = std::stoi(c);
    }

    static const char* kGates[] = {"or-spont", "or-osc", "or-hybrid", "nor",
                                   "xor"};
    bool known = false;
    for (const char* k : kGates) known = known || cfg.gate == k;
    if (!known) throw std::invalid_argument("unknown gate '" + cfg.gate + "'");
    if (command != "simulate" && command != "photons" &&
        command != "selftest" && (cfg.gate == "nor" || cfg.gate == "xor"))
      throw std::invalid_argument("command '" + command +
                                  "' supports only the single-phase OR schemes");
    cfg.params.validate();
    if (command == "optimize" &&
        (cfg.bounds_min.size() != cfg.free_params.size() ||
         cfg.bounds_max.size() != cfg.free_params.size()))
      throw std::invalid_argument("optimize: min/max bounds must match free list");
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }

  try {
    if (command == "simulate") return cmd_simulate(cfg);
    if (command == "sweep") return cmd_sweep(cfg);
    if (command == "optimize") return cmd_optimize(cfg);
    if (command == "analytic") return cmd_analytic(cfg);
    if (command == "photons") return cmd_photons(cfg);
    if (command == "selftest") return cmd_selftest(cfg);
    std::fprintf(stderr, "config error: unknown command '%s'\n",
                 command.c_str());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 3;
  }
}

}  // namespace dissipgate
