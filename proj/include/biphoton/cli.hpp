// biphoton/cli.hpp
// Config-driven front end shared by the command-line tool and the tests.
// A run is described by one JSON document; loading fills every default
// explicitly, so the echoed config in each summary is a complete, re-runnable
// description of what actually happened. All outputs are deterministic for a
// given config on a given platform (worker count only changes scheduling).
#pragma once

#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "biphoton/errors.hpp"
#include "biphoton/io.hpp"
#include "biphoton/kernels.hpp"
#include "biphoton/lindyn.hpp"
#include "biphoton/mfdyn.hpp"
#include "biphoton/numerics.hpp"
#include "biphoton/params.hpp"

namespace biphoton {

// Sweep of the dimensionless coupling over a uniform grid, endpoints
// included. Only "coupling" can be swept; the name is explicit so configs
// stay self-describing.
struct SweepSpec {
  std::string parameter = "coupling";
  double from = 0.0;
  double to = 1.0;
  int steps = 5;
};

// Scan axis and fixed shape parameters for the kernels subcommand. x is the
// dimensionless scan variable: the retardation phase omega*r/c for the pair
// kernels, the overall scale of the unit triplet shape for u/v, and r in
// units of the resonant wavelength for the spectral integral.
struct KernelScan {
  double x_min = 1e-3;
  double x_max = 3.0;
  int x_count = 200;
  double omega = 1.0;      // pair-kernel frequency
  double cos_xi = 0.0;     // pair dipole angle
  double omega_r = 1.0;    // triplet frequencies and angles
  double omega_s = 1.0;
  double cos_xi_r = 0.0;
  double cos_xi_s = 0.0;
  double shape_mj = 1.0;   // unit triplet shape, scaled by x
  double shape_ml = 1.0;
  double shape_jl = 1.0;
  int nodes = 64;          // initial spectral panels for the quadrature op
  std::string v_mode = "full";
};

struct OutputNames {
  std::string trajectory = "trajectory.csv";
  std::string summary = "summary.json";
  std::string sweep = "sweep.csv";
  std::string kernel = "kernel.csv";
};

struct RunConfig {
  std::string model = "linear";  // linear | meanfield
  // Exactly one of the two parameter forms is present in a config file.
  bool has_physical = false;
  PhysicalSystem physical;
  double tau_r = 1.0;  // direct-rate form
  double tau_s = 1.0;
  double tau_b = 1.0;
  double coupling = 0.0;
  int n_r = 1;
  int n_s = 1;
  int n = 1;
  bool drive_enabled = true;
  double t_end = 0.0;  // resolved at load; 10*tau_b when absent
  int sample_count = 801;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  KernelScan kernel;
  SweepSpec sweep;
  OutputNames output;

  RateSet resolved_rates() const {
    if (has_physical) return rates_from_physical(physical);
    const double tau3 = coupling > 0.0 ? tau_b / coupling : kInfiniteTime;
    return collective_rates(tau_r, tau_s, tau_b, tau3);
  }
  IntegratorConfig integrator() const {
    IntegratorConfig c;
    c.rel_tol = rel_tol;
    c.abs_tol = abs_tol;
    return c;
  }
  MeanFieldParams meanfield_params() const {
    return {n_r, n_s, n, resolved_rates(), drive_enabled};
  }

  void validate() const {
    if (model != "linear" && model != "meanfield")
      throw config_error("config.model must be \"linear\" or \"meanfield\"");
    if (has_physical) {
      try {
        physical.validate();
      } catch (const error& e) {
        throw config_error(std::string("config.physical: ") + e.what());
      }
    } else {
      for (double tau : {tau_r, tau_s, tau_b}) {
        if (!(tau > 0.0) || !std::isfinite(tau))
          throw config_error(
              "config.rates: tau_r, tau_s, tau_b must be finite and > 0");
      }
      if (!(coupling >= 0.0) || !std::isfinite(coupling))
        throw config_error("config.rates.coupling must be finite and >= 0");
    }
    if (n_r < 1 || n_s < 1 || n < 1)
      throw config_error("config.sizes: n_r, n_s, n must be >= 1");
    if (!(t_end > 0.0) || !std::isfinite(t_end))
      throw config_error("config.t_end must be finite and > 0");
    if (sample_count < 2)
      throw config_error("config.sample_count must be >= 2");
    if (!(rel_tol > 0.0) || rel_tol > 1e-3)
      throw config_error("config.tolerances.rel_tol must lie in (0, 1e-3]");
    if (!(abs_tol > 0.0) || abs_tol > 1e-2)
      throw config_error("config.tolerances.abs_tol must lie in (0, 1e-2]");

    if (!(kernel.x_min >= 0.0) || !(kernel.x_max >= kernel.x_min) ||
        !std::isfinite(kernel.x_max))
      throw config_error(
          "config.geometry: need 0 <= x_min <= x_max, both finite");
    if (kernel.x_count < 1)
      throw config_error("config.geometry.x_count must be >= 1");
    for (double w : {kernel.omega, kernel.omega_r, kernel.omega_s}) {
      if (!(w > 0.0) || !std::isfinite(w))
        throw config_error(
            "config.geometry: frequencies must be finite and > 0");
    }
    for (double cx : {kernel.cos_xi, kernel.cos_xi_r, kernel.cos_xi_s}) {
      if (!(std::abs(cx) <= 1.0))
        throw config_error("config.geometry: |cos_xi| must be <= 1");
    }
    for (double s : {kernel.shape_mj, kernel.shape_ml, kernel.shape_jl}) {
      if (!(s >= 0.0) || !std::isfinite(s))
        throw config_error(
            "config.geometry: shape factors must be finite and >= 0");
    }
    if (kernel.nodes < 16)
      throw config_error("config.geometry.nodes must be >= 16");
    if (kernel.v_mode != "full" && kernel.v_mode != "simplified")
      throw config_error(
          "config.geometry.v_mode must be \"full\" or \"simplified\"");

    if (sweep.parameter != "coupling")
      throw config_error("config.sweep.parameter must be \"coupling\"");
    if (!(sweep.from >= 0.0) || !std::isfinite(sweep.to) ||
        !(sweep.to >= sweep.from))
      throw config_error(
          "config.sweep: need 0 <= from <= to (bounds ordered)");
    if (sweep.steps < 1) throw config_error("config.sweep.steps must be >= 1");

    for (const std::string* name :
         {&output.trajectory, &output.summary, &output.sweep, &output.kernel}) {
      if (name->empty())
        throw config_error("config.output: file names must be non-empty");
    }
  }
};

namespace detail {

inline void check_keys(const ordered_json& j,
                       const std::vector<std::string>& allowed,
                       const std::string& where) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const auto& k : allowed) ok = ok || k == item.key();
    if (!ok)
      throw config_error("unknown key \"" + item.key() + "\" in " + where);
  }
}

inline const ordered_json* find(const ordered_json& j, const std::string& key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

inline double get_num(const ordered_json& j, const std::string& key,
                      double fallback, const std::string& where) {
  const ordered_json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_number())
    throw config_error(where + "." + key + " must be a number");
  return v->get<double>();
}

inline int get_int(const ordered_json& j, const std::string& key, int fallback,
                   const std::string& where) {
  const ordered_json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_number())
    throw config_error(where + "." + key + " must be an integer");
  const double d = v->get<double>();
  if (d != std::floor(d) || std::abs(d) > 1e9)
    throw config_error(where + "." + key + " must be an integer");
  return static_cast<int>(d);
}

inline bool get_bool(const ordered_json& j, const std::string& key,
                     bool fallback, const std::string& where) {
  const ordered_json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_boolean())
    throw config_error(where + "." + key + " must be a boolean");
  return v->get<bool>();
}

inline std::string get_str(const ordered_json& j, const std::string& key,
                           const std::string& fallback,
                           const std::string& where) {
  const ordered_json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_string())
    throw config_error(where + "." + key + " must be a string");
  return v->get<std::string>();
}

}  // namespace detail

// Parse a config document. Unknown keys are rejected (typos should fail
// loudly, not silently fall back to defaults); every absent field takes its
// documented default; t_end falls back to ten two-photon lifetimes.
inline RunConfig config_from_json(const ordered_json& doc) {
  if (!doc.is_object()) throw config_error("config root must be a JSON object");
  detail::check_keys(doc,
                     {"model", "physical", "rates", "sizes", "drive_enabled",
                      "t_end", "sample_count", "tolerances", "geometry",
                      "sweep", "output"},
                     "config");
  const bool has_physical = doc.contains("physical");
  const bool has_rates = doc.contains("rates");
  if (has_physical == has_rates)
    throw config_error(
        "config must contain exactly one of \"physical\" or \"rates\"");

  RunConfig c;
  c.model = detail::get_str(doc, "model", c.model, "config");
  c.has_physical = has_physical;
  if (has_physical) {
    const ordered_json& p = doc.at("physical");
    if (!p.is_object()) throw config_error("config.physical must be an object");
    detail::check_keys(p,
                       {"omega_r", "omega_s", "omega_0", "omega_31", "omega_32",
                        "d_r", "d_s", "d_23", "d_31", "hbar", "c"},
                       "config.physical");
    PhysicalSystem& s = c.physical;
    s.omega_r = detail::get_num(p, "omega_r", s.omega_r, "config.physical");
    s.omega_s = detail::get_num(p, "omega_s", s.omega_s, "config.physical");
    s.omega_0 = detail::get_num(p, "omega_0", s.omega_0, "config.physical");
    s.omega_31 = detail::get_num(p, "omega_31", s.omega_31, "config.physical");
    s.omega_32 = detail::get_num(p, "omega_32", s.omega_32, "config.physical");
    s.d_r = detail::get_num(p, "d_r", s.d_r, "config.physical");
    s.d_s = detail::get_num(p, "d_s", s.d_s, "config.physical");
    s.d_23 = detail::get_num(p, "d_23", s.d_23, "config.physical");
    s.d_31 = detail::get_num(p, "d_31", s.d_31, "config.physical");
    s.hbar = detail::get_num(p, "hbar", s.hbar, "config.physical");
    s.c = detail::get_num(p, "c", s.c, "config.physical");
  } else {
    const ordered_json& r = doc.at("rates");
    if (!r.is_object()) throw config_error("config.rates must be an object");
    detail::check_keys(r, {"tau_r", "tau_s", "tau_b", "coupling"},
                       "config.rates");
    c.tau_r = detail::get_num(r, "tau_r", c.tau_r, "config.rates");
    c.tau_s = detail::get_num(r, "tau_s", c.tau_s, "config.rates");
    c.tau_b = detail::get_num(r, "tau_b", c.tau_b, "config.rates");
    c.coupling = detail::get_num(r, "coupling", c.coupling, "config.rates");
  }
  if (const ordered_json* sz = detail::find(doc, "sizes")) {
    if (!sz->is_object()) throw config_error("config.sizes must be an object");
    detail::check_keys(*sz, {"n_r", "n_s", "n"}, "config.sizes");
    c.n_r = detail::get_int(*sz, "n_r", c.n_r, "config.sizes");
    c.n_s = detail::get_int(*sz, "n_s", c.n_s, "config.sizes");
    c.n = detail::get_int(*sz, "n", c.n, "config.sizes");
  }
  // Ensemble sizes ride along on the physical system for rate conversions.
  c.physical.n_r = c.n_r;
  c.physical.n_s = c.n_s;
  c.physical.n = c.n;
  c.drive_enabled =
      detail::get_bool(doc, "drive_enabled", c.drive_enabled, "config");

  c.sample_count = detail::get_int(doc, "sample_count", c.sample_count, "config");
  if (const ordered_json* tol = detail::find(doc, "tolerances")) {
    if (!tol->is_object())
      throw config_error("config.tolerances must be an object");
    detail::check_keys(*tol, {"rel_tol", "abs_tol"}, "config.tolerances");
    c.rel_tol = detail::get_num(*tol, "rel_tol", c.rel_tol, "config.tolerances");
    c.abs_tol = detail::get_num(*tol, "abs_tol", c.abs_tol, "config.tolerances");
  }
  if (const ordered_json* g = detail::find(doc, "geometry")) {
    if (!g->is_object()) throw config_error("config.geometry must be an object");
    detail::check_keys(*g,
                       {"x_min", "x_max", "x_count", "omega", "cos_xi",
                        "omega_r", "omega_s", "cos_xi_r", "cos_xi_s",
                        "shape_mj", "shape_ml", "shape_jl", "nodes", "v_mode"},
                       "config.geometry");
    KernelScan& k = c.kernel;
    k.x_min = detail::get_num(*g, "x_min", k.x_min, "config.geometry");
    k.x_max = detail::get_num(*g, "x_max", k.x_max, "config.geometry");
    k.x_count = detail::get_int(*g, "x_count", k.x_count, "config.geometry");
    k.omega = detail::get_num(*g, "omega", k.omega, "config.geometry");
    k.cos_xi = detail::get_num(*g, "cos_xi", k.cos_xi, "config.geometry");
    k.omega_r = detail::get_num(*g, "omega_r", k.omega_r, "config.geometry");
    k.omega_s = detail::get_num(*g, "omega_s", k.omega_s, "config.geometry");
    k.cos_xi_r = detail::get_num(*g, "cos_xi_r", k.cos_xi_r, "config.geometry");
    k.cos_xi_s = detail::get_num(*g, "cos_xi_s", k.cos_xi_s, "config.geometry");
    k.shape_mj = detail::get_num(*g, "shape_mj", k.shape_mj, "config.geometry");
    k.shape_ml = detail::get_num(*g, "shape_ml", k.shape_ml, "config.geometry");
    k.shape_jl = detail::get_num(*g, "shape_jl", k.shape_jl, "config.geometry");
    k.nodes = detail::get_int(*g, "nodes", k.nodes, "config.geometry");
    k.v_mode = detail::get_str(*g, "v_mode", k.v_mode, "config.geometry");
  }
  if (const ordered_json* sw = detail::find(doc, "sweep")) {
    if (!sw->is_object()) throw config_error("config.sweep must be an object");
    detail::check_keys(*sw, {"parameter", "from", "to", "steps"},
                       "config.sweep");
    c.sweep.parameter =
        detail::get_str(*sw, "parameter", c.sweep.parameter, "config.sweep");
    c.sweep.from = detail::get_num(*sw, "from", c.sweep.from, "config.sweep");
    c.sweep.to = detail::get_num(*sw, "to", c.sweep.to, "config.sweep");
    c.sweep.steps = detail::get_int(*sw, "steps", c.sweep.steps, "config.sweep");
  }
  if (const ordered_json* o = detail::find(doc, "output")) {
    if (!o->is_object()) throw config_error("config.output must be an object");
    detail::check_keys(*o, {"trajectory", "summary", "sweep", "kernel"},
                       "config.output");
    c.output.trajectory =
        detail::get_str(*o, "trajectory", c.output.trajectory, "config.output");
    c.output.summary =
        detail::get_str(*o, "summary", c.output.summary, "config.output");
    c.output.sweep = detail::get_str(*o, "sweep", c.output.sweep, "config.output");
    c.output.kernel =
        detail::get_str(*o, "kernel", c.output.kernel, "config.output");
  }

  // The one context-dependent default: a horizon of ten two-photon lifetimes.
  if (doc.contains("t_end")) {
    c.t_end = detail::get_num(doc, "t_end", 0.0, "config");
  } else {
    double tau_b_eff = c.tau_b;
    if (c.has_physical) {
      try {
        tau_b_eff = tau_two_photon(c.physical);
      } catch (const error& e) {
        throw config_error(std::string("config.physical: ") + e.what());
      }
    }
    c.t_end = 10.0 * tau_b_eff;
  }

  c.validate();
  return c;
}

// Full echo: every field, resolved values, stable key order. Loading the
// echo reproduces the RunConfig exactly (the round-trip the tests pin down).
inline ordered_json to_json(const RunConfig& c) {
  ordered_json j;
  j["model"] = c.model;
  if (c.has_physical) {
    ordered_json p;
    p["omega_r"] = c.physical.omega_r;
    p["omega_s"] = c.physical.omega_s;
    p["omega_0"] = c.physical.omega_0;
    p["omega_31"] = c.physical.omega_31;
    p["omega_32"] = c.physical.omega_32;
    p["d_r"] = c.physical.d_r;
    p["d_s"] = c.physical.d_s;
    p["d_23"] = c.physical.d_23;
    p["d_31"] = c.physical.d_31;
    p["hbar"] = c.physical.hbar;
    p["c"] = c.physical.c;
    j["physical"] = p;
  } else {
    ordered_json r;
    r["tau_r"] = c.tau_r;
    r["tau_s"] = c.tau_s;
    r["tau_b"] = c.tau_b;
    r["coupling"] = c.coupling;
    j["rates"] = r;
  }
  j["sizes"] = ordered_json{{"n_r", c.n_r}, {"n_s", c.n_s}, {"n", c.n}};
  j["drive_enabled"] = c.drive_enabled;
  j["t_end"] = c.t_end;
  j["sample_count"] = c.sample_count;
  j["tolerances"] =
      ordered_json{{"rel_tol", c.rel_tol}, {"abs_tol", c.abs_tol}};
  ordered_json g;
  g["x_min"] = c.kernel.x_min;
  g["x_max"] = c.kernel.x_max;
  g["x_count"] = c.kernel.x_count;
  g["omega"] = c.kernel.omega;
  g["cos_xi"] = c.kernel.cos_xi;
  g["omega_r"] = c.kernel.omega_r;
  g["omega_s"] = c.kernel.omega_s;
  g["cos_xi_r"] = c.kernel.cos_xi_r;
  g["cos_xi_s"] = c.kernel.cos_xi_s;
  g["shape_mj"] = c.kernel.shape_mj;
  g["shape_ml"] = c.kernel.shape_ml;
  g["shape_jl"] = c.kernel.shape_jl;
  g["nodes"] = c.kernel.nodes;
  g["v_mode"] = c.kernel.v_mode;
  j["geometry"] = g;
  j["sweep"] = ordered_json{{"parameter", c.sweep.parameter},
                            {"from", c.sweep.from},
                            {"to", c.sweep.to},
                            {"steps", c.sweep.steps}};
  j["output"] = ordered_json{{"trajectory", c.output.trajectory},
                             {"summary", c.output.summary},
                             {"sweep", c.output.sweep},
                             {"kernel", c.output.kernel}};
  return j;
}

inline RunConfig load_config(const std::string& path) {
  std::string body;
  try {
    body = read_text_file(path);
  } catch (const io_error& e) {
    throw config_error(std::string("config: ") + e.what());
  }
  ordered_json doc;
  try {
    doc = ordered_json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw config_error(std::string("config parse failed: ") + e.what());
  }
  return config_from_json(doc);
}

namespace detail {

inline ordered_json rates_json(const RateSet& r) {
  ordered_json j;
  j["tau_r"] = r.tau_r;
  j["tau_s"] = r.tau_s;
  j["tau_b"] = r.tau_b;
  j["coupling"] = r.coupling;
  j["gamma3"] = r.gamma3();  // 1/tau3; 0 when the channel is off
  j["rate_a"] = r.rate_a;
  j["rate_b"] = r.rate_b;
  j["rate_c"] = r.rate_c;
  j["rate_d"] = r.rate_d;
  return j;
}

inline ordered_json stats_json(const OdeStats& s) {
  ordered_json j;
  j["accepted_steps"] = s.accepted;
  j["rejected_steps"] = s.rejected;
  j["rhs_evaluations"] = s.rhs_evals;
  return j;
}

inline std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace detail

// Integrate the configured model and write trajectory CSV plus JSON summary.
// Returns the summary document (tests inspect it without re-reading disk).
inline ordered_json run_simulate(const RunConfig& cfg,
                                 const std::string& out_dir) {
  cfg.validate();
  const RateSet rates = cfg.resolved_rates();
  std::filesystem::create_directories(out_dir);

  Trajectory traj;
  ordered_json results;
  if (cfg.model == "linear") {
    traj = integrate_linear(rates, cfg.t_end, cfg.integrator(),
                            cfg.sample_count);
    // Pair-emission rate of the doubly excited atom, algebraic in the state.
    const auto& n_d = traj.column("n_d");
    const auto& f = traj.column("f");
    std::vector<double> rate(n_d.size());
    for (std::size_t i = 0; i < n_d.size(); ++i)
      rate[i] = rates.rho_b() * n_d[i] + f[i];
    const SeriesPeak pk = detail::refine_peak(traj.times, rate);
    results["peak_rate"] = pk.value;
    results["peak_time"] = pk.t_peak;
  } else {
    const MeanFieldParams p = cfg.meanfield_params();
    traj = integrate_meanfield(p, cfg.t_end, cfg.integrator(),
                               cfg.sample_count);
    const EmissionRate er = emission_rate(traj);
    results["peak_rate"] = er.peak;
    results["peak_time"] = er.t_peak;
    // Sign changes of df/dt flag the oscillatory regime; derivatives come
    // from the model right-hand side, not differencing.
    int flips = 0;
    double prev = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      MeanFieldState y{traj.cols[0][i], traj.cols[1][i], traj.cols[2][i],
                       traj.cols[3][i]};
      const double dfdt = meanfield_rhs(y, traj.times[i], p).f;
      if (i > 0 && dfdt * prev < 0.0) flips++;
      prev = dfdt;
    }
    results["df_dt_sign_changes"] = flips;
  }
  ordered_json fin;
  for (std::size_t k = 0; k < traj.names.size(); ++k)
    fin[traj.names[k]] = traj.cols[k].back();
  results["final"] = fin;

  ordered_json summary;
  summary["command"] = "simulate";
  summary["model"] = cfg.model;
  summary["config"] = to_json(cfg);
  summary["rates"] = detail::rates_json(rates);
  summary["results"] = results;
  summary["integrator"] = detail::stats_json(traj.stats);
  summary["artifacts"] =
      ordered_json{{"trajectory", cfg.output.trajectory}};

  write_csv(detail::join_path(out_dir, cfg.output.trajectory), traj);
  write_json(detail::join_path(out_dir, cfg.output.summary), summary);
  return summary;
}

// Scan one kernel over the configured x grid and write (x, re, im) rows.
inline ordered_json run_kernels(const RunConfig& cfg, const std::string& op,
                                const std::string& out_dir) {
  cfg.validate();
  const KernelScan& k = cfg.kernel;
  const bool known = op == "chi" || op == "chib" || op == "fjl" ||
                     op == "u" || op == "v";
  if (!known)
    throw config_error("kernels op must be one of chi|chib|fjl|u|v, got \"" +
                       op + "\"");
  if ((op == "chib" || (op == "v" && k.v_mode == "full")) && k.x_min <= 0.0)
    throw config_error("config.geometry.x_min must be > 0 for op " + op);
  if (op == "chib" && k.x_max > M_PI)
    throw config_error(
        "config.geometry.x_max must be <= pi for op chib (kernel validity)");

  // The spectral integral needs the level structure; defaults are used when
  // the config is rate-based (echoed below, never silent).
  PhysicalSystem sys = cfg.has_physical ? cfg.physical : PhysicalSystem{};

  std::vector<double> xs(static_cast<std::size_t>(k.x_count));
  for (int i = 0; i < k.x_count; ++i) {
    xs[static_cast<std::size_t>(i)] =
        k.x_count == 1 ? k.x_min
                       : k.x_min + (k.x_max - k.x_min) * static_cast<double>(i) /
                             static_cast<double>(k.x_count - 1);
  }

  std::vector<std::vector<double>> rows;
  rows.reserve(xs.size());
  for (double x : xs) {
    cplx val;
    if (op == "chi") {
      val = chi_single(k.omega, {x / k.omega, k.cos_xi}, 1.0);
    } else if (op == "chib") {
      val = chi_two_photon_compact(k.omega, {x / k.omega, k.cos_xi}, 1.0);
    } else if (op == "fjl") {
      const double lambda0 = 2.0 * M_PI * sys.c / sys.omega_0;
      val = f_two_photon_quadrature(sys, {x * lambda0, k.cos_xi}, k.nodes);
    } else {
      const TripletGeometry geom{x * k.shape_mj, x * k.shape_ml,
                                 x * k.shape_jl, k.cos_xi_r, k.cos_xi_s};
      if (op == "u") {
        val = exchange_u(k.omega_r, k.omega_s, geom, 1.0);
      } else {
        const VMode mode =
            k.v_mode == "full" ? VMode::full : VMode::simplified;
        val = exchange_v(k.omega_r, k.omega_s, geom, 1.0, mode);
      }
    }
    rows.push_back({x, val.real(), val.imag()});
  }

  std::filesystem::create_directories(out_dir);
  write_text_file(detail::join_path(out_dir, cfg.output.kernel),
                  table_csv({"x", "value_re", "value_im"}, rows));

  ordered_json summary;
  summary["command"] = "kernels";
  summary["op"] = op;
  summary["config"] = to_json(cfg);
  if (op == "fjl" && !cfg.has_physical) {
    ordered_json p;
    p["omega_0"] = sys.omega_0;
    p["omega_31"] = sys.omega_31;
    p["omega_32"] = sys.omega_32;
    p["d_23"] = sys.d_23;
    p["d_31"] = sys.d_31;
    p["hbar"] = sys.hbar;
    p["c"] = sys.c;
    summary["cascade_defaults"] = p;
  }
  summary["points"] = rows.size();
  summary["artifacts"] = ordered_json{{"kernel", cfg.output.kernel}};
  write_json(detail::join_path(out_dir, cfg.output.summary), summary);
  return summary;
}

// Sweep the coupling over the configured grid (mean-field model) and write
// the summary table as CSV plus JSON. Failed rows carry nan in the CSV and
// an error string in the JSON; they do not sink the sweep.
inline ordered_json run_sweep(const RunConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  if (cfg.model != "meanfield")
    throw config_error("sweep requires model \"meanfield\"");
  std::vector<double> grid(static_cast<std::size_t>(cfg.sweep.steps));
  for (int i = 0; i < cfg.sweep.steps; ++i) {
    grid[static_cast<std::size_t>(i)] =
        cfg.sweep.steps == 1
            ? cfg.sweep.from
            : cfg.sweep.from + (cfg.sweep.to - cfg.sweep.from) *
                                   static_cast<double>(i) /
                                   static_cast<double>(cfg.sweep.steps - 1);
  }

  const std::vector<SweepRow> rows = coupling_sweep(
      cfg.meanfield_params(), grid, cfg.t_end, cfg.integrator(),
      cfg.sample_count);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<double>> table;
  table.reserve(rows.size());
  ordered_json jrows = ordered_json::array();
  for (const SweepRow& r : rows) {
    if (r.ok) {
      table.push_back({r.coupling, r.peak_rate, r.peak_time, r.final_dz});
    } else {
      table.push_back({r.coupling, nan, nan, nan});
    }
    ordered_json jr;
    jr["coupling"] = r.coupling;
    jr["ok"] = r.ok;
    if (r.ok) {
      jr["peak_rate"] = r.peak_rate;
      jr["peak_time"] = r.peak_time;
      jr["final_dz"] = r.final_dz;
    } else {
      jr["error"] = r.error;
    }
    jrows.push_back(jr);
  }

  std::filesystem::create_directories(out_dir);
  write_text_file(
      detail::join_path(out_dir, cfg.output.sweep),
      table_csv({"coupling", "peak_rate", "peak_time", "final_dz"}, table));

  ordered_json summary;
  summary["command"] = "sweep";
  summary["model"] = cfg.model;
  summary["config"] = to_json(cfg);
  summary["rows"] = jrows;
  summary["artifacts"] = ordered_json{{"sweep", cfg.output.sweep}};
  write_json(detail::join_path(out_dir, cfg.output.summary), summary);
  return summary;
}

}  // namespace biphoton
