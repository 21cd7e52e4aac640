// biphoton/mfdyn.hpp
// Decorrelated mean-field dynamics for three coupled ensembles: red and blue
// single emitters plus the doubly excited group. Each inversion obeys a
// Dicke-type quadratic decay; the cross correlator f exchanges excitation
// between them at the three-atom rate and is seeded by decaying exponentials
// in the collective rates (the drive). Nonlinear, no closed form; everything
// here goes through the adaptive integrator.
#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "biphoton/errors.hpp"
#include "biphoton/numerics.hpp"
#include "biphoton/params.hpp"
#include "biphoton/trajectory.hpp"

namespace biphoton {

struct MeanFieldState {
  double r_z = 0.0;  // red-ensemble inversion, physical range [-N_r/2, N_r/2]
  double s_z = 0.0;  // blue-ensemble inversion
  double d_z = 0.0;  // doubly-excited-ensemble inversion
  double f = 0.0;    // three-ensemble cross correlator

  std::array<double, 4> to_array() const { return {r_z, s_z, d_z, f}; }
  static MeanFieldState from_array(const std::array<double, 4>& y) {
    return {y[0], y[1], y[2], y[3]};
  }
};

struct MeanFieldParams {
  int n_r = 1;
  int n_s = 1;
  int n = 1;
  RateSet rates;
  bool drive_enabled = true;  // gates only the exponential seed terms in df

  void validate() const {
    if (n_r < 1 || n_s < 1 || n < 1)
      throw invalid_parameter_error(
          "MeanFieldParams: ensemble sizes must be >= 1");
    if (!(rates.tau_b > 0.0) || std::isinf(rates.tau_b))
      throw invalid_parameter_error(
          "MeanFieldParams: tau_b must be finite and > 0");
  }
};

// Quadratic superradiance bracket N(N+2)/4 - j_z^2 + j_z: equals N at full
// inversion, 0 at the ground state, maximal near j_z = 1/2.
inline double dicke_bracket(double n, double j_z) {
  return n * (n + 2.0) / 4.0 - j_z * j_z + j_z;
}

inline MeanFieldState fully_inverted(const MeanFieldParams& p) {
  p.validate();
  return {0.5 * p.n_r, 0.5 * p.n_s, 0.5 * p.n, 0.0};
}

inline MeanFieldState ground_state(const MeanFieldParams& p) {
  p.validate();
  return {-0.5 * p.n_r, -0.5 * p.n_s, -0.5 * p.n, 0.0};
}

// Instantaneous pair-emission rate -dd_z/dt of the doubly excited ensemble,
// evaluated algebraically from the state (never from finite differences).
inline double pair_emission_rate(const MeanFieldState& y,
                                 const MeanFieldParams& p) {
  return p.rates.rho_b() * dicke_bracket(p.n, y.d_z) +
         p.rates.gamma3() * y.f;
}

namespace detail {

// Beyond this the cubic terms are astronomically unphysical; treat as a
// diagnostic abort rather than let double arithmetic churn infinities.
inline constexpr double kStateGuard = 1e150;

inline double drive_term(double t, const MeanFieldParams& p) {
  if (!p.drive_enabled) return 0.0;
  const double nr = p.n_r, ns = p.n_s, n = p.n;
  const RateSet& r = p.rates;
  return 4.0 * ns * nr * n * std::exp(-r.rate_a * t) -
         ns * nr * std::exp(-r.rate_b * t) -
         0.5 * ns * n * std::exp(-r.rate_c * t) -
         0.5 * nr * n * std::exp(-r.rate_d * t);
}

inline MeanFieldState meanfield_rhs_unchecked(const MeanFieldState& y,
                                              double t,
                                              const MeanFieldParams& p) {
  const RateSet& r = p.rates;
  const double g3 = r.gamma3();
  const double nr = p.n_r, ns = p.n_s, n = p.n;
  // Residual pair capacities; vanish at the edges of each physical range.
  const double cap_r = nr * nr / 4.0 - y.r_z * y.r_z;
  const double cap_s = ns * ns / 4.0 - y.s_z * y.s_z;
  const double cap_d = n * n / 4.0 - y.d_z * y.d_z;

  MeanFieldState dy;
  dy.r_z = -r.rho_r() * dicke_bracket(nr, y.r_z) - 0.5 * g3 * y.f;
  dy.s_z = -r.rho_s() * dicke_bracket(ns, y.s_z) - 0.5 * g3 * y.f;
  dy.d_z = -r.rho_b() * dicke_bracket(n, y.d_z) - g3 * y.f;
  dy.f = ((y.s_z - 1.0) * r.rho_s() + (y.r_z - 1.0) * r.rho_r() +
          (y.d_z - 1.0) * r.rho_b()) *
             y.f +
         g3 * (2.0 * y.d_z * cap_s * cap_r + y.r_z * cap_s * cap_d +
               y.s_z * cap_r * cap_d + drive_term(t, p));
  return dy;
}

}  // namespace detail

// Right-hand side of the mean-field system. Guards against states that have
// left the representable regime; divergence inside integrator trial steps is
// handled upstream by step rejection before this guard can fire.
inline MeanFieldState meanfield_rhs(const MeanFieldState& y, double t,
                                    const MeanFieldParams& p) {
  p.validate();
  for (double v : y.to_array()) {
    if (!std::isfinite(v) || std::abs(v) > detail::kStateGuard)
      throw nan_error(
          "meanfield_rhs: state component not finite or beyond " +
          std::to_string(detail::kStateGuard) + " at t = " + std::to_string(t));
  }
  return detail::meanfield_rhs_unchecked(y, t, p);
}

inline const std::vector<std::string>& meanfield_column_names() {
  static const std::vector<std::string> names = {"r_z", "s_z", "d_z", "f",
                                                 "emission_rate"};
  return names;
}

// Integrate from an explicit starting state; samples on a uniform grid with
// both endpoints. The emission_rate column is filled from the state at each
// sample via pair_emission_rate.
inline Trajectory integrate_meanfield_from(const MeanFieldState& start,
                                           const MeanFieldParams& p,
                                           double t_end,
                                           const IntegratorConfig& cfg = {},
                                           int sample_count = 801) {
  p.validate();
  cfg.validate();
  if (!(t_end > 0.0) || !std::isfinite(t_end))
    throw invalid_parameter_error(
        "integrate_meanfield: t_end must be finite and > 0");
  if (cfg.rel_tol > 1e-3)
    throw invalid_parameter_error(
        "integrate_meanfield: rel_tol must be <= 1e-3 for this system");
  if (sample_count < 3)
    throw invalid_parameter_error(
        "integrate_meanfield: sample_count must be >= 3");

  std::vector<double> ts(static_cast<std::size_t>(sample_count));
  for (int i = 0; i < sample_count; ++i) {
    ts[static_cast<std::size_t>(i)] =
        t_end * static_cast<double>(i) / static_cast<double>(sample_count - 1);
  }
  ts.back() = t_end;

  const auto rhs = [&p](double t, const std::array<double, 4>& y) {
    // A wildly overshooting trial step is the controller's to reject: report
    // non-finite instead of tripping the hard guard meant for direct callers.
    for (double v : y) {
      if (std::abs(v) > detail::kStateGuard) {
        return std::array<double, 4>{
            std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0, 0.0};
      }
    }
    return detail::meanfield_rhs_unchecked(MeanFieldState::from_array(y), t, p)
        .to_array();
  };
  const auto sol = ode_solve<4>(rhs, start.to_array(), 0.0, t_end, cfg, ts);

  Trajectory traj;
  traj.names = meanfield_column_names();
  traj.times = sol.sample_times;
  traj.cols.assign(5, std::vector<double>(sol.sample_times.size()));
  for (std::size_t i = 0; i < sol.sample_times.size(); ++i) {
    const MeanFieldState y = MeanFieldState::from_array(sol.sample_states[i]);
    traj.cols[0][i] = y.r_z;
    traj.cols[1][i] = y.s_z;
    traj.cols[2][i] = y.d_z;
    traj.cols[3][i] = y.f;
    traj.cols[4][i] = pair_emission_rate(y, p);
  }
  traj.stats = sol.stats;
  traj.validate();
  return traj;
}

// Standard run: fully inverted start, f(0) = 0.
inline Trajectory integrate_meanfield(const MeanFieldParams& p, double t_end,
                                      const IntegratorConfig& cfg = {},
                                      int sample_count = 801) {
  return integrate_meanfield_from(fully_inverted(p), p, t_end, cfg,
                                  sample_count);
}

struct SeriesPeak {
  double t_peak = 0.0;
  double value = 0.0;
};

namespace detail {

// Locate the maximum of a sampled series and refine it with the vertex of
// the parabola through the maximizing sample and its neighbours. Boundary or
// flat-top maxima are reported as the raw sample.
inline SeriesPeak refine_peak(const std::vector<double>& times,
                              const std::vector<double>& values) {
  if (times.size() < 3 || times.size() != values.size())
    throw degenerate_trajectory_error(
        "refine_peak: need at least 3 matching samples");
  std::size_t imax = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[imax]) imax = i;
  }
  SeriesPeak out{times[imax], values[imax]};
  if (imax == 0 || imax + 1 == values.size()) return out;

  const double t0 = times[imax - 1], t1 = times[imax], t2 = times[imax + 1];
  const double v0 = values[imax - 1], v1 = values[imax], v2 = values[imax + 1];
  const double denom = (t1 - t0) * (v1 - v2) - (t1 - t2) * (v1 - v0);
  if (denom == 0.0) return out;
  const double t_star =
      t1 - 0.5 *
               ((t1 - t0) * (t1 - t0) * (v1 - v2) -
                (t1 - t2) * (t1 - t2) * (v1 - v0)) /
               denom;
  if (!(t_star >= t0 && t_star <= t2)) return out;  // refinement ran away
  // Lagrange evaluation of the same parabola at its vertex.
  const double l0 = (t_star - t1) * (t_star - t2) / ((t0 - t1) * (t0 - t2));
  const double l1 = (t_star - t0) * (t_star - t2) / ((t1 - t0) * (t1 - t2));
  const double l2 = (t_star - t0) * (t_star - t1) / ((t2 - t0) * (t2 - t1));
  const double v_star = l0 * v0 + l1 * v1 + l2 * v2;
  if (v_star >= v1) {
    out.t_peak = t_star;
    out.value = v_star;
  }
  return out;
}

}  // namespace detail

struct EmissionRate {
  std::vector<double> times;
  std::vector<double> rate;
  double t_peak = 0.0;
  double peak = 0.0;
};

// Extract the pair-emission-rate series and its refined peak from a
// trajectory carrying the precomputed emission_rate column.
inline EmissionRate emission_rate(const Trajectory& traj) {
  traj.validate();
  if (traj.times.size() < 3)
    throw degenerate_trajectory_error(
        "emission_rate: need at least 3 samples");
  EmissionRate out;
  out.times = traj.times;
  out.rate = traj.column("emission_rate");
  const SeriesPeak pk = detail::refine_peak(out.times, out.rate);
  out.t_peak = pk.t_peak;
  out.peak = pk.value;
  return out;
}

struct SweepRow {
  std::size_t grid_index = 0;
  double coupling = 0.0;
  double peak_rate = 0.0;
  double peak_time = 0.0;
  double final_dz = 0.0;
  bool ok = false;
  std::string error;  // empty on success
};

namespace detail {

inline std::size_t sweep_worker_count(std::size_t rows) {
  std::size_t n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("BIPHOTON_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 256)
      n = static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::min(n, rows));
}

}  // namespace detail

// Run the mean-field model once per coupling value and tabulate peak
// emission rate, peak time and final inversion of the doubly excited
// ensemble. Rows are mutually independent pure computations, so they are
// farmed out to a small thread pool (size from BIPHOTON_WORKERS, default
// hardware); results keep grid order no matter which thread finishes first.
// A row that fails to integrate is marked rather than sinking the sweep.
inline std::vector<SweepRow> coupling_sweep(const MeanFieldParams& p,
                                            const std::vector<double>& grid,
                                            double t_end,
                                            const IntegratorConfig& cfg = {},
                                            int sample_count = 801) {
  p.validate();
  for (double kappa : grid) {
    if (!(kappa >= 0.0) || !std::isfinite(kappa))
      throw invalid_parameter_error(
          "coupling_sweep: coupling values must be finite and >= 0");
  }
  std::vector<SweepRow> rows(grid.size());
  if (grid.empty()) return rows;

  std::atomic<std::size_t> next{0};
  const auto run_row = [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.grid_index = i;
    row.coupling = grid[i];
    try {
      MeanFieldParams pk = p;
      const double tau3 =
          grid[i] > 0.0 ? p.rates.tau_b / grid[i] : kInfiniteTime;
      pk.rates = collective_rates(p.rates.tau_r, p.rates.tau_s, p.rates.tau_b,
                                  tau3);
      const Trajectory traj =
          integrate_meanfield(pk, t_end, cfg, sample_count);
      const EmissionRate er = emission_rate(traj);
      row.peak_rate = er.peak;
      row.peak_time = er.t_peak;
      row.final_dz = traj.column("d_z").back();
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
  };

  const std::size_t workers = detail::sweep_worker_count(grid.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) run_row(i);
    return rows;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < grid.size();
           i = next.fetch_add(1)) {
        run_row(i);
      }
    });
  }
  for (auto& th : pool) th.join();
  return rows;
}

}  // namespace biphoton
