// biphoton/numerics.hpp
// Shared numerical plumbing: an adaptive embedded Runge-Kutta 5(4) integrator
// (Dormand-Prince pair, FSAL) with cubic-Hermite dense output, a fixed-step
// RK4 for cross-checks, and adaptive Simpson quadrature with an embedded
// error estimate. Everything here is deterministic: identical inputs give
// bit-identical outputs on one platform.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "biphoton/errors.hpp"

namespace biphoton {

struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  std::size_t max_steps = 1000000;  // accepted + rejected
  double initial_step = 0.0;        // 0 picks a span-based default

  void validate() const {
    if (!(rel_tol > 0.0) || rel_tol > 1e-2 || !(abs_tol > 0.0) || abs_tol > 1e-2) {
      throw invalid_parameter_error(
          "IntegratorConfig: tolerances must lie in (0, 1e-2]");
    }
    if (max_steps < 1000) {
      throw invalid_parameter_error("IntegratorConfig: max_steps must be >= 1000");
    }
    if (initial_step < 0.0) {
      throw invalid_parameter_error("IntegratorConfig: initial_step must be >= 0");
    }
  }
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
};

template <std::size_t N>
struct OdeSolution {
  std::vector<double> sample_times;
  std::vector<std::array<double, N>> sample_states;
  std::array<double, N> final_state{};
  double final_time = 0.0;
  OdeStats stats;
};

namespace detail {

// Dormand-Prince 5(4) tableau. Row 7 doubles as the 5th-order weights, so the
// last stage of an accepted step is the first stage of the next (FSAL).
inline constexpr double kDpC[7] = {0.0,     1.0 / 5, 3.0 / 10, 4.0 / 5,
                                   8.0 / 9, 1.0,     1.0};
inline constexpr double kDpA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
// Difference between the 5th- and embedded 4th-order weights.
inline constexpr double kDpE[7] = {
    35.0 / 384 - 5179.0 / 57600,      0.0,
    500.0 / 1113 - 7571.0 / 16695,    125.0 / 192 - 393.0 / 640,
    -2187.0 / 6784 + 92097.0 / 339200, 11.0 / 84 - 187.0 / 2100,
    -1.0 / 40};

template <std::size_t N>
bool all_finite(const std::array<double, N>& y) {
  for (double v : y) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

// Cubic Hermite value at fraction theta of a step from (y0, f0) to (y1, f1).
template <std::size_t N>
std::array<double, N> hermite(const std::array<double, N>& y0,
                              const std::array<double, N>& f0,
                              const std::array<double, N>& y1,
                              const std::array<double, N>& f1, double h,
                              double theta) {
  const double t2 = theta * theta;
  const double t3 = t2 * theta;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + theta;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  std::array<double, N> out;
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
  }
  return out;
}

}  // namespace detail

// Integrates y' = rhs(t, y) over [t0, t1] with local error kept below
// abs_tol + rel_tol * |y| per component. sample_times must be non-decreasing
// and lie inside [t0, t1]; steps are clipped to land on each pending sample,
// so sampled states carry the full step accuracy. Throws
// step_underflow_error, max_steps_error or nan_error as the failure dictates.
template <std::size_t N, class Rhs>
OdeSolution<N> ode_solve(Rhs&& rhs, const std::array<double, N>& y0, double t0,
                         double t1, const IntegratorConfig& cfg,
                         const std::vector<double>& sample_times = {}) {
  cfg.validate();
  if (!(t1 > t0)) {
    throw invalid_parameter_error("ode_solve: need t1 > t0");
  }
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    const bool ordered = i == 0 || sample_times[i] >= sample_times[i - 1];
    if (!ordered || sample_times[i] < t0 || sample_times[i] > t1) {
      throw invalid_parameter_error(
          "ode_solve: sample times must be non-decreasing inside [t0, t1]");
    }
  }

  OdeSolution<N> sol;
  sol.sample_times = sample_times;
  sol.sample_states.resize(sample_times.size());

  const double span = t1 - t0;
  double t = t0;
  std::array<double, N> y = y0;
  if (!detail::all_finite(y)) {
    throw nan_error("ode_solve: initial state is not finite");
  }

  std::array<double, N> k[7];
  k[0] = rhs(t, y);
  sol.stats.rhs_evals++;
  if (!detail::all_finite(k[0])) {
    throw nan_error("ode_solve: rhs not finite at the initial state, t = " +
                    std::to_string(t));
  }

  std::size_t next_sample = 0;
  while (next_sample < sample_times.size() && sample_times[next_sample] <= t0) {
    sol.sample_states[next_sample++] = y;
  }

  double h = cfg.initial_step > 0.0 ? std::min(cfg.initial_step, span)
                                    : span * 1e-4;

  while (t < t1) {
    if (sol.stats.accepted + sol.stats.rejected >= cfg.max_steps) {
      throw max_steps_error("ode_solve: exceeded max_steps = " +
                            std::to_string(cfg.max_steps) + " at t = " +
                            std::to_string(t));
    }
    if (h < 32.0 * std::numeric_limits<double>::epsilon() *
                std::max(std::abs(t), 1.0)) {
      throw step_underflow_error("ode_solve: step size underflow at t = " +
                                 std::to_string(t));
    }
    double h_step = h;
    bool last = t + h_step >= t1;
    if (last) h_step = t1 - t;
    // Land exactly on the next requested sample: interpolation then always
    // evaluates at a step endpoint (theta = 1), so sampled states carry the
    // integrator's full order, not the interpolant's.
    bool hit_sample = false;
    if (next_sample < sample_times.size()) {
      const double gap = sample_times[next_sample] - t;
      if (gap <= h_step) {
        h_step = gap;
        hit_sample = true;
        last = sample_times[next_sample] >= t1;
      }
    }

    bool stage_finite = true;
    for (int s = 1; s < 7 && stage_finite; ++s) {
      std::array<double, N> ys;
      for (std::size_t i = 0; i < N; ++i) {
        double acc = 0.0;
        for (int j = 0; j < s; ++j) acc += detail::kDpA[s][j] * k[j][i];
        ys[i] = y[i] + h_step * acc;
      }
      // A trial stage that already overflowed is rejectable; never hand a
      // non-finite state to the rhs.
      if (!detail::all_finite(ys)) {
        stage_finite = false;
        break;
      }
      k[s] = rhs(t + detail::kDpC[s] * h_step, ys);
      sol.stats.rhs_evals++;
      stage_finite = detail::all_finite(k[s]);
    }

    // 5th-order solution is stage row 7 of the tableau; k[6] was evaluated at
    // it, so an accepted step reuses k[6] as the next k[0] (FSAL).
    std::array<double, N> y_new;
    double err = 0.0;
    if (stage_finite) {
      for (std::size_t i = 0; i < N; ++i) {
        double acc = 0.0;
        for (int j = 0; j < 6; ++j) acc += detail::kDpA[6][j] * k[j][i];
        y_new[i] = y[i] + h_step * acc;
      }
      double sum = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        double e = 0.0;
        for (int j = 0; j < 7; ++j) e += detail::kDpE[j] * k[j][i];
        e *= h_step;
        const double scale =
            cfg.abs_tol +
            cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        sum += (e / scale) * (e / scale);
      }
      err = std::sqrt(sum / static_cast<double>(N));
      stage_finite = detail::all_finite(y_new) && std::isfinite(err);
    }

    if (!stage_finite) {
      // Overflow inside a trial step is treated as a rejection; genuine
      // blowups end in step underflow a few halvings later.
      sol.stats.rejected++;
      h *= 0.25;
      continue;
    }

    if (err <= 1.0) {
      const double t_new =
          last ? t1 : (hit_sample ? sample_times[next_sample] : t + h_step);
      while (next_sample < sample_times.size() &&
             sample_times[next_sample] <= t_new) {
        const double theta = (sample_times[next_sample] - t) / h_step;
        sol.sample_states[next_sample] =
            detail::hermite<N>(y, k[0], y_new, k[6], h_step, theta);
        next_sample++;
      }
      t = t_new;
      y = y_new;
      k[0] = k[6];
      sol.stats.accepted++;
      if (!detail::all_finite(k[0])) {
        throw nan_error("ode_solve: rhs not finite at accepted state, t = " +
                        std::to_string(t));
      }
      double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
      h = h_step * std::clamp(factor, 0.2, 5.0);
      h = std::min(h, span);
    } else {
      sol.stats.rejected++;
      double factor = 0.9 * std::pow(err, -0.2);
      h = h_step * std::clamp(factor, 0.2, 1.0);
    }
  }

  sol.final_state = y;
  sol.final_time = t;
  return sol;
}

// Classical fixed-step RK4 over n_steps equal steps; cross-check integrator
// for order verification and oracle duty.
template <std::size_t N, class Rhs>
std::array<double, N> rk4_fixed(Rhs&& rhs, std::array<double, N> y, double t0,
                                double t1, std::size_t n_steps) {
  if (!(t1 > t0) || n_steps == 0) {
    throw invalid_parameter_error("rk4_fixed: need t1 > t0 and n_steps >= 1");
  }
  const double h = (t1 - t0) / static_cast<double>(n_steps);
  double t = t0;
  for (std::size_t s = 0; s < n_steps; ++s) {
    const auto k1 = rhs(t, y);
    std::array<double, N> ytmp;
    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + 0.5 * h * k1[i];
    const auto k2 = rhs(t + 0.5 * h, ytmp);
    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + 0.5 * h * k2[i];
    const auto k3 = rhs(t + 0.5 * h, ytmp);
    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * k3[i];
    const auto k4 = rhs(t + h, ytmp);
    for (std::size_t i = 0; i < N; ++i) {
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    t = t0 + static_cast<double>(s + 1) * h;
    if (!detail::all_finite(y)) {
      throw nan_error("rk4_fixed: state not finite at t = " + std::to_string(t));
    }
  }
  return y;
}

struct QuadratureConfig {
  double rel_tol = 1e-10;
  int max_depth = 40;

  void validate() const {
    if (!(rel_tol > 0.0) || rel_tol > 1e-4) {
      throw invalid_parameter_error(
          "QuadratureConfig: rel_tol must lie in (0, 1e-4]");
    }
    if (max_depth < 10) {
      throw invalid_parameter_error("QuadratureConfig: max_depth must be >= 10");
    }
  }
};

namespace detail {

inline double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double quad_recurse(F& f, double a, double fa, double b, double fb, double m,
                    double fm, double whole, double eps, int depth,
                    int max_depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  if (!std::isfinite(flm) || !std::isfinite(frm)) {
    throw nan_error("quad_adaptive: integrand not finite near x = " +
                    std::to_string(lm));
  }
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  // |S2 - S1|/15 is the standard embedded estimate of S2's error.
  if (std::abs(delta) <= 15.0 * eps) {
    return left + right + delta / 15.0;
  }
  if (depth >= max_depth) {
    throw non_convergence_error(
        "quad_adaptive: max refinement depth reached near x = " +
        std::to_string(m));
  }
  return quad_recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * eps, depth + 1,
                      max_depth) +
         quad_recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * eps, depth + 1,
                      max_depth);
}

}  // namespace detail

// Adaptive Simpson integral of f over [a, b], refined until the embedded
// error estimate falls below rel_tol relative to a coarse whole-interval
// scale. initial_intervals sets the starting uniform panel count (useful for
// oscillatory integrands whose structure a single panel would miss).
template <class F>
double quad_adaptive(F&& f, double a, double b, const QuadratureConfig& cfg,
                     int initial_intervals = 1) {
  cfg.validate();
  if (initial_intervals < 1) {
    throw invalid_parameter_error("quad_adaptive: initial_intervals must be >= 1");
  }
  if (a == b) return 0.0;
  if (!(b > a)) {
    throw invalid_parameter_error("quad_adaptive: need b >= a");
  }

  const int n = initial_intervals;
  const double len = (b - a) / n;
  std::vector<double> xs(2 * n + 1), fs(2 * n + 1);
  for (int i = 0; i <= 2 * n; ++i) {
    xs[i] = a + 0.5 * len * i;
    fs[i] = f(xs[i]);
    if (!std::isfinite(fs[i])) {
      throw nan_error("quad_adaptive: integrand not finite at x = " +
                      std::to_string(xs[i]));
    }
  }

  // Coarse panel estimates set the tolerance scale; sum of magnitudes guards
  // against a near-cancelling total.
  std::vector<double> coarse(n);
  double scale = 0.0;
  for (int p = 0; p < n; ++p) {
    coarse[p] = detail::simpson(xs[2 * p], fs[2 * p], xs[2 * p + 2],
                                fs[2 * p + 2], fs[2 * p + 1]);
    scale += std::abs(coarse[p]);
  }
  scale = std::max(scale, std::numeric_limits<double>::min());

  double total = 0.0;
  for (int p = 0; p < n; ++p) {
    const double eps_p = cfg.rel_tol * scale / n;
    total += detail::quad_recurse(f, xs[2 * p], fs[2 * p], xs[2 * p + 2],
                                  fs[2 * p + 2], xs[2 * p + 1], fs[2 * p + 1],
                                  coarse[p], eps_p, 0, cfg.max_depth);
  }
  return total;
}

}  // namespace biphoton
