// biphoton/lindyn.hpp
// Exactly solvable three-atom cascade: one doubly excited atom plus the red
// and blue single emitters it feeds. The correlators close on themselves and
// decay as pure exponentials in the four collective rates; the cross
// correlation f and the occupations follow by one and two convolutions with
// those exponentials. Closed form and ODE right-hand side are both exposed
// so each can check the other.
#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "biphoton/errors.hpp"
#include "biphoton/numerics.hpp"
#include "biphoton/params.hpp"
#include "biphoton/trajectory.hpp"

namespace biphoton {

struct LinearState {
  // Collective correlators; each decays as exp(-rate * t) exactly.
  double corr_a = 1.0;
  double corr_b = 1.0;
  double corr_c = 1.0;
  double corr_d = 1.0;
  double f = 0.0;    // cross correlation sourcing the occupation transfer
  double n_r = 1.0;  // red emitter occupation
  double n_s = 1.0;  // blue emitter occupation
  double n_d = 1.0;  // doubly excited atom occupation

  std::array<double, 8> to_array() const {
    return {corr_a, corr_b, corr_c, corr_d, f, n_r, n_s, n_d};
  }
  static LinearState from_array(const std::array<double, 8>& y) {
    return {y[0], y[1], y[2], y[3], y[4], y[5], y[6], y[7]};
  }
};

// Weights of the four exponential channels inside f: the fully symmetric
// channel enters six-fold, the three partial traces subtract.
namespace detail {
inline constexpr double kChannelWeight[4] = {6.0, -2.0, -1.0, -1.0};

// phi1(z) = (e^z - 1)/z, the first exponential quotient; expm1 keeps it
// accurate through z = 0.
inline double phi1(double z) {
  if (z == 0.0) return 1.0;
  return std::expm1(z) / z;
}

// phi1'(z): series below |z| = 0.5 (the closed form cancels there), else
// ((z - 1) expm1(z) + z)/z^2.
inline double phi1_d1(double z) {
  if (std::abs(z) <= 0.5) {
    double term = 0.5;  // (k+1) z^k / (k+2)! at k = 0
    double sum = term;
    for (int k = 0; k < 40; ++k) {
      term *= z * static_cast<double>(k + 2) /
              static_cast<double>((k + 1) * (k + 3));
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
  }
  return ((z - 1.0) * std::expm1(z) + z) / (z * z);
}

// phi1'''(z), same split.
inline double phi1_d3(double z) {
  if (std::abs(z) <= 0.5) {
    double term = 0.25;  // (k+3)(k+2)(k+1) z^k / (k+4)! at k = 0
    double sum = term;
    for (int k = 0; k < 40; ++k) {
      term *= z * static_cast<double>(k + 4) /
              static_cast<double>((k + 1) * (k + 5));
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
  }
  const double z2 = z * z;
  return (std::exp(z) * (z2 * z - 3.0 * z2 + 6.0 * z - 6.0) + 6.0) /
         (z2 * z2);
}

// Second divided difference of phi1 across z1, z2. Away from confluence the
// direct quotient is fine; near it, expand around the midpoint (the quartic
// correction is below 1e-14 at the crossover).
inline double ddphi1(double z1, double z2) {
  const double delta = z1 - z2;
  const double zm = 0.5 * (z1 + z2);
  if (std::abs(delta) > 0.002 * (1.0 + std::abs(zm))) {
    return (phi1(z1) - phi1(z2)) / delta;
  }
  return phi1_d1(zm) + (delta * delta / 24.0) * phi1_d3(zm);
}

// Convolution of two decaying exponentials over [0, t]. Symmetric in (g, h);
// carrying the smaller rate outside keeps every e^z argument non-positive.
inline double exp_conv2(double g, double h, double t) {
  if (h > g) std::swap(g, h);
  return t * std::exp(-h * t) * phi1((h - g) * t);
}

// Convolution of three decaying exponentials over [0, t]; equals the second
// divided difference of x -> e^{-x t} across the three rates.
inline double exp_conv3(double g, double h, double rho, double t) {
  if (g < rho) std::swap(g, rho);
  if (h < rho) std::swap(h, rho);
  const double z1 = (rho - g) * t;
  const double z2 = (rho - h) * t;
  return t * t * std::exp(-rho * t) * ddphi1(z1, z2);
}

}  // namespace detail

// Right-hand side of the closed linear system. The correlators are
// autonomous; f is fed by them at the three-atom rate and drains at half the
// symmetric rate; the occupations decay independently and bleed into f's
// channel with fixed weights (half for each single emitter, full for the
// doubly excited atom).
inline LinearState linear_rhs(const LinearState& y, const RateSet& rates) {
  const double g3 = rates.gamma3();
  LinearState dy;
  dy.corr_a = -rates.rate_a * y.corr_a;
  dy.corr_b = -rates.rate_b * y.corr_b;
  dy.corr_c = -rates.rate_c * y.corr_c;
  dy.corr_d = -rates.rate_d * y.corr_d;
  dy.f = -0.5 * rates.rate_a * y.f +
         g3 * (detail::kChannelWeight[0] * y.corr_a +
               detail::kChannelWeight[1] * y.corr_b +
               detail::kChannelWeight[2] * y.corr_c +
               detail::kChannelWeight[3] * y.corr_d);
  dy.n_r = -rates.rho_r() * y.n_r - 0.5 * y.f;
  dy.n_s = -rates.rho_s() * y.n_s - 0.5 * y.f;
  dy.n_d = -rates.rho_b() * y.n_d - y.f;
  return dy;
}

// Exact solution at time t from the all-excited initial state: correlators
// are bare exponentials, f is a weighted sum of two-exponential
// convolutions, and each occupation subtracts the corresponding
// three-exponential convolution from its free decay.
inline LinearState linear_closed_form(const RateSet& rates, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw invalid_parameter_error(
        "linear_closed_form: t must be finite and >= 0");
  }
  const double half_a = 0.5 * rates.rate_a;
  const double g3 = rates.gamma3();
  const double rate[4] = {rates.rate_a, rates.rate_b, rates.rate_c,
                          rates.rate_d};
  double fsum = 0.0, conv_r = 0.0, conv_s = 0.0, conv_d = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double w = detail::kChannelWeight[k];
    fsum += w * detail::exp_conv2(rate[k], half_a, t);
    conv_r += w * detail::exp_conv3(rate[k], half_a, rates.rho_r(), t);
    conv_s += w * detail::exp_conv3(rate[k], half_a, rates.rho_s(), t);
    conv_d += w * detail::exp_conv3(rate[k], half_a, rates.rho_b(), t);
  }
  LinearState out;
  out.corr_a = std::exp(-rates.rate_a * t);
  out.corr_b = std::exp(-rates.rate_b * t);
  out.corr_c = std::exp(-rates.rate_c * t);
  out.corr_d = std::exp(-rates.rate_d * t);
  out.f = g3 * fsum;
  out.n_r = std::exp(-rates.rho_r() * t) - 0.5 * g3 * conv_r;
  out.n_s = std::exp(-rates.rho_s() * t) - 0.5 * g3 * conv_s;
  out.n_d = std::exp(-rates.rho_b() * t) - g3 * conv_d;
  return out;
}

// Column order matches the CSV the CLI writes: occupations first, then the
// cross correlation, then the four collective correlators (subscripts name
// which atoms remain in each trace: s/r single emitters, d doubly excited).
inline const std::vector<std::string>& linear_column_names() {
  static const std::vector<std::string> names = {
      "n_s", "n_r", "n_d", "f", "c_srd", "c_sr", "c_sd", "c_rd"};
  return names;
}

// State-array index backing each named column, in column order.
namespace detail {
inline constexpr std::size_t kLinearColumnIndex[8] = {6, 5, 7, 4, 0, 1, 2, 3};
}

// Numerical integration of the same system from the all-excited start,
// sampled on a uniform grid (endpoints included).
inline Trajectory integrate_linear(const RateSet& rates, double t_end,
                                   const IntegratorConfig& cfg = {},
                                   int sample_count = 401) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw invalid_parameter_error(
        "integrate_linear: t_end must be finite and > 0");
  }
  if (sample_count < 2) {
    throw invalid_parameter_error("integrate_linear: sample_count must be >= 2");
  }
  if (cfg.rel_tol > 1e-3) {
    throw invalid_parameter_error(
        "integrate_linear: rel_tol must be <= 1e-3 for this system");
  }
  std::vector<double> ts(static_cast<std::size_t>(sample_count));
  for (int i = 0; i < sample_count; ++i) {
    ts[static_cast<std::size_t>(i)] =
        t_end * static_cast<double>(i) / static_cast<double>(sample_count - 1);
  }
  ts.back() = t_end;

  const auto rhs = [&rates](double, const std::array<double, 8>& y) {
    return linear_rhs(LinearState::from_array(y), rates).to_array();
  };
  const auto sol =
      ode_solve<8>(rhs, LinearState{}.to_array(), 0.0, t_end, cfg, ts);

  Trajectory traj;
  traj.names = linear_column_names();
  traj.times = sol.sample_times;
  traj.cols.assign(8, std::vector<double>(sol.sample_times.size()));
  for (std::size_t i = 0; i < sol.sample_times.size(); ++i) {
    for (std::size_t k = 0; k < 8; ++k) {
      traj.cols[k][i] = sol.sample_states[i][detail::kLinearColumnIndex[k]];
    }
  }
  traj.stats = sol.stats;
  traj.validate();
  return traj;
}

}  // namespace biphoton
