// biphoton/params.hpp
// Physical inputs of the three-subsystem cooperative emission model and the
// decay/exchange time scales derived from them. R and S are single-photon
// ensembles; D decays by two-photon emission through an intermediate level
// (3), with 2->3 and 3->1 dipole legs. All downstream dynamics consume a
// RateSet only, so physical units are converted here and nowhere else.
#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "biphoton/errors.hpp"

namespace biphoton {

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

// Atomic and field inputs, in any consistent unit system (defaults are
// natural units, hbar = c = 1).
struct PhysicalSystem {
  double omega_r = 1.0;   // R transition frequency (rad/time)
  double omega_s = 1.0;   // S transition frequency (rad/time)
  double omega_0 = 1.0;   // bi-photon line center, half of D's 2->1 splitting
  double omega_31 = 3.0;  // D 3->1 intermediate transition frequency
  double omega_32 = 1.0;  // D 3->2 intermediate transition frequency
  double d_r = 1.0;       // R transition dipole moment
  double d_s = 1.0;       // S transition dipole moment
  double d_23 = 1.0;      // D two-photon channel, 2->3 leg dipole
  double d_31 = 1.0;      // D two-photon channel, 3->1 leg dipole
  int n_r = 1;            // ensemble sizes
  int n_s = 1;
  int n = 1;
  double hbar = 1.0;
  double c = 1.0;

  void validate() const {
    if (!(omega_r > 0.0) || !(omega_s > 0.0) || !(omega_0 > 0.0) ||
        !(omega_31 > 0.0) || !(omega_32 > 0.0)) {
      throw invalid_parameter_error(
          "PhysicalSystem: all transition frequencies must be strictly positive");
    }
    if (d_r < 0.0 || d_s < 0.0 || d_23 < 0.0 || d_31 < 0.0) {
      throw invalid_parameter_error(
          "PhysicalSystem: dipole moments must be non-negative");
    }
    if (n_r < 1 || n_s < 1 || n < 1) {
      throw invalid_parameter_error("PhysicalSystem: ensemble sizes must be >= 1");
    }
    if (!(hbar > 0.0) || !(c > 0.0)) {
      throw invalid_parameter_error("PhysicalSystem: hbar and c must be positive");
    }
  }
};

// Coupling amplitude of the two-photon channel for one photon pair
// (omega_k1, omega_k2) with field amplitudes g_k1, g_k2:
//   q = (d_23 d_31 g_k2 g_k1 / 2 hbar) [1/(omega_32 + omega_k1) + 1/(omega_31 - omega_k2)]
inline double q_amplitude(double omega_k1, double omega_k2,
                          const PhysicalSystem& sys, double g_k1, double g_k2) {
  sys.validate();
  if (omega_k2 == sys.omega_31) {
    throw singular_denominator_error(
        "q_amplitude: omega_k2 equals omega_31 (pole of the second bracket term)");
  }
  if (sys.omega_32 + omega_k1 == 0.0) {
    throw singular_denominator_error(
        "q_amplitude: omega_32 + omega_k1 vanishes (pole of the first bracket term)");
  }
  const double bracket =
      1.0 / (sys.omega_32 + omega_k1) + 1.0 / (sys.omega_31 - omega_k2);
  return sys.d_23 * sys.d_31 * g_k2 * g_k1 / (2.0 * sys.hbar) * bracket;
}

// Collective single-photon decay time of a dipole d_i radiating at omega_i:
//   tau_i = 3 hbar c^3 / (4 d_i^2 omega_i^3)
inline double tau_single(double d_i, double omega_i, double hbar = 1.0,
                         double c = 1.0) {
  if (!(d_i > 0.0) || !(omega_i > 0.0) || !(hbar > 0.0) || !(c > 0.0)) {
    throw invalid_parameter_error(
        "tau_single: dipole, frequency, hbar and c must be strictly positive");
  }
  return 3.0 * hbar * c * c * c / (4.0 * d_i * d_i * omega_i * omega_i * omega_i);
}

// Cooperative two-photon decay time of the D subsystem:
//   1/(2 tau_b) = (2^2/3^2) (omega_0^7 d_23^2 d_31^2 / (2^2 pi hbar^2 c^6))
//                 * (3/2) [1/(omega_32 + omega_0) + 1/(omega_31 - omega_0)]^2
inline double tau_two_photon(const PhysicalSystem& sys) {
  sys.validate();
  if (sys.d_23 == 0.0 || sys.d_31 == 0.0) {
    throw decoupled_error(
        "tau_two_photon: a zero dipole leg makes the two-photon channel dark "
        "and tau_b infinite");
  }
  if (sys.omega_31 == sys.omega_0) {
    throw singular_denominator_error(
        "tau_two_photon: omega_31 equals omega_0 (bracket pole)");
  }
  const double w0 = sys.omega_0;
  const double bracket =
      1.0 / (sys.omega_32 + w0) + 1.0 / (sys.omega_31 - w0);
  const double w7 = std::pow(w0, 7);
  const double inv_2taub = (4.0 / 9.0) *
                           (w7 * sys.d_23 * sys.d_23 * sys.d_31 * sys.d_31 /
                            (4.0 * M_PI * sys.hbar * sys.hbar * std::pow(sys.c, 6))) *
                           1.5 * bracket * bracket;
  return 1.0 / (2.0 * inv_2taub);
}

// Three-particle cooperative exchange time (one quantity covers both photon
// orderings, whose printed rates coincide):
//   1/tau3 = (2/3)^2 (d_s d_r d_23 d_31 omega_s^3 omega_r^3 / (4 pi c^6 hbar^2))
//            * [1/(omega_32 + omega_s) + 1/(omega_31 - omega_r)]
// A zero dipole is a legitimate decoupled configuration: tau3 = infinity.
inline double tau_three(const PhysicalSystem& sys) {
  sys.validate();
  if (sys.omega_31 == sys.omega_r) {
    throw singular_denominator_error(
        "tau_three: omega_31 equals omega_r (bracket pole)");
  }
  if (sys.d_s == 0.0 || sys.d_r == 0.0 || sys.d_23 == 0.0 || sys.d_31 == 0.0) {
    return kInfiniteTime;
  }
  const double bracket =
      1.0 / (sys.omega_32 + sys.omega_s) + 1.0 / (sys.omega_31 - sys.omega_r);
  const double inv_tau3 =
      (4.0 / 9.0) *
      (sys.d_s * sys.d_r * sys.d_23 * sys.d_31 * std::pow(sys.omega_s, 3) *
       std::pow(sys.omega_r, 3) /
       (4.0 * M_PI * std::pow(sys.c, 6) * sys.hbar * sys.hbar)) *
      bracket;
  if (inv_tau3 <= 0.0) {
    throw invalid_parameter_error(
        "tau_three: bracket is non-positive for these frequencies");
  }
  return 1.0 / inv_tau3;
}

// Decay times and the collective rates feeding both dynamics models.
// rate_a..rate_d are the sums of single rates entering the correlator decays:
//   A = 1/tau_r + 1/tau_b + 1/tau_s     B = 1/tau_r + 1/tau_s
//   C = 1/tau_s + 1/tau_b               D = 1/tau_r + 1/tau_b
// tau_r and tau_s may be infinite (removed subsystem); tau3 = infinity means
// the three-particle channel is off (coupling 0).
struct RateSet {
  double tau_r = 1.0;
  double tau_s = 1.0;
  double tau_b = 1.0;
  double tau3 = kInfiniteTime;
  double rate_a = 0.0;
  double rate_b = 0.0;
  double rate_c = 0.0;
  double rate_d = 0.0;
  double coupling = 0.0;  // kappa = tau_b / tau3, dimensionless in [0, inf)

  double rho_r() const { return std::isinf(tau_r) ? 0.0 : 1.0 / tau_r; }
  double rho_s() const { return std::isinf(tau_s) ? 0.0 : 1.0 / tau_s; }
  double rho_b() const { return 1.0 / tau_b; }
  double gamma3() const { return std::isinf(tau3) ? 0.0 : 1.0 / tau3; }
};

inline RateSet collective_rates(double tau_r, double tau_s, double tau_b,
                                double tau3 = kInfiniteTime) {
  auto positive_or_inf = [](double tau) { return tau > 0.0 || std::isinf(tau); };
  if (!positive_or_inf(tau_r) || !positive_or_inf(tau_s) || !positive_or_inf(tau3) ||
      !(tau_b > 0.0) || std::isinf(tau_b)) {
    throw invalid_parameter_error(
        "collective_rates: times must be strictly positive (tau_r, tau_s, tau3 "
        "may be infinite; tau_b must be finite)");
  }
  RateSet r;
  r.tau_r = tau_r;
  r.tau_s = tau_s;
  r.tau_b = tau_b;
  r.tau3 = tau3;
  r.rate_a = r.rho_r() + r.rho_b() + r.rho_s();
  r.rate_b = r.rho_r() + r.rho_s();
  r.rate_c = r.rho_s() + r.rho_b();
  r.rate_d = r.rho_r() + r.rho_b();
  r.coupling = std::isinf(tau3) ? 0.0 : tau_b / tau3;
  return r;
}

// Same rates built from physical inputs through the channel formulas above.
inline RateSet rates_from_physical(const PhysicalSystem& sys) {
  const double tau_r = tau_single(sys.d_r, sys.omega_r, sys.hbar, sys.c);
  const double tau_s = tau_single(sys.d_s, sys.omega_s, sys.hbar, sys.c);
  const double tau_b = tau_two_photon(sys);
  const double tau3 = tau_three(sys);
  return collective_rates(tau_r, tau_s, tau_b, tau3);
}

// Energy-conservation check for the pair channel, 2*omega_0 = omega_r + omega_s.
struct ResonanceCheck {
  bool pass = false;
  double residual = 0.0;  // |omega_r + omega_s - 2 omega_0|, absolute
};

inline ResonanceCheck validate_resonance(const PhysicalSystem& sys,
                                         double rel_tol) {
  if (!(rel_tol > 0.0)) {
    throw invalid_parameter_error("validate_resonance: rel_tol must be positive");
  }
  ResonanceCheck out;
  out.residual = std::abs(sys.omega_r + sys.omega_s - 2.0 * sys.omega_0);
  out.pass = out.residual <= rel_tol * 2.0 * sys.omega_0;
  return out;
}

}  // namespace biphoton
