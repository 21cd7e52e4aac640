// biphoton/kernels.hpp
// Geometry-dependent exchange integrals for the cascade. Everything is built
// from one scalar family: phi(x) = (e^{ix} - 1)/(ix) and its even frequency
// derivatives, with Taylor fallbacks near x = 0 so every kernel is smooth
// through zero separation. The pair kernels (chi) describe photon exchange
// between two atoms; the triplet kernels (U, V) correlate the two emitted
// frequencies across three atoms; F folds the pair kernel into the
// two-photon spectral integral that renormalises the cascade rate.
#pragma once

#include <cmath>
#include <complex>

#include "biphoton/errors.hpp"
#include "biphoton/jet.hpp"
#include "biphoton/numerics.hpp"
#include "biphoton/params.hpp"

namespace biphoton {

using cplx = std::complex<double>;

// Separation plus the dipole-to-axis angle for one atom pair. cos_xi is the
// cosine of the angle between the (common) dipole direction and the line
// joining the pair.
struct PairGeometry {
  double r = 1.0;
  double cos_xi = 0.0;

  void validate() const {
    if (!(r >= 0.0) || !std::isfinite(r))
      throw invalid_parameter_error("PairGeometry: r must be finite and >= 0");
    if (!(std::abs(cos_xi) <= 1.0))
      throw invalid_parameter_error("PairGeometry: |cos_xi| must be <= 1");
  }
};

// Three atoms j, m, l: m is the shared partner, so two separations carry
// their own dipole angles and r_jl closes the triangle.
struct TripletGeometry {
  double r_mj = 1.0;   // partner <-> first emitter
  double r_ml = 1.0;   // partner <-> second emitter
  double r_jl = 1.0;   // first <-> second emitter
  double cos_xi_r = 0.0;
  double cos_xi_s = 0.0;

  void validate() const {
    for (double d : {r_mj, r_ml, r_jl}) {
      if (!(d >= 0.0) || !std::isfinite(d))
        throw invalid_parameter_error(
            "TripletGeometry: separations must be finite and >= 0");
    }
    for (double cx : {cos_xi_r, cos_xi_s}) {
      if (!(std::abs(cx) <= 1.0))
        throw invalid_parameter_error(
            "TripletGeometry: |cos_xi| must be <= 1");
    }
    // The three separations must embed in space; allow roundoff slack
    // proportional to the perimeter.
    const double slack = 1e-9 * (r_mj + r_ml + r_jl);
    if (r_mj > r_ml + r_jl + slack || r_ml > r_mj + r_jl + slack ||
        r_jl > r_mj + r_ml + slack)
      throw invalid_parameter_error(
          "TripletGeometry: separations violate the triangle inequality");
  }
};

// Angular weights multiplying the scalar kernel family: a scales the
// undifferentiated part, b the transverse (second-derivative) part.
struct AngularOperator {
  double a = 1.0;  // 1 + cos^2(xi), in [1, 2]
  double b = -1.0; // 3 cos^2(xi) - 1, in [-1, 2]

  static AngularOperator from_cos(double cos_xi) {
    if (!(std::abs(cos_xi) <= 1.0))
      throw invalid_parameter_error("AngularOperator: |cos_xi| must be <= 1");
    const double c2 = cos_xi * cos_xi;
    return AngularOperator{1.0 + c2, 3.0 * c2 - 1.0};
  }
};

namespace detail {

// The closed forms below cancel catastrophically as x -> 0 (worst is the
// 24/x^5 ladder in phi''''), so the Taylor branch has to cover the whole
// unit disc; there the term recurrences hit machine precision within ~25
// terms and both branches agree to roundoff at the seam.
constexpr double kSeriesCut = 1.0;

// phi(x) = (e^{ix} - 1)/(ix); phi(0) = 1. Series: sum (ix)^m / (m+1)!.
inline cplx phi(double x) {
  if (std::abs(x) < kSeriesCut) {
    const cplx ix(0.0, x);
    cplx term = 1.0, sum = 1.0;
    for (int m = 0; m < 40; ++m) {
      term *= ix / static_cast<double>(m + 2);
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
  }
  const cplx e = std::exp(cplx(0.0, x));
  return (e - 1.0) / cplx(0.0, x);
}

// Second derivative of phi; phi''(0) = -1/3.
// Series: sum i^{j+2} (j+2)(j+1) x^j / (j+3)!.
inline cplx phi_dd(double x) {
  if (std::abs(x) < kSeriesCut) {
    const cplx ix(0.0, x);
    cplx term = -1.0 / 3.0, sum = term;
    for (int j = 0; j < 40; ++j) {
      term *= ix * static_cast<double>(j + 3) /
              static_cast<double>((j + 1) * (j + 4));
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
  }
  const cplx e = std::exp(cplx(0.0, x));
  const cplx i(0.0, 1.0);
  const double x2 = x * x, x3 = x2 * x;
  return i * e / x - 2.0 * e / x2 - 2.0 * i * (e - 1.0) / x3;
}

// Fourth derivative of phi; phi''''(0) = 1/5.
// Series: sum i^{j+4} (j+4)(j+3)(j+2)(j+1) x^j / (j+5)!.
inline cplx phi_d4(double x) {
  if (std::abs(x) < kSeriesCut) {
    const cplx ix(0.0, x);
    cplx term = 1.0 / 5.0, sum = term;
    for (int j = 0; j < 40; ++j) {
      term *= ix * static_cast<double>(j + 5) /
              static_cast<double>((j + 1) * (j + 6));
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
  }
  const cplx e = std::exp(cplx(0.0, x));
  const cplx i(0.0, 1.0);
  const double x2 = x * x, x3 = x2 * x, x4 = x3 * x, x5 = x4 * x;
  return -i * e / x + 4.0 * e / x2 + 12.0 * i * e / x3 - 24.0 * e / x4 -
         24.0 * i * (e - 1.0) / x5;
}

inline double sinc(double x) {
  if (std::abs(x) < kSeriesCut) {
    const double mx2 = -x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 0; k < 40; ++k) {
      term *= mx2 / static_cast<double>((2 * k + 2) * (2 * k + 3));
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
  }
  return std::sin(x) / x;
}

// g(x) = cos(x)/x^2 - sin(x)/x^3; g(0) = -1/3. Near-dipole radial weight.
// Series: sum_{k>=1} (-1)^k 2k x^{2k-2} / (2k+1)!.
inline double radial_g(double x) {
  if (std::abs(x) < kSeriesCut) {
    const double mx2 = -x * x;
    double term = -1.0 / 3.0, sum = term;
    for (int k = 1; k < 40; ++k) {
      term *= mx2 * static_cast<double>(k + 1) /
              static_cast<double>(k * (2 * k + 2) * (2 * k + 3));
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
  }
  const double x2 = x * x;
  return std::cos(x) / x2 - std::sin(x) / (x2 * x);
}

// Shared single-frequency bracket: (3/4)[a phi(x) + b phi''(x)] with the
// angular weights of one pair. Normalised to 1 at x = 0 for parallel
// transverse dipoles (a = 1, b = -1 gives (3/4)(1 + 1/3) = 1).
inline cplx pair_bracket(double omega, double r, double cos_xi, double c) {
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw invalid_parameter_error("pair kernel: omega must be finite and > 0");
  if (!(c > 0.0))
    throw invalid_parameter_error("pair kernel: c must be > 0");
  const AngularOperator ang = AngularOperator::from_cos(cos_xi);
  const double x = omega * r / c;
  return 0.75 * (ang.a * phi(x) + ang.b * phi_dd(x));
}

}  // namespace detail

// Real single-photon exchange kernel: transverse plus longitudinal dipole
// pattern evaluated at retardation phase x = omega r / c. Equals 2/3 at zero
// separation for every angle, and identically (2/3) Re of the complex
// bracket below.
inline double chi_kernel(double omega, const PairGeometry& geom,
                         double c = 1.0) {
  geom.validate();
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw invalid_parameter_error("chi_kernel: omega must be finite and > 0");
  if (!(c > 0.0)) throw invalid_parameter_error("chi_kernel: c must be > 0");
  const double c2 = geom.cos_xi * geom.cos_xi;
  const double x = omega * geom.r / c;
  return (1.0 - c2) * detail::sinc(x) +
         (1.0 - 3.0 * c2) * detail::radial_g(x);
}

// Complex pair kernel for one emitted frequency; its real part is
// (3/2) chi_kernel and its imaginary part carries the dispersive shift.
inline cplx chi_single(double omega_i, const PairGeometry& geom,
                       double c = 1.0) {
  geom.validate();
  return detail::pair_bracket(omega_i, geom.r, geom.cos_xi, c);
}

// Two-photon pair kernel in the degenerate-frequency compact form, valid in
// the near zone only: both photons at omega_0, combined phase 2x. The
// angular operator enters squared, hence the phi / phi'' / phi'''' ladder.
inline cplx chi_two_photon_compact(double omega_0, const PairGeometry& geom,
                                   double c = 1.0) {
  geom.validate();
  if (!(omega_0 > 0.0) || !std::isfinite(omega_0))
    throw invalid_parameter_error(
        "chi_two_photon_compact: omega_0 must be finite and > 0");
  if (!(c > 0.0))
    throw invalid_parameter_error("chi_two_photon_compact: c must be > 0");
  const double x = omega_0 * geom.r / c;
  // The compact form drops retardation corrections that grow past the near
  // zone; half a resonant wavelength (x = pi) is the edge of validity.
  if (x > M_PI)
    throw near_field_error(
        "chi_two_photon_compact: r exceeds half the resonant wavelength");
  if (geom.r == 0.0)
    throw invalid_parameter_error(
        "chi_two_photon_compact: r must be > 0 (1/x prefactor)");
  const AngularOperator ang = AngularOperator::from_cos(geom.cos_xi);
  const double a = ang.a, b = ang.b;
  const cplx ladder = 2.0 * a * a * detail::phi(2.0 * x) +
                      16.0 * a * b * detail::phi_dd(2.0 * x) +
                      32.0 * b * b * detail::phi_d4(2.0 * x);
  return (9.0 * M_PI / (16.0 * x)) * ladder;
}

// Spectrally resolved two-photon pair rate: integrate the product of pair
// kernels at the two sidebands omega and 2 omega_0 - omega against the
// cascade's intermediate-state weight. The weight has poles at
// omega = omega_31 and omega = -omega_32, so the upper level must sit above
// the full two-photon window.
inline double f_two_photon_quadrature(const PhysicalSystem& sys,
                                      const PairGeometry& geom,
                                      int nodes = 64,
                                      const QuadratureConfig& qcfg = {}) {
  sys.validate();
  geom.validate();
  qcfg.validate();
  if (nodes < 16)
    throw invalid_parameter_error(
        "f_two_photon_quadrature: nodes must be >= 16");
  if (sys.omega_31 <= 2.0 * sys.omega_0)
    throw pole_error(
        "f_two_photon_quadrature: omega_31 must exceed 2*omega_0, the "
        "intermediate-state pole would enter the integration window");
  if (sys.d_31 == 0.0 || sys.d_23 == 0.0) return 0.0;

  const double w0 = sys.omega_0;
  const double c = sys.c;
  const auto integrand = [&](double w) -> double {
    // Endpoint weights w^3 (2w0-w)^3 vanish; short-circuit keeps the pair
    // kernels away from omega <= 0.
    if (w <= 0.0 || w >= 2.0 * w0) return 0.0;
    const double wc = 2.0 * w0 - w;
    const double weight = w * w * w * wc * wc * wc;
    const double bracket =
        1.0 / (sys.omega_31 - w) + 1.0 / (sys.omega_32 + w);
    return weight * chi_kernel(w, geom, c) * chi_kernel(wc, geom, c) *
           bracket * bracket;
  };
  const double d2 = sys.d_31 * sys.d_31 * sys.d_23 * sys.d_23;
  const double pref =
      d2 / (4.0 * M_PI * sys.hbar * sys.hbar * std::pow(c, 6));
  return pref * quad_adaptive(integrand, 0.0, 2.0 * w0, qcfg, nodes);
}

// Three-atom exchange integral U: the partner atom m talks to emitter j at
// the red frequency and to emitter l at the blue one; the two pair brackets
// factor exactly. Normalised so U -> 1 as both separations -> 0 with
// transverse dipoles.
inline cplx exchange_u(double omega_r, double omega_s,
                       const TripletGeometry& geom, double c = 1.0) {
  geom.validate();
  return detail::pair_bracket(omega_r, geom.r_mj, geom.cos_xi_r, c) *
         detail::pair_bracket(omega_s, geom.r_ml, geom.cos_xi_s, c);
}

enum class VMode {
  simplified,  // factorised resonant approximation, smooth through r -> 0
  full         // retarded three-atom expression with time-ordering fronts
};

namespace detail {

// Full V: apply both angular operators, via degree-2 jets in each frequency,
// to the retarded three-atom propagator pieces. Two time orderings
// contribute, gated by causal fronts on the separations; theta(0) counts as
// inside the front.
inline cplx exchange_v_full(double omega_r, double omega_s,
                            const TripletGeometry& geom, double c) {
  if (!(geom.r_mj > 0.0) || !(geom.r_ml > 0.0))
    throw invalid_parameter_error(
        "exchange_v(full): r_mj and r_ml must be > 0, the retarded form has "
        "1/r singularities");
  const bool front1 = geom.r_ml >= geom.r_mj;  // l outside the j front
  const bool front2 = geom.r_mj >= geom.r_jl;  // j outside the l front
  if (!front1 && !front2)
    throw geometry_domain_error(
        "exchange_v(full): both causal fronts closed for this geometry");

  const double mu = geom.r_ml / c;  // retardation times
  const double nu = geom.r_mj / c;
  const Jet22 S = Jet22::var_s(omega_s);
  const Jet22 R = Jet22::var_r(omega_r);
  // 1/(s r mu nu), with the frequency dependence kept inside the jet.
  const Jet22 inv_sr = (S * R).reciprocal().scaled(1.0 / (mu * nu));

  Jet22 total = Jet22::constant(0.0);
  if (front1) {
    // 2 e^{i(x_s - x_r)} - 2 e^{2 i x_s} - e^{-2 i x_r} + 1, x_s = s mu,
    // x_r = r nu; over 2 s r mu nu.
    Jet22 num = Jet22::phase(mu, -nu, omega_s, omega_r).scaled(2.0) -
                Jet22::phase(2.0 * mu, 0.0, omega_s, omega_r).scaled(2.0) -
                Jet22::phase(0.0, -2.0 * nu, omega_s, omega_r) +
                Jet22::constant(1.0);
    total = total + (num * inv_sr).scaled(0.5);
  }
  if (front2) {
    // (e^{-i x_r} - 1) e^{i x_s} - e^{-i(x_s + x_r)}, over s r mu nu ...
    Jet22 num_a = Jet22::phase(mu, -nu, omega_s, omega_r) -
                  Jet22::phase(mu, 0.0, omega_s, omega_r) -
                  Jet22::phase(-mu, -nu, omega_s, omega_r);
    total = total + num_a * inv_sr;
    // ... plus (s e^{-i(s+r) mu} + r)/((s+r) s r mu nu).
    Jet22 num_b = S * Jet22::phase(-mu, -mu, omega_s, omega_r) + R;
    Jet22 inv_spr = (S + R).reciprocal();
    total = total + num_b * inv_spr * inv_sr;
  }

  const AngularOperator as = AngularOperator::from_cos(geom.cos_xi_s);
  const AngularOperator ar = AngularOperator::from_cos(geom.cos_xi_r);
  // b-parts differentiate twice in the retardation phase x = omega r / c;
  // the chain rule turns that into (c/r)^2 d^2/domega^2 from the jets.
  const double ws = (c / geom.r_ml) * (c / geom.r_ml);
  const double wr = (c / geom.r_mj) * (c / geom.r_mj);
  const cplx val = as.a * ar.a * total.value() +
                   as.a * ar.b * wr * total.d2_rr() +
                   as.b * ar.a * ws * total.d2_ss() +
                   as.b * ar.b * ws * wr * total.d4_ssrr();
  return (9.0 / 16.0) * val;
}

}  // namespace detail

// Three-atom exchange integral V: partner m absorbs the red photon emitted
// by j and re-emits blue towards l. The simplified mode keeps only the
// resonant factorised piece (conjugate red bracket times blue bracket); the
// full mode evaluates the retarded expression with its causal fronts.
inline cplx exchange_v(double omega_r, double omega_s,
                       const TripletGeometry& geom, double c = 1.0,
                       VMode mode = VMode::simplified) {
  geom.validate();
  if (mode == VMode::full)
    return detail::exchange_v_full(omega_r, omega_s, geom, c);
  return detail::pair_bracket(omega_s, geom.r_ml, geom.cos_xi_s, c) *
         std::conj(detail::pair_bracket(omega_r, geom.r_mj, geom.cos_xi_r, c));
}

}  // namespace biphoton
