// biphoton/jet.hpp
// Two-variable truncated Taylor jets, degree 2 in each variable. A Jet22
// carries the coefficients c[i][j] of (ds)^i (dr)^j around an expansion
// point, so sums, products and reciprocals of jets propagate every mixed
// partial up to d^4/ds^2 dr^2 exactly. This is how the angular operators
// (second frequency derivatives) are applied to kernels that do not factor
// into single-frequency pieces; no numerical differentiation anywhere.
#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "biphoton/errors.hpp"

namespace biphoton {

struct Jet22 {
  using cplx = std::complex<double>;
  // c[i][j] = (1/i!)(1/j!) d^{i+j} f / ds^i dr^j at the expansion point.
  std::array<std::array<cplx, 3>, 3> c{};

  static Jet22 constant(cplx v) {
    Jet22 j;
    j.c[0][0] = v;
    return j;
  }
  // The first variable itself (value s0, unit first derivative).
  static Jet22 var_s(double s0) {
    Jet22 j;
    j.c[0][0] = s0;
    j.c[1][0] = 1.0;
    return j;
  }
  static Jet22 var_r(double r0) {
    Jet22 j;
    j.c[0][0] = r0;
    j.c[0][1] = 1.0;
    return j;
  }
  // exp(i (p s + q r)) expanded at (s0, r0); all derivatives are explicit.
  static Jet22 phase(double p, double q, double s0, double r0) {
    const cplx e = std::exp(cplx(0.0, p * s0 + q * r0));
    const cplx ip(0.0, p), iq(0.0, q);
    constexpr double fact[3] = {1.0, 1.0, 2.0};
    Jet22 j;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        cplx term = e;
        for (int m = 0; m < a; ++m) term *= ip;
        for (int m = 0; m < b; ++m) term *= iq;
        j.c[a][b] = term / (fact[a] * fact[b]);
      }
    }
    return j;
  }

  Jet22 operator+(const Jet22& o) const {
    Jet22 out;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) out.c[a][b] = c[a][b] + o.c[a][b];
    return out;
  }
  Jet22 operator-(const Jet22& o) const {
    Jet22 out;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) out.c[a][b] = c[a][b] - o.c[a][b];
    return out;
  }
  Jet22 operator*(const Jet22& o) const {
    Jet22 out;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        cplx acc = 0.0;
        for (int p = 0; p <= a; ++p)
          for (int q = 0; q <= b; ++q) acc += c[p][q] * o.c[a - p][b - q];
        out.c[a][b] = acc;
      }
    }
    return out;
  }
  Jet22 scaled(cplx v) const {
    Jet22 out;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) out.c[a][b] = c[a][b] * v;
    return out;
  }
  // 1/f via the geometric series in w = f/f(0) - 1; w has no constant term,
  // so w^5 vanishes identically in this truncation and four terms are exact.
  Jet22 reciprocal() const {
    const cplx c00 = c[0][0];
    if (c00 == cplx(0.0)) {
      throw singular_denominator_error(
          "Jet22::reciprocal: zero constant term");
    }
    Jet22 w = scaled(1.0 / c00);
    w.c[0][0] = 0.0;
    const Jet22 w2 = w * w;
    const Jet22 w4 = w2 * w2;
    Jet22 inv = Jet22::constant(1.0) - w + w2 - (w2 * w) + w4;
    return inv.scaled(1.0 / c00);
  }

  cplx value() const { return c[0][0]; }
  // d^2 f / ds^2 and friends; factorials restore derivatives from coefficients.
  cplx d2_ss() const { return 2.0 * c[2][0]; }
  cplx d2_rr() const { return 2.0 * c[0][2]; }
  cplx d4_ssrr() const { return 4.0 * c[2][2]; }
};

}  // namespace biphoton
