// Exchange kernels along the dimensionless separation x = omega r / c: the
// single-photon pair kernel, its two-photon counterpart, and the triplet
// integrals on a shrinking equilateral triangle. Shows the common x -> 0
// limit and the oscillatory far zone.
#include <complex>
#include <cstdio>

#include "biphoton/kernels.hpp"

using namespace biphoton;

int main() {
  std::printf("%8s %22s %12s %22s\n", "x", "chi_single (re, im)", "chi_kernel",
              "chi_b (re, im)");
  for (double x : {0.01, 0.1, 0.5, 1.0, 2.0, 3.0}) {
    const PairGeometry g{x, 0.3};  // unit frequency, so r = x
    const cplx chi = chi_single(1.0, g);
    const cplx chib = chi_two_photon_compact(1.0, g);
    std::printf("%8.2f %11.5f %10.5f %12.5f %11.5f %10.5f\n", x, chi.real(),
                chi.imag(), chi_kernel(1.0, g), chib.real(), chib.imag());
  }

  // Triplet integrals on an equilateral triangle of side x (in units of the
  // emission wavelength over 2 pi). Both tend to 1 as the triangle shrinks.
  std::printf("\n%8s %22s %22s\n", "side", "U (re, im)", "V (re, im)");
  for (double x : {0.001, 0.1, 1.0, 3.0}) {
    const TripletGeometry g{x, x, x, 0.2, -0.4};
    const cplx u = exchange_u(1.0, 1.0, g);
    const cplx v = exchange_v(1.0, 1.0, g);
    std::printf("%8.3f %11.5f %10.5f %12.5f %10.5f\n", x, u.real(), u.imag(),
                v.real(), v.imag());
  }

  // At x = pi and the magic angle the two-photon kernel vanishes: the
  // orientation weight kills two terms and the phase factor the third.
  const double magic = 1.0 / std::sqrt(3.0);
  const cplx at_magic = chi_two_photon_compact(1.0, {M_PI, magic});
  std::printf("\n|chi_b| at x = pi, cos xi = 1/sqrt(3): %.3e\n",
              std::abs(at_magic));
  return 0;
}
