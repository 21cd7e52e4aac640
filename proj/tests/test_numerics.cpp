// Unit tests for the shared numerics: adaptive RK 5(4) with dense output,
// fixed-step RK4, and adaptive Simpson quadrature.
#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "biphoton/numerics.hpp"

using namespace biphoton;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::array<double, 1> decay_rhs(double, const std::array<double, 1>& y) {
  return {-y[0]};
}

std::array<double, 2> oscillator_rhs(double, const std::array<double, 2>& y) {
  return {y[1], -y[0]};
}

// Composite Simpson on a uniform grid, used as an independent quadrature
// reference.
template <class F>
double simpson_reference(F&& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double x0 = a + p * h;
    acc += h / 6.0 * (f(x0) + 4.0 * f(x0 + 0.5 * h) + f(x0 + h));
  }
  return acc;
}

}  // namespace

TEST_CASE("ode_solve integrates exponential decay to tolerance", "[numerics]") {
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-9;
  cfg.abs_tol = 1e-12;

  const auto sol = ode_solve<1>(decay_rhs, {1.0}, 0.0, 1.0, cfg);
  CHECK_THAT(sol.final_state[0], WithinAbs(std::exp(-1.0), 1e-9));
  CHECK(sol.final_time == 1.0);
  CHECK(sol.stats.accepted > 0);
  // Six fresh stages per attempted step (FSAL reuses the seventh).
  CHECK(sol.stats.rhs_evals >=
        6 * (sol.stats.accepted + sol.stats.rejected));
}

TEST_CASE("ode_solve holds phase on a harmonic oscillator", "[numerics]") {
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-10;
  cfg.abs_tol = 1e-13;
  const double t1 = 8.0 * std::acos(-1.0);  // four periods

  const auto sol = ode_solve<2>(oscillator_rhs, {1.0, 0.0}, 0.0, t1, cfg);
  CHECK_THAT(sol.final_state[0], WithinAbs(1.0, 1e-8));
  CHECK_THAT(sol.final_state[1], WithinAbs(0.0, 1e-8));
}

TEST_CASE("tighter tolerance gives a more accurate result", "[numerics]") {
  IntegratorConfig loose;
  loose.rel_tol = 1e-5;
  loose.abs_tol = 1e-8;
  IntegratorConfig tight;
  tight.rel_tol = 1e-10;
  tight.abs_tol = 1e-13;

  const double exact = std::exp(-4.0);
  const double err_loose =
      std::abs(ode_solve<1>(decay_rhs, {1.0}, 0.0, 4.0, loose).final_state[0] -
               exact);
  const double err_tight =
      std::abs(ode_solve<1>(decay_rhs, {1.0}, 0.0, 4.0, tight).final_state[0] -
               exact);
  CHECK(err_tight < err_loose);
  CHECK(err_tight < 1e-11);
}

TEST_CASE("dense output follows the solution between steps", "[numerics]") {
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-9;
  cfg.abs_tol = 1e-12;
  std::vector<double> grid;
  for (int i = 0; i <= 64; ++i) grid.push_back(4.0 * i / 64.0);

  const auto sol = ode_solve<1>(decay_rhs, {1.0}, 0.0, 4.0, cfg, grid);
  REQUIRE(sol.sample_states.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    // Cubic interpolation across accepted steps limits sample accuracy to a
    // bit below the step error proper.
    CHECK_THAT(sol.sample_states[i][0], WithinAbs(std::exp(-grid[i]), 1e-6));
  }
}

TEST_CASE("ode_solve rejects malformed requests", "[numerics]") {
  IntegratorConfig cfg;
  CHECK_THROWS_AS(ode_solve<1>(decay_rhs, {1.0}, 1.0, 1.0, cfg),
                  invalid_parameter_error);
  CHECK_THROWS_AS(ode_solve<1>(decay_rhs, {1.0}, 0.0, 1.0, cfg, {0.5, 0.25}),
                  invalid_parameter_error);
  CHECK_THROWS_AS(ode_solve<1>(decay_rhs, {1.0}, 0.0, 1.0, cfg, {1.5}),
                  invalid_parameter_error);

  IntegratorConfig bad = cfg;
  bad.rel_tol = 0.0;
  CHECK_THROWS_AS(ode_solve<1>(decay_rhs, {1.0}, 0.0, 1.0, bad),
                  invalid_parameter_error);
  bad = cfg;
  bad.rel_tol = 0.1;
  CHECK_THROWS_AS(bad.validate(), invalid_parameter_error);
  bad = cfg;
  bad.max_steps = 10;
  CHECK_THROWS_AS(bad.validate(), invalid_parameter_error);
  bad = cfg;
  bad.initial_step = -1.0;
  CHECK_THROWS_AS(bad.validate(), invalid_parameter_error);
}

TEST_CASE("ode_solve failure taxonomy", "[numerics]") {
  IntegratorConfig cfg;

  SECTION("non-finite initial state") {
    CHECK_THROWS_AS(
        ode_solve<1>(decay_rhs, {std::numeric_limits<double>::quiet_NaN()},
                     0.0, 1.0, cfg),
        nan_error);
  }

  SECTION("rhs not finite at the initial state") {
    auto rhs = [](double, const std::array<double, 1>&) {
      return std::array<double, 1>{std::numeric_limits<double>::quiet_NaN()};
    };
    CHECK_THROWS_AS(ode_solve<1>(rhs, {1.0}, 0.0, 1.0, cfg), nan_error);
  }

  SECTION("persistent trial rejection ends in step underflow") {
    // Finite up to t = 0.5, NaN beyond: every step across the wall is
    // rejected and halved until the step size underflows.
    auto rhs = [](double t, const std::array<double, 1>& y) {
      if (t > 0.5) {
        return std::array<double, 1>{std::numeric_limits<double>::quiet_NaN()};
      }
      return std::array<double, 1>{-y[0]};
    };
    CHECK_THROWS_AS(ode_solve<1>(rhs, {1.0}, 0.0, 1.0, cfg),
                    step_underflow_error);
  }

  SECTION("step budget exhaustion") {
    IntegratorConfig small = cfg;
    small.max_steps = 1000;
    auto rhs = [](double t, const std::array<double, 1>&) {
      return std::array<double, 1>{std::cos(1e6 * t)};
    };
    CHECK_THROWS_AS(ode_solve<1>(rhs, {0.0}, 0.0, 10.0, small),
                    max_steps_error);
  }
}

TEST_CASE("ode_solve is deterministic", "[numerics]") {
  IntegratorConfig cfg;
  std::vector<double> grid = {0.0, 0.3, 0.7, 1.0};
  const auto a = ode_solve<2>(oscillator_rhs, {1.0, 0.0}, 0.0, 1.0, cfg, grid);
  const auto b = ode_solve<2>(oscillator_rhs, {1.0, 0.0}, 0.0, 1.0, cfg, grid);
  CHECK(a.final_state == b.final_state);
  CHECK(a.stats.accepted == b.stats.accepted);
  CHECK(a.stats.rejected == b.stats.rejected);
  CHECK(a.stats.rhs_evals == b.stats.rhs_evals);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(a.sample_states[i] == b.sample_states[i]);
  }
}

TEST_CASE("rk4_fixed shows fourth-order step convergence", "[numerics]") {
  // Halving the step should cut the error by 2^4; accept within a factor of
  // two of that ratio.
  const double exact = std::exp(-2.0);
  const double e1 =
      std::abs(rk4_fixed<1>(decay_rhs, {1.0}, 0.0, 2.0, 40)[0] - exact);
  const double e2 =
      std::abs(rk4_fixed<1>(decay_rhs, {1.0}, 0.0, 2.0, 80)[0] - exact);
  const double ratio = e1 / e2;
  CHECK(ratio > 8.0);
  CHECK(ratio < 32.0);
}

TEST_CASE("rk4_fixed agrees with the adaptive integrator", "[numerics]") {
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-11;
  cfg.abs_tol = 1e-14;
  const auto adaptive =
      ode_solve<2>(oscillator_rhs, {1.0, 0.0}, 0.0, 3.0, cfg).final_state;
  const auto fixed = rk4_fixed<2>(oscillator_rhs, {1.0, 0.0}, 0.0, 3.0, 20000);
  CHECK_THAT(adaptive[0], WithinAbs(fixed[0], 1e-9));
  CHECK_THAT(adaptive[1], WithinAbs(fixed[1], 1e-9));
}

TEST_CASE("quad_adaptive integrates smooth functions", "[numerics]") {
  QuadratureConfig cfg;

  SECTION("half sine wave") {
    const double v =
        quad_adaptive([](double x) { return std::sin(x); }, 0.0, std::acos(-1.0), cfg);
    CHECK_THAT(v, WithinRel(2.0, 1e-10));
  }

  SECTION("monomial") {
    const double v = quad_adaptive([](double x) { return x * x; }, 0.0, 1.0, cfg);
    CHECK_THAT(v, WithinRel(1.0 / 3.0, 1e-12));
  }

  SECTION("empty interval") {
    CHECK(quad_adaptive([](double x) { return x; }, 2.0, 2.0, cfg) == 0.0);
  }

  SECTION("near-cancelling total uses the magnitude scale") {
    const double v =
        quad_adaptive([](double x) { return x; }, -1.0, 1.0, cfg, 2);
    CHECK_THAT(v, WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("quad_adaptive resolves an oscillatory tail", "[numerics]") {
  auto sinc = [](double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; };
  const double b = 20.0 * std::acos(-1.0);
  QuadratureConfig cfg;
  cfg.rel_tol = 1e-10;
  // Seed one panel per half period so no lobe is missed outright.
  const double v = quad_adaptive(sinc, 0.0, b, cfg, 40);
  const double ref = simpson_reference(sinc, 0.0, b, 1 << 20);
  CHECK_THAT(v, WithinAbs(ref, 1e-8));
}

TEST_CASE("quad_adaptive failure taxonomy", "[numerics]") {
  QuadratureConfig cfg;

  SECTION("reversed interval") {
    CHECK_THROWS_AS(quad_adaptive([](double x) { return x; }, 1.0, 0.0, cfg),
                    invalid_parameter_error);
  }

  SECTION("bad initial panel count") {
    CHECK_THROWS_AS(quad_adaptive([](double x) { return x; }, 0.0, 1.0, cfg, 0),
                    invalid_parameter_error);
  }

  SECTION("non-finite integrand inside the interval") {
    auto f = [](double x) {
      if (x > 0.2 && x < 0.3) return std::numeric_limits<double>::quiet_NaN();
      return std::exp(x);
    };
    CHECK_THROWS_AS(quad_adaptive(f, 0.0, 1.0, cfg), nan_error);
  }

  SECTION("integrable singularity exhausts a small depth budget") {
    // 1/sqrt about an irrational point: the straddling panel's error shrinks
    // like w^(1/2) while the budget shrinks like w, so refinement never wins.
    const double c = 1.0 / std::exp(1.0);
    auto f = [c](double x) { return 1.0 / std::sqrt(std::abs(x - c)); };
    QuadratureConfig shallow;
    shallow.max_depth = 12;
    CHECK_THROWS_AS(quad_adaptive(f, 0.0, 1.0, shallow), non_convergence_error);
  }

  SECTION("config validation") {
    QuadratureConfig bad;
    bad.rel_tol = 1e-3;
    CHECK_THROWS_AS(bad.validate(), invalid_parameter_error);
    bad = QuadratureConfig{};
    bad.max_depth = 5;
    CHECK_THROWS_AS(bad.validate(), invalid_parameter_error);
  }
}
