// Unit tests for the decorrelated mean-field model: bracket algebra, the
// decoupled Dicke limit against independent oracles, emission-rate peak
// extraction, and the coupling sweep.
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

#include "biphoton/mfdyn.hpp"

using namespace biphoton;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double mixed_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

MeanFieldParams demo_params(double kappa) {
  MeanFieldParams p;
  p.n_r = p.n_s = p.n = 50;
  p.rates = collective_rates(1.0 / 6.0, 1.0 / 6.0, 1.0,
                             kappa > 0.0 ? 1.0 / kappa : kInfiniteTime);
  return p;
}

// Closed-form single-ensemble superradiant decay: dj/dt = -rho (j - a)(j - b)
// with a = (n+2)/2, b = -n/2 integrates to a logistic in
// w = n exp(-(n+1) t / tau).
double dicke_logistic(double n, double tau, double t) {
  const double w = n * std::exp(-(n + 1.0) * t / tau);
  return ((n + 2.0) / 2.0 * w - n / 2.0) / (w + 1.0);
}

}  // namespace

TEST_CASE("superradiance bracket algebra", "[mfdyn]") {
  for (double n : {1.0, 2.0, 7.0, 50.0}) {
    CHECK_THAT(dicke_bracket(n, 0.5 * n), WithinRel(n, 1e-12));
    CHECK_THAT(dicke_bracket(n, -0.5 * n), WithinAbs(0.0, 1e-12));
    // Maximal near j_z = 1/2.
    const double top = dicke_bracket(n, 0.5);
    CHECK(top > dicke_bracket(n, 0.8));
    CHECK(top > dicke_bracket(n, 0.2));
    CHECK_THAT(top, WithinRel(n * (n + 2.0) / 4.0 + 0.25, 1e-12));
  }
}

TEST_CASE("mean-field initial slopes at full inversion", "[mfdyn]") {
  const MeanFieldParams p = demo_params(1.0);
  const MeanFieldState y0 = fully_inverted(p);
  CHECK(y0.r_z == 25.0);
  CHECK(y0.d_z == 25.0);
  CHECK(y0.f == 0.0);

  const MeanFieldState dy = meanfield_rhs(y0, 0.0, p);
  // bracket(50, 25) = 50, so the single ensembles start at -6*50 and the
  // doubly excited one at -1*50. The pair capacities all vanish at full
  // inversion, leaving only the exponential seed in df: at t = 0 it sums to
  // 4*50^3 - 50^2 - 0.5*50^2 - 0.5*50^2 = 495000.
  CHECK_THAT(dy.r_z, WithinRel(-300.0, 1e-12));
  CHECK_THAT(dy.s_z, WithinRel(-300.0, 1e-12));
  CHECK_THAT(dy.d_z, WithinRel(-50.0, 1e-12));
  CHECK_THAT(dy.f, WithinRel(495000.0, 1e-12));

  // Same state with the drive off: f has no source at all.
  MeanFieldParams quiet = p;
  quiet.drive_enabled = false;
  CHECK(meanfield_rhs(y0, 0.0, quiet).f == 0.0);
}

TEST_CASE("ground state is stationary with the drive off", "[mfdyn]") {
  MeanFieldParams p = demo_params(1.0);
  p.drive_enabled = false;
  const MeanFieldState g = ground_state(p);
  const MeanFieldState dy = meanfield_rhs(g, 0.3, p);
  CHECK(dy.r_z == 0.0);
  CHECK(dy.s_z == 0.0);
  CHECK(dy.d_z == 0.0);
  CHECK(dy.f == 0.0);

  const Trajectory traj = integrate_meanfield_from(g, p, 1.0, {}, 11);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    CHECK(traj.column("r_z")[i] == g.r_z);
    CHECK(traj.column("d_z")[i] == g.d_z);
    CHECK(traj.column("emission_rate")[i] == 0.0);
  }
}

TEST_CASE("state guard on the right-hand side", "[mfdyn]") {
  const MeanFieldParams p = demo_params(1.0);
  MeanFieldState bad = fully_inverted(p);
  bad.f = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(meanfield_rhs(bad, 0.0, p), nan_error);
  bad.f = 1e151;
  CHECK_THROWS_AS(meanfield_rhs(bad, 0.0, p), nan_error);

  MeanFieldParams invalid;
  invalid.n_r = 0;
  CHECK_THROWS_AS(invalid.validate(), invalid_parameter_error);
}

TEST_CASE("decoupled ensembles follow the scalar superradiant decay",
          "[mfdyn]") {
  const MeanFieldParams p = demo_params(0.0);
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-10;
  cfg.abs_tol = 1e-13;
  const Trajectory traj = integrate_meanfield(p, 2.0, cfg, 2001);

  SECTION("against the logistic closed form") {
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      const double t = traj.times[i];
      worst = std::max(worst, mixed_err(traj.column("r_z")[i],
                                        dicke_logistic(50.0, 1.0 / 6.0, t)));
      worst = std::max(worst, mixed_err(traj.column("s_z")[i],
                                        dicke_logistic(50.0, 1.0 / 6.0, t)));
      worst = std::max(worst, mixed_err(traj.column("d_z")[i],
                                        dicke_logistic(50.0, 1.0, t)));
    }
    CHECK(worst < 1e-6);
  }

  SECTION("against an independent fixed-step integration") {
    auto scalar = [](double, const std::array<double, 1>& j) {
      return std::array<double, 1>{-1.0 * dicke_bracket(50.0, j[0])};
    };
    const auto jd = rk4_fixed<1>(scalar, {25.0}, 0.0, 2.0, 20000);
    CHECK(mixed_err(traj.column("d_z").back(), jd[0]) < 1e-8);
  }

  SECTION("cross correlator never ignites") {
    for (double v : traj.column("f")) CHECK(v == 0.0);
  }

  SECTION("inversions respect their physical ranges") {
    for (double v : traj.column("r_z")) {
      CHECK(v <= 25.0 + 1e-9);
      CHECK(v >= -25.0 - 1e-9);
    }
    // Pure decay: d_z is non-increasing and the rate never goes negative.
    const auto& dz = traj.column("d_z");
    for (std::size_t i = 1; i < dz.size(); ++i) CHECK(dz[i] <= dz[i - 1] + 1e-12);
    for (double v : traj.column("emission_rate")) CHECK(v >= -1e-9);
  }

  SECTION("peak rate matches the (N+1)^2 / 4 tau law") {
    const EmissionRate er = emission_rate(traj);
    CHECK_THAT(er.peak, WithinRel(51.0 * 51.0 / 4.0, 1e-6));
    CHECK_THAT(er.t_peak, WithinAbs(std::log(50.0) / 51.0, 1e-3));
  }
}

TEST_CASE("emission rate column equals the algebraic rate", "[mfdyn]") {
  const MeanFieldParams p = demo_params(1.0);
  const Trajectory traj = integrate_meanfield(p, 0.5, {}, 101);
  for (std::size_t i = 0; i < traj.times.size(); i += 20) {
    const MeanFieldState y{traj.column("r_z")[i], traj.column("s_z")[i],
                           traj.column("d_z")[i], traj.column("f")[i]};
    CHECK(traj.column("emission_rate")[i] == pair_emission_rate(y, p));
  }
}

TEST_CASE("integration self-consistency under tolerance tightening",
          "[mfdyn]") {
  const MeanFieldParams p = demo_params(1.0);
  IntegratorConfig a;
  a.rel_tol = 1e-8;
  a.abs_tol = 1e-11;
  IntegratorConfig b;
  b.rel_tol = 1e-10;
  b.abs_tol = 1e-13;
  const Trajectory ta = integrate_meanfield(p, 2.0, a, 201);
  const Trajectory tb = integrate_meanfield(p, 2.0, b, 201);
  for (const char* col : {"r_z", "s_z", "d_z", "f"}) {
    CHECK(mixed_err(ta.column(col).back(), tb.column(col).back()) < 1e-6);
  }
}

TEST_CASE("full coupling against a fixed-step cross-check", "[mfdyn]") {
  const MeanFieldParams p = demo_params(1.0);
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-10;
  cfg.abs_tol = 1e-13;
  const Trajectory traj = integrate_meanfield(p, 1.0, cfg, 101);

  auto rhs = [&p](double t, const std::array<double, 4>& y) {
    return detail::meanfield_rhs_unchecked(MeanFieldState::from_array(y), t, p)
        .to_array();
  };
  const auto ref =
      rk4_fixed<4>(rhs, fully_inverted(p).to_array(), 0.0, 1.0, 400000);
  CHECK(mixed_err(traj.column("r_z").back(), ref[0]) < 1e-6);
  CHECK(mixed_err(traj.column("s_z").back(), ref[1]) < 1e-6);
  CHECK(mixed_err(traj.column("d_z").back(), ref[2]) < 1e-6);
  CHECK(mixed_err(traj.column("f").back(), ref[3]) < 1e-6);
}

TEST_CASE("drive gating", "[mfdyn]") {
  SECTION("zero coupling with the drive off stays decoupled") {
    MeanFieldParams p = demo_params(0.0);
    p.drive_enabled = false;
    const Trajectory traj = integrate_meanfield(p, 1.0, {}, 101);
    for (double v : traj.column("f")) CHECK(v == 0.0);
  }

  SECTION("coupled ensembles re-seed f even without the drive") {
    // The cubic source opens as soon as the pair capacities do, so f = 0 is
    // not an invariant of the coupled system; only the exponential seeds are
    // gated. Measured behavior, kept as a tripwire against "fixing" the gate
    // to freeze f.
    MeanFieldParams p = demo_params(1.0);
    p.drive_enabled = false;
    const Trajectory traj = integrate_meanfield(p, 1.0, {}, 201);
    double max_f = 0.0;
    for (double v : traj.column("f")) max_f = std::max(max_f, std::abs(v));
    CHECK(max_f > 1.0);
  }
}

TEST_CASE("emission_rate extraction and refinement", "[mfdyn]") {
  SECTION("refined peak of an exactly parabolic series") {
    std::vector<double> ts, vs;
    for (int i = 0; i <= 10; ++i) {
      const double t = 0.1 * i;
      ts.push_back(t);
      vs.push_back(5.0 - (t - 0.37) * (t - 0.37));
    }
    const SeriesPeak pk = detail::refine_peak(ts, vs);
    CHECK_THAT(pk.t_peak, WithinAbs(0.37, 1e-12));
    CHECK_THAT(pk.value, WithinAbs(5.0, 1e-12));
  }

  SECTION("boundary maxima are reported unrefined") {
    const SeriesPeak pk = detail::refine_peak({0.0, 1.0, 2.0}, {1.0, 2.0, 3.0});
    CHECK(pk.t_peak == 2.0);
    CHECK(pk.value == 3.0);
  }

  SECTION("flat series fall back to the raw sample") {
    const SeriesPeak pk = detail::refine_peak({0.0, 1.0, 2.0}, {1.0, 1.0, 1.0});
    CHECK(pk.t_peak == 0.0);
    CHECK(pk.value == 1.0);
  }

  SECTION("too few samples") {
    CHECK_THROWS_AS(detail::refine_peak({0.0, 1.0}, {1.0, 2.0}),
                    degenerate_trajectory_error);
    Trajectory tiny;
    tiny.names = {"emission_rate"};
    tiny.times = {0.0, 1.0};
    tiny.cols = {{1.0, 2.0}};
    CHECK_THROWS_AS(emission_rate(tiny), degenerate_trajectory_error);
  }
}

TEST_CASE("integrate_meanfield argument validation", "[mfdyn]") {
  const MeanFieldParams p = demo_params(0.5);
  CHECK_THROWS_AS(integrate_meanfield(p, 0.0), invalid_parameter_error);
  CHECK_THROWS_AS(integrate_meanfield(p, 1.0, {}, 2), invalid_parameter_error);
  IntegratorConfig loose;
  loose.rel_tol = 1e-2;
  CHECK_THROWS_AS(integrate_meanfield(p, 1.0, loose), invalid_parameter_error);
}

TEST_CASE("coupling sweep", "[mfdyn]") {
  const MeanFieldParams p = demo_params(0.0);

  SECTION("single-point grid reproduces a direct run exactly") {
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-9;
    cfg.abs_tol = 1e-12;
    const auto rows = coupling_sweep(p, {0.0}, 2.0, cfg, 801);
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].ok);
    const Trajectory traj = integrate_meanfield(demo_params(0.0), 2.0, cfg, 801);
    const EmissionRate er = emission_rate(traj);
    CHECK(rows[0].peak_rate == er.peak);
    CHECK(rows[0].peak_time == er.t_peak);
    CHECK(rows[0].final_dz == traj.column("d_z").back());
  }

  SECTION("permuting the grid permutes the rows identically") {
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-8;
    cfg.abs_tol = 1e-11;
    const std::vector<double> g1 = {0.0, 0.5, 1.0};
    const std::vector<double> g2 = {1.0, 0.0, 0.5};
    const auto r1 = coupling_sweep(p, g1, 2.0, cfg, 401);
    const auto r2 = coupling_sweep(p, g2, 2.0, cfg, 401);
    REQUIRE(r1.size() == 3);
    REQUIRE(r2.size() == 3);
    for (std::size_t i = 0; i < g1.size(); ++i) {
      const auto match = std::find_if(r2.begin(), r2.end(), [&](const SweepRow& r) {
        return r.coupling == g1[i];
      });
      REQUIRE(match != r2.end());
      CHECK(r1[i].peak_rate == match->peak_rate);
      CHECK(r1[i].peak_time == match->peak_time);
      CHECK(r1[i].final_dz == match->final_dz);
      CHECK(r1[i].ok == match->ok);
    }
    // Peak rate grows with coupling on this grid.
    CHECK(r1[2].peak_rate > r1[1].peak_rate);
    CHECK(r1[1].peak_rate > r1[0].peak_rate);
  }

  SECTION("a failing row is marked instead of sinking the sweep") {
    IntegratorConfig tight;
    tight.rel_tol = 1e-10;
    tight.abs_tol = 1e-13;
    tight.max_steps = 1000;  // enough for the decoupled row only
    const auto rows = coupling_sweep(p, {0.0, 1.0}, 2.0, tight, 101);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].ok);
    CHECK_FALSE(rows[1].ok);
    CHECK(rows[1].error.find("max_steps") != std::string::npos);
    CHECK(rows[1].grid_index == 1);
    CHECK(rows[1].coupling == 1.0);
  }

  SECTION("worker count does not change results") {
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-8;
    cfg.abs_tol = 1e-11;
    const std::vector<double> grid = {0.0, 0.3, 0.7, 1.0};
    const char* saved = std::getenv("BIPHOTON_WORKERS");
    const std::string saved_copy = saved ? saved : "";
    setenv("BIPHOTON_WORKERS", "1", 1);
    const auto serial = coupling_sweep(p, grid, 1.0, cfg, 201);
    setenv("BIPHOTON_WORKERS", "4", 1);
    const auto parallel = coupling_sweep(p, grid, 1.0, cfg, 201);
    if (saved)
      setenv("BIPHOTON_WORKERS", saved_copy.c_str(), 1);
    else
      unsetenv("BIPHOTON_WORKERS");
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
      CHECK(serial[i].peak_rate == parallel[i].peak_rate);
      CHECK(serial[i].peak_time == parallel[i].peak_time);
      CHECK(serial[i].final_dz == parallel[i].final_dz);
    }
  }

  SECTION("grid validation and the empty grid") {
    CHECK_THROWS_AS(coupling_sweep(p, {-0.1}, 1.0), invalid_parameter_error);
    CHECK_THROWS_AS(
        coupling_sweep(p, {std::numeric_limits<double>::quiet_NaN()}, 1.0),
        invalid_parameter_error);
    CHECK(coupling_sweep(p, {}, 1.0).empty());
  }
}
