#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "oqsim/ode.hpp"

using namespace oqsim;

namespace {
const std::complex<double> I1(0.0, 1.0);

std::vector<double> grid(double t_max, int points) {
  std::vector<double> t(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) t[size_t(i)] = t_max * double(i) / (points - 1);
  return t;
}
}  // namespace

TEST_CASE("scalar exponential decay integrates to reference accuracy") {
  auto f = [](double, const Vector& y) { return Vector(-y); };
  Vector y0(1);
  y0(0) = 1.0;
  std::vector<double> t = grid(5.0, 11);
  std::vector<Vector> sol = integrate_adaptive(f, y0, t);
  REQUIRE(sol.size() == t.size());
  for (size_t i = 0; i < t.size(); ++i)
    CHECK(std::abs(sol[i](0) - std::exp(-t[i])) < 1e-10);
}

TEST_CASE("phase rotation keeps unit magnitude and the right angle") {
  const double w = 3.0;
  auto f = [&](double, const Vector& y) { return Vector(I1 * w * y); };
  Vector y0(1);
  y0(0) = 1.0;
  std::vector<double> t = grid(10.0, 21);
  std::vector<Vector> sol = integrate_adaptive(f, y0, t);
  for (size_t i = 0; i < t.size(); ++i) {
    CHECK(std::abs(std::abs(sol[i](0)) - 1.0) < 1e-9);
    CHECK(std::abs(sol[i](0) - std::exp(I1 * w * t[i])) < 1e-8);
  }
}

TEST_CASE("widely separated decay scales stay accurate") {
  Vector y0(2);
  y0 << 1.0, 1.0;
  auto f = [](double, const Vector& y) {
    Vector dy(2);
    dy(0) = -1000.0 * y(0);
    dy(1) = -1.0 * y(1);
    return dy;
  };
  std::vector<double> t = grid(1.0, 6);
  std::vector<Vector> sol = integrate_adaptive(f, y0, t);
  for (size_t i = 0; i < t.size(); ++i) {
    CHECK(std::abs(sol[i](0) - std::exp(-1000.0 * t[i])) < 1e-9);
    CHECK(std::abs(sol[i](1) - std::exp(-t[i])) < 1e-9);
  }
}

TEST_CASE("time-dependent right-hand sides are handled") {
  // y' = -2 t y has the Gaussian solution exp(-t^2).
  auto f = [](double t, const Vector& y) { return Vector(-2.0 * t * y); };
  Vector y0(1);
  y0(0) = 1.0;
  std::vector<double> t = grid(3.0, 7);
  std::vector<Vector> sol = integrate_adaptive(f, y0, t);
  for (size_t i = 0; i < t.size(); ++i)
    CHECK(std::abs(sol[i](0) - std::exp(-t[i] * t[i])) < 1e-9);
}

TEST_CASE("a single-point grid returns the initial state") {
  auto f = [](double, const Vector& y) { return Vector(-y); };
  Vector y0(1);
  y0(0) = 0.5;
  std::vector<Vector> sol = integrate_adaptive(f, y0, {2.0});
  REQUIRE(sol.size() == 1);
  CHECK(sol[0](0) == y0(0));
}

TEST_CASE("repeated grid times duplicate the state") {
  auto f = [](double, const Vector& y) { return Vector(-y); };
  Vector y0(1);
  y0(0) = 1.0;
  std::vector<Vector> sol = integrate_adaptive(f, y0, {0.0, 1.0, 1.0, 2.0});
  REQUIRE(sol.size() == 4);
  CHECK(std::abs(sol[1](0) - sol[2](0)) == 0.0);
}

TEST_CASE("grids that start late integrate from the first grid point") {
  auto f = [](double, const Vector& y) { return Vector(-y); };
  Vector y0(1);
  y0(0) = 1.0;
  // y(1) = 1 by construction; only the elapsed interval matters.
  std::vector<Vector> sol = integrate_adaptive(f, y0, {1.0, 2.0});
  CHECK(std::abs(sol[1](0) - std::exp(-1.0)) < 1e-10);
}

TEST_CASE("decreasing grids are rejected") {
  auto f = [](double, const Vector& y) { return Vector(-y); };
  Vector y0(1);
  y0(0) = 1.0;
  CHECK_THROWS_AS((void)integrate_adaptive(f, y0, {0.0, 2.0, 1.0}), std::invalid_argument);
}

TEST_CASE("nonpositive tolerances are rejected") {
  auto f = [](double, const Vector& y) { return Vector(-y); };
  Vector y0(1);
  y0(0) = 1.0;
  OdeOptions opt;
  opt.rtol = 0.0;
  CHECK_THROWS_AS((void)integrate_adaptive(f, y0, {0.0, 1.0}, opt), std::invalid_argument);
}

TEST_CASE("step statistics are populated") {
  auto f = [](double, const Vector& y) { return Vector(-y); };
  Vector y0(1);
  y0(0) = 1.0;
  OdeStats stats;
  (void)integrate_adaptive(f, y0, grid(4.0, 5), {}, &stats);
  CHECK(stats.accepted > 0);
}

TEST_CASE("max step cap increases the accepted step count") {
  auto f = [](double, const Vector& y) { return Vector(-0.01 * y); };
  Vector y0(1);
  y0(0) = 1.0;
  OdeStats free_run, capped_run;
  (void)integrate_adaptive(f, y0, {0.0, 10.0}, {}, &free_run);
  OdeOptions opt;
  opt.max_step = 0.1;
  (void)integrate_adaptive(f, y0, {0.0, 10.0}, opt, &capped_run);
  CHECK(capped_run.accepted >= 100);
  CHECK(capped_run.accepted > free_run.accepted);
}

TEST_CASE("tighter tolerances tighten the achieved error") {
  auto f = [](double, const Vector& y) { return Vector(-y); };
  Vector y0(1);
  y0(0) = 1.0;
  OdeOptions loose;
  loose.rtol = 1e-5;
  loose.atol = 1e-8;
  OdeOptions tight;
  tight.rtol = 1e-12;
  tight.atol = 1e-14;
  std::vector<double> t = {0.0, 3.0};
  double err_loose =
      std::abs(integrate_adaptive(f, y0, t, loose)[1](0) - std::exp(-3.0));
  double err_tight =
      std::abs(integrate_adaptive(f, y0, t, tight)[1](0) - std::exp(-3.0));
  CHECK(err_tight < 1e-12);
  CHECK(err_tight <= err_loose);
}
