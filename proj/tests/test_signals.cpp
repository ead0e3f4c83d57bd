#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <doctest.h>

#include "plab/error.hpp"
#include "plab/signals.hpp"

using namespace plab;
using namespace plab::signals;

namespace {

constexpr double kPi = std::numbers::pi;

Signal ramp(double lo, double hi, double dt) {
  return Signal::sample_scalar([](double t) { return t; }, lo, hi, dt, Interp::linear);
}

Signal constant(double c, double lo, double hi, double dt) {
  return Signal::sample_scalar([c](double) { return c; }, lo, hi, dt);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("signal construction and domain") {
  const Signal f = ramp(-10.0, 10.0, 0.5);
  CHECK(f.size() == 41);
  CHECK(f.t_end() == doctest::Approx(10.0));
  CHECK(f.domain().length() == doctest::Approx(20.0));
  CHECK(code_of([] { Signal(0.0, 0.0, 1, {1.0}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { Signal(0.0, 0.1, 2, {1.0, 2.0, 3.0}); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([] { Signal(0.0, 0.1, 1, {1.0, NAN}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { Signal(0.0, 0.1, 1, {}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("one-sample signal is legal but rejected by windowed operations") {
  const Signal one(0.0, 0.1, 1, {2.0});
  CHECK(one.size() == 1);
  CHECK(code_of([&] { shift_discrepancy(one, 0.0, Window(0.0, 0.05)); }) == ErrorCode::WindowOutOfDomain);
}

TEST_CASE("shift") {
  const Signal f = Signal::sample_scalar([](double t) { return std::sin(t); }, 0.0, 20.0, 0.01);
  SUBCASE("identity is bitwise") {
    const Signal g = shift(f, 0.0);
    REQUIRE(g.size() == f.size());
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(g.at(i, 0) == f.at(i, 0));
  }
  SUBCASE("linear exactness on a ramp") {
    const Signal r = ramp(-10.0, 10.0, 0.01);
    const Signal g = shift(r, 3.0);
    CHECK(g.t0() == doctest::Approx(-10.0));
    CHECK(g.t_end() == doctest::Approx(7.0));
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(g.at(i, 0) - (g.time(i) + 3.0)));
    CHECK(err <= 1e-12);
  }
  SUBCASE("period shift of sin") {
    const Signal g = shift(f, 2.0 * kPi);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(g.at(i, 0) - f.at(i, 0)));
    CHECK(err <= 1e-4);
  }
  SUBCASE("off-grid shift follows the grid phase") {
    const Signal g = shift(f, 0.005);
    CHECK(g.t0() == doctest::Approx(0.0));
    CHECK(g.at(10, 0) == doctest::Approx(std::sin(0.105)).epsilon(1e-8));
  }
  SUBCASE("flow property") {
    const Signal a = shift(f, 1.237);
    const Signal ab = shift(a, 2.411);
    const Signal c = shift(f, 1.237 + 2.411);
    // One interpolation tolerance: the error of a single off-grid shift.
    double interp = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      interp = std::max(interp, std::abs(a.at(i, 0) - std::sin(a.time(i) + 1.237)));
    double err = 0.0;
    for (std::size_t i = 0; i < std::min(ab.size(), c.size()); ++i)
      err = std::max(err, std::abs(ab.at(i, 0) - c.at(i, 0)));
    CHECK(err <= 2.0 * interp);
  }
  CHECK(code_of([&] { shift(f, 25.0); }) == ErrorCode::ShiftOutOfDomain);
}

TEST_CASE("shift_discrepancy") {
  const Signal f = Signal::sample_scalar([](double t) { return std::sin(t); }, -10.0, 40.0, 0.01);
  CHECK(shift_discrepancy(f, 0.0, Window(5.0, 5.0)) == 0.0);
  CHECK(shift_discrepancy(f, kPi, Window(kPi / 2.0, 1.0)) == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(shift_discrepancy(f, 2.0 * kPi, Window(5.0, 5.0)) <= 1e-6);
  CHECK(code_of([&] { shift_discrepancy(f, 35.0, Window(5.0, 5.0)); }) == ErrorCode::WindowOutOfDomain);
  CHECK(code_of([&] { shift_discrepancy(f, 0.0, Window(-20.0, 5.0)); }) == ErrorCode::WindowOutOfDomain);

  SUBCASE("cutoff is exact below and bounded above") {
    const Window w(5.0, 5.0);
    for (double tau : {0.3, 1.0, 6.2}) {
      const double exact = shift_discrepancy(f, tau, w);
      const double cut = shift_discrepancy(f, tau, w, 0.5);
      if (exact < 0.5)
        CHECK(cut == exact);
      else
        CHECK(cut >= 0.5);
    }
  }
  SUBCASE("bounded by twice the sup") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> tau(-5.0, 20.0);
    for (int k = 0; k < 50; ++k) CHECK(shift_discrepancy(f, tau(rng), Window(10.0, 5.0)) <= 2.0 + 1e-12);
  }
  SUBCASE("window monotonicity") {
    for (double tau : {0.5, 2.0, 6.0})
      CHECK(shift_discrepancy(f, tau, Window(5.0, 1.0)) <= shift_discrepancy(f, tau, Window(5.0, 4.0)));
  }
}

TEST_CASE("bebutov_distance") {
  SUBCASE("identical signals") {
    const Signal f = Signal::sample_scalar([](double t) { return std::cos(t); }, -10.0, 10.0, 0.01);
    CHECK(bebutov_distance(f, f, 10.0, 0.0) == 0.0);
  }
  SUBCASE("constant gap below 1/l") {
    CHECK(bebutov_distance(constant(0.0, -10, 10, 0.01), constant(0.5, -10, 10, 0.01), 10.0, 0.0) ==
          doctest::Approx(0.5));
  }
  SUBCASE("ramp against zero peaks at l = 1") {
    const double dt = 0.01;
    const double d = bebutov_distance(ramp(-10, 10, dt), constant(0.0, -10, 10, dt), 10.0, 0.0);
    CHECK(std::abs(d - 1.0) <= dt);
  }
  SUBCASE("symmetry, monotone in l_max, triangle inequality") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto random_trig = [&] {
      const double a = u(rng), b = u(rng), w = 1.0 + u(rng);
      return Signal::sample_scalar([=](double t) { return a * std::sin(w * t) + b; }, -10, 10, 0.05);
    };
    for (int k = 0; k < 10; ++k) {
      const Signal f = random_trig(), g = random_trig(), h = random_trig();
      const double fg = bebutov_distance(f, g, 8.0, 0.0);
      CHECK(fg == doctest::Approx(bebutov_distance(g, f, 8.0, 0.0)));
      CHECK(bebutov_distance(f, g, 4.0, 0.0) <= fg + 1e-15);
      CHECK(fg <= bebutov_distance(f, h, 8.0, 0.0) + bebutov_distance(h, g, 8.0, 0.0) + 1e-12);
      CHECK(sup_distance(f, g, Window(0.0, 8.0)) <=
            sup_distance(f, h, Window(0.0, 8.0)) + sup_distance(h, g, Window(0.0, 8.0)) + 1e-12);
    }
  }
  SUBCASE("nonincreasing as the pointwise gap shrinks") {
    const Signal f = constant(0.0, -10, 10, 0.05);
    const Signal g1 = Signal::sample_scalar([](double t) { return std::sin(t); }, -10, 10, 0.05);
    const Signal g2 = Signal::sample_scalar([](double t) { return 0.5 * std::sin(t); }, -10, 10, 0.05);
    CHECK(bebutov_distance(f, g2, 10.0, 0.0) <= bebutov_distance(f, g1, 10.0, 0.0));
  }
  SUBCASE("shift distance matches the materialised shift") {
    const Signal f = Signal::sample_scalar([](double t) { return std::sin(t) + std::cos(1.7 * t); }, -30, 30, 0.05);
    for (double tau : {0.0, 0.05, 1.3}) {
      const Signal g = shift(f, tau);
      CHECK(bebutov_shift_distance(f, tau, 10.0, 0.0) == doctest::Approx(bebutov_distance(g, f, 10.0, 0.0)).epsilon(1e-9));
    }
  }
  const Signal a(0.0, 0.1, 1, std::vector<double>(101, 0.0));
  const Signal b(0.0, 0.1, 2, std::vector<double>(202, 0.0));
  CHECK(code_of([&] { bebutov_distance(a, b, 1.0, 5.0); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([&] { bebutov_distance(a, a, 8.0, 5.0); }) == ErrorCode::WindowOutOfDomain);
}

TEST_CASE("sup_distance") {
  CHECK(sup_distance(constant(1.0, 0, 10, 0.1), constant(-1.0, 0, 10, 0.1), Window(5, 5)) == doctest::Approx(2.0));
  const Signal e = Signal::sample_scalar([](double t) { return std::exp(-t); }, 0.0, 10.0, 0.01);
  CHECK(sup_distance(e, constant(0.0, 0, 10, 0.01), Window::from_range(1.0, 5.0)) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
  CHECK(sup_distance(e, e, Window(5, 5)) == 0.0);
}

TEST_CASE("csv round trip and rejection") {
  const Signal f = Signal::sample(
      [](double t, std::span<double> out) {
        out[0] = std::sin(t);
        out[1] = t * t;
      },
      -1.0, 1.0, 0.125, 2);
  std::stringstream io;
  write_csv(io, f);
  const Signal g = read_csv(io);
  REQUIRE(g.size() == f.size());
  REQUIRE(g.dim() == 2);
  CHECK(g.dt() == doctest::Approx(f.dt()));
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(g.at(i, 0) == f.at(i, 0));
    CHECK(g.at(i, 1) == f.at(i, 1));
  }
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_csv(in);
  };
  CHECK(code_of([&] { parse(""); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { parse("t,x1\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { parse("t,x1\n0,1\n0.1,2\n0.3,3\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { parse("t,x1\n0,1\n0.1,abc\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { parse("t,x1,x2\n0,1\n"); }) == ErrorCode::ParseError);
  CHECK(parse("t,x1\n0,1\n0.1,2\n0.2,3\n").size() == 3);
}
