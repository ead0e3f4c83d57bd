#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "plab/cli.hpp"
#include "plab/error.hpp"
#include "plab/systems.hpp"

using namespace plab;
using namespace plab::systems;

namespace {

SystemSpec scalar(double a, std::vector<TrigTerm> terms = {}) {
  SystemSpec s;
  s.kind = SystemKind::scalar_ode;
  s.dim = 1;
  s.rhs.coupling = Matrix(1, 1, {a});
  s.rhs.forcing.terms = std::move(terms);
  return s;
}

SystemSpec delay(double a, double b, double r) {
  SystemSpec s;
  s.kind = SystemKind::dde_single_delay;
  s.dim = 1;
  s.rhs.key = "delay-linear";
  s.rhs.coupling = Matrix(1, 1, {a});
  s.rhs.delayed = Matrix(1, 1, {b});
  s.rhs.delay = r;
  return s;
}

SystemSpec heat(double nu, double L) {
  SystemSpec s;
  s.kind = SystemKind::parabolic_1d;
  s.dim = 1;
  s.rhs.key = "rd-scalar";
  s.rhs.coupling = Matrix(1, 1, {0.0});
  s.rhs.diffusivity = {nu};
  s.rhs.length = L;
  return s;
}

IntegratorConfig rk45(double tol, double t_end, double record = 0.01) {
  IntegratorConfig c;
  c.rel_tol = tol;
  c.abs_tol = tol * 1e-2;
  c.t_end = t_end;
  c.record_dt = record;
  return c;
}

IntegratorConfig rk4(double dt, double t_end) {
  IntegratorConfig c;
  c.method = Method::rk4_fixed;
  c.dt = dt;
  c.record_dt = dt;
  c.t_end = t_end;
  return c;
}

double sup_error(const Signal& s, const auto& exact) {
  double err = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) err = std::max(err, std::abs(s.at(i, 0) - exact(s.time(i))));
  return err;
}

}  // namespace

TEST_CASE("integrate_ode examples") {
  SUBCASE("exponential decay") {
    const Signal x = integrate_ode(scalar(-1.0), {1.0}, rk45(1e-8, 2.0));
    CHECK(x.at(0, 0) == 1.0);
    CHECK(x.eval(1.0, 0) == doctest::Approx(0.3678794).epsilon(1e-6));
  }
  SUBCASE("zero field keeps the constant") {
    const Signal x = integrate_ode(scalar(0.0), {2.5}, rk45(1e-8, 5.0));
    CHECK(sup_error(x, [](double) { return 2.5; }) == 0.0);
  }
  SUBCASE("forced linear oracle") {
    const Signal x = integrate_ode(scalar(-1.0, {TrigTerm{0, 1.0, 1.0, 0.0}}), {-0.5}, rk45(1e-10, 50.0));
    CHECK(sup_error(x, [](double t) { return (std::sin(t) - std::cos(t)) / 2.0; }) <= 1e-6);
  }
  SUBCASE("blow-up is detected") {
    SystemSpec s = scalar(1.0);
    s.box = {{-1.0}, {1.0}};
    try {
      integrate_ode(s, {1.0}, rk45(1e-8, 100.0));
      FAIL("expected BlowupDetected");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BlowupDetected);
    }
  }
}

TEST_CASE("cocycle identity") {
  const SystemSpec s = plab::cli::builtin_scenario("s1-opial-scalar").system;
  const IntegratorConfig c = rk45(1e-11, 1.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int k = 0; k < 20; ++k) {
    const double t = u(rng), tau = u(rng);
    const double whole[] = {t + tau};
    const double first[] = {tau};
    const double second[] = {t};
    const State direct = integrate_ode_at(s, {0.3}, whole, c).front();
    const State mid = integrate_ode_at(s, {0.3}, first, c).front();
    const State restarted = integrate_ode_at(s.shifted(tau), mid, second, c).front();
    CHECK(std::abs(direct[0] - restarted[0]) <= 1e-8);
  }
}

TEST_CASE("rk45 and rk4 agree on the built-in ODE scenarios") {
  for (const char* name : {"s1-opial-scalar", "s3-coop-2d"}) {
    const auto cfg = plab::cli::builtin_scenario(name);
    IntegratorConfig fine = rk4(1e-3, 10.0);
    fine.record_dt = 0.01;
    const Signal a = integrate_ode(cfg.system, cfg.analysis.initial, rk45(1e-10, 10.0));
    const Signal b = integrate_ode(cfg.system, cfg.analysis.initial, fine);
    REQUIRE(a.size() == b.size());
    CHECK(signals::sup_distance(a, b, signals::Window(5.0, 5.0)) <= 1e-5);
  }
}

TEST_CASE("built-in trajectories stay in their boxes") {
  for (const auto& name : plab::cli::scenario_names()) {
    const auto cfg = plab::cli::builtin_scenario(name);
    if (cfg.system.kind == SystemKind::dde_single_delay || cfg.system.kind == SystemKind::parabolic_1d) continue;
    const Signal x = integrate_ode(cfg.system, cfg.analysis.initial, rk45(1e-8, 50.0));
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(cfg.system.box.contains(x[i]));
  }
}

TEST_CASE("integrate_dde examples") {
  SUBCASE("zero history stays zero") {
    const SystemSpec s = delay(0.0, -1.0, 1.0);
    const Signal x = integrate_dde(s, constant_history(s, {0.0}, rk4(0.01, 5.0)), rk4(0.01, 5.0));
    CHECK(x.t0() == doctest::Approx(-1.0));
    CHECK(x.sup_norm() == 0.0);
  }
  SUBCASE("first step of x' = x(t-1)") {
    const SystemSpec s = delay(0.0, 1.0, 1.0);
    const Signal x = integrate_dde(s, constant_history(s, {1.0}, rk4(0.01, 1.0)), rk4(0.01, 1.0));
    double err = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x.time(i) >= 0.0) err = std::max(err, std::abs(x.at(i, 0) - (1.0 + x.time(i))));
    CHECK(err <= 1e-8);
  }
  SUBCASE("equilibrium of x' = -x + x(t-1)") {
    const SystemSpec s = delay(-1.0, 1.0, 1.0);
    const Signal x = integrate_dde(s, constant_history(s, {0.7}, rk4(0.01, 10.0)), rk4(0.01, 10.0));
    CHECK(sup_error(x, [](double) { return 0.7; }) <= 1e-12);
  }
  SUBCASE("history must cover [-r, 0]") {
    const SystemSpec s = delay(-1.0, 1.0, 1.0);
    const Signal bad = Signal::sample_scalar([](double) { return 0.0; }, -0.5, 0.0, 0.01);
    try {
      integrate_dde(s, bad, rk4(0.01, 1.0));
      FAIL("expected HistoryDomainMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::HistoryDomainMismatch);
    }
  }
}

TEST_CASE("integrate_parabolic examples") {
  const double pi = std::numbers::pi;
  SUBCASE("constants are equilibria") {
    const SystemSpec s = heat(0.5, 2.0);
    IntegratorConfig c = rk45(1e-9, 2.0, 0.1);
    c.space_points = 40;
    const Field f = integrate_parabolic(s, make_grid_function(s, 40, [](std::size_t, double) { return 1.5; }), c);
    for (std::size_t k = 0; k < f.signal.size(); ++k)
      for (double v : f.signal[k]) CHECK(std::abs(v - 1.5) <= 1e-12);
  }
  SUBCASE("cosine mode decay and mean conservation") {
    const double nu = 1.0, L = 1.0;
    const SystemSpec s = heat(nu, L);
    IntegratorConfig c = rk45(1e-9, L * L / (nu * pi * pi), 0.001);
    c.dt = 1e-5;
    c.space_points = 200;
    const auto u0 = make_grid_function(s, 200, [&](std::size_t, double x) { return 0.3 + std::cos(pi * x / L); });
    const Field f = integrate_parabolic(s, u0, c);
    const GridFunction last = f.at(f.signal.size() - 1);
    CHECK(std::abs(last.mean(0) - u0.mean(0)) <= 1e-8 * std::abs(u0.mean(0)));
    const double amp = (last.value(0, 0) - last.value(0, 199)) / 2.0;
    CHECK(amp == doctest::Approx(std::exp(-1.0)).epsilon(1e-2));
  }
  SUBCASE("coarse grids are rejected") {
    const SystemSpec s = heat(1.0, 1.0);
    IntegratorConfig c = rk45(1e-8, 1.0);
    c.space_points = 5;
    try {
      integrate_parabolic(s, make_grid_function(s, 5, [](std::size_t, double) { return 0.0; }), c);
      FAIL("expected GridTooCoarse");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::GridTooCoarse);
    }
  }
}

TEST_CASE("quasimonotone_check") {
  const double probes[] = {0.0, 1.0, 2.5};
  auto two_d = [](std::vector<double> a) {
    SystemSpec s;
    s.kind = SystemKind::cooperative_ode;
    s.dim = 2;
    s.rhs.coupling = Matrix(2, 2, std::move(a));
    s.box = {{-1.0, -1.0}, {1.0, 1.0}};
    return s;
  };
  SystemSpec good = two_d({-1.0, 0.5, 0.5, -1.0});
  CHECK(quasimonotone_check(good, good.box, probes, 1e-6).pass);
  SystemSpec bad = two_d({-1.0, -0.5, 0.5, -1.0});
  const auto v = quasimonotone_check(bad, bad.box, probes, 1e-6);
  REQUIRE_FALSE(v.pass);
  REQUIRE(v.witness);
  CHECK(v.witness->i == 0);
  CHECK(v.witness->j == 1);
  SystemSpec one = scalar(3.0);
  one.box = {{-1.0}, {1.0}};
  CHECK(quasimonotone_check(one, one.box, probes, 1e-6).pass);
  SystemSpec dde = delay(-2.0, -1.0, 1.0);
  dde.box = {{-1.0}, {1.0}};
  const auto dv = quasimonotone_check(dde, dde.box, probes, 1e-6);
  CHECK_FALSE(dv.pass);
  REQUIRE(dv.witness);
  CHECK(dv.witness->delayed);
  for (const auto& name : plab::cli::scenario_names()) {
    const auto cfg = plab::cli::builtin_scenario(name);
    CHECK_MESSAGE(quasimonotone_check(cfg.system, cfg.system.box, probes, 1e-6).pass, name);
  }
}

TEST_CASE("order_check") {
  auto c = [](double v) { return Signal::sample_scalar([v](double) { return v; }, 0.0, 10.0, 0.1); };
  const Signal s = Signal::sample_scalar([](double t) { return std::sin(t); }, 0.0, 10.0, 0.1);
  CHECK(order_check(s, s, 0.0).ordered);
  CHECK(order_check(c(0.0), c(1.0), 0.0).ordered);
  const auto v = order_check(s, c(0.0), 1e-9);
  CHECK_FALSE(v.ordered);
  CHECK(v.t == doctest::Approx(0.1));
  const Signal other = Signal::sample_scalar([](double) { return 0.0; }, 0.0, 10.0, 0.2);
  try {
    order_check(s, other, 0.0);
    FAIL("expected GridMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GridMismatch);
  }
}

TEST_CASE("comparison principle in the cooperative built-ins") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0), gap(0.0, 0.5);
  for (const char* name : {"s3-coop-2d"}) {
    const auto cfg = plab::cli::builtin_scenario(name);
    for (int k = 0; k < 20; ++k) {
      State a(cfg.system.dim), b(cfg.system.dim);
      for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = u(rng);
        b[i] = a[i] + gap(rng);
      }
      const Signal x = integrate_ode(cfg.system, a, rk45(1e-9, 50.0, 0.05));
      const Signal y = integrate_ode(cfg.system, b, rk45(1e-9, 50.0, 0.05));
      CHECK(order_check(x, y, 1e-9 + 1e-6 * std::max(x.sup_norm(), y.sup_norm())).ordered);
    }
  }
}
