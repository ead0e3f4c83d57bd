#include <cmath>
#include <numbers>

#include <doctest.h>

#include "plab/cli.hpp"
#include "plab/error.hpp"
#include "plab/limits.hpp"

using namespace plab;
using namespace plab::limits;
using systems::Matrix;
using systems::SystemKind;
using systems::SystemSpec;
using systems::TrigTerm;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

SystemSpec scalar(double a, bool forced) {
  SystemSpec s;
  s.kind = SystemKind::scalar_ode;
  s.dim = 1;
  s.rhs.coupling = Matrix(1, 1, {a});
  if (forced) s.rhs.forcing.terms = {TrigTerm{0, 1.0, 1.0, 0.0}};
  s.box = {{-2.0}, {2.0}};
  return s;
}

IntegratorConfig tight(double t_end = 10.0) {
  IntegratorConfig c;
  c.rel_tol = 1e-11;
  c.abs_tol = 1e-13;
  c.t_end = t_end;
  c.record_dt = 0.01;
  return c;
}

ReturnSequence returns_at(std::vector<double> times) {
  ReturnSequence r;
  r.times = std::move(times);
  r.discrepancies.assign(r.times.size(), 0.0);
  r.epsilon_schedule.assign(r.times.size(), 1.0);
  r.window = signals::Window(5.0, 5.0);
  return r;
}

ReturnSequence periods(int first, int last) {
  std::vector<double> t;
  for (int n = first; n <= last; ++n) t.push_back(kTwoPi * n);
  return returns_at(t);
}

Signal constant(double c, double hi) {
  return Signal::sample_scalar([c](double) { return c; }, 0.0, hi, 0.01);
}

}  // namespace

TEST_CASE("omega_fiber_sample") {
  SUBCASE("constant trajectory") {
    const auto s = omega_fiber_sample(constant(0.4, 100.0), periods(1, 10), 20.0);
    CHECK(s.snapshots.size() == s.times.size());
    for (const auto& x : s.snapshots) CHECK(x[0] == doctest::Approx(0.4));
  }
  SUBCASE("forced linear decay settles on the phase-0 value") {
    const SystemSpec sys = scalar(-1.0, true);
    const auto s = omega_fiber_sample(sys, {1.0}, periods(1, 12), 20.0, tight());
    REQUIRE(s.snapshots.size() >= 3);
    for (double t : s.times) CHECK(t > 20.0);
    for (const auto& x : s.snapshots) CHECK(std::abs(x[0] + 0.5) <= 1e-4);
  }
  SUBCASE("diverging trajectory with capped horizon") {
    const Signal e = Signal::sample_scalar([](double t) { return std::exp(t); }, 0.0, 20.0, 0.01);
    const auto s = omega_fiber_sample(e, returns_at({2, 4, 6, 8, 10}), 1.0);
    for (std::size_t k = 1; k < s.snapshots.size(); ++k) CHECK(s.snapshots[k][0] > s.snapshots[k - 1][0]);
  }
  SUBCASE("too few retained returns") {
    try {
      omega_fiber_sample(constant(0.0, 100.0), periods(1, 4), 20.0);
      FAIL("expected InsufficientReturns");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InsufficientReturns);
    }
  }
}

TEST_CASE("fiber_extrema") {
  OmegaSample s;
  s.times = {1.0};
  s.snapshots = {{0.3, 0.7}};
  auto one = fiber_extrema(s, 1e-12);
  CHECK(one.alpha == one.beta);
  CHECK(one.alpha_in_sample);
  CHECK(one.beta_in_sample);

  s.times = {1.0, 2.0};
  s.snapshots = {{0.0, 1.0}, {1.0, 0.0}};
  auto two = fiber_extrema(s, 1e-12);
  CHECK(two.alpha == systems::State{0.0, 0.0});
  CHECK(two.beta == systems::State{1.0, 1.0});
  CHECK_FALSE(two.alpha_in_sample);
  CHECK_FALSE(two.beta_in_sample);

  s.times = {1.0, 2.0, 3.0};
  s.snapshots = {{0.5}, {0.2}, {0.9}};
  auto three = fiber_extrema(s, 1e-12);
  CHECK(three.alpha[0] == 0.2);
  CHECK(three.beta[0] == 0.9);
  CHECK(three.alpha_in_sample);
  CHECK(three.beta_in_sample);
  for (const auto& x : s.snapshots) {
    CHECK(three.alpha[0] <= x[0]);
    CHECK(x[0] <= three.beta[0]);
  }
}

TEST_CASE("gamma_extract") {
  GammaConfig cfg;
  cfg.integrator = tight();
  cfg.settle_time = 20.0;
  SUBCASE("contracting forced scalar") {
    const auto g = gamma_extract(scalar(-1.0, true), {1.5}, periods(1, 12), cfg);
    CHECK(g.cauchy);
    CHECK(std::abs(g.gamma[0] + 0.5) <= 1e-6);
    CHECK(g.cauchy_tail.size() + 1 == g.snapshots.size());
  }
  SUBCASE("equilibrium") {
    const auto g = gamma_extract(scalar(-1.0, false), {0.0}, periods(1, 12), cfg);
    CHECK(g.cauchy);
    CHECK(g.gamma[0] == 0.0);
    for (double gap : g.cauchy_tail) CHECK(gap == 0.0);
  }
  SUBCASE("expansion is not Cauchy") {
    cfg.settle_time = 0.0;
    try {
      gamma_extract(scalar(1.0, false), {1e-3}, returns_at({1, 2, 3, 4, 5, 6, 7, 8}), cfg);
      FAIL("expected NotCauchy");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotCauchy);
    }
    cfg.require_cauchy = false;
    CHECK_FALSE(gamma_extract(scalar(1.0, false), {1e-3}, returns_at({1, 2, 3, 4, 5, 6, 7, 8}), cfg).cauchy);
  }
}

TEST_CASE("sandwich and invariance on the forced scalar") {
  const SystemSpec sys = scalar(-1.0, true);
  const auto r = periods(1, 12);
  const auto x = omega_fiber_sample(sys, {1.0}, r, 20.0, tight());
  const auto ext = fiber_extrema(x, 1e-9);
  CHECK(ext.alpha[0] <= ext.beta[0]);
  GammaConfig cfg;
  cfg.integrator = tight();
  cfg.settle_time = 20.0;
  const auto low = gamma_extract(sys, ext.alpha, r, cfg);
  const auto high = gamma_extract(sys, ext.beta, r, cfg);
  CHECK(std::abs(low.gamma[0] - high.gamma[0]) <= 1e-3);
  CHECK(sandwich_check(x, ext, low, high, 1e-6).holds);
  CHECK(omega_invariance(sys, x, 0, tight()) <= 1e-3);
  CHECK(omega_invariance(sys, x, x.snapshots.size() - 1, tight()) <= 1e-3);
  CHECK(omega_diameter(x) <= 1e-3);
}

TEST_CASE("hausdorff") {
  const std::vector<systems::State> a{{0.0}, {1.0}}, b{{0.0}, {1.0}, {1.5}};
  CHECK(hausdorff(a, a) == 0.0);
  CHECK(hausdorff(a, b) == doctest::Approx(0.5));
  CHECK(hausdorff(b, a) == doctest::Approx(0.5));
}

TEST_CASE("entire_trajectory_estimate") {
  SUBCASE("periodic trajectory") {
    const Signal s = Signal::sample_scalar([](double t) { return std::sin(t); }, 0.0, 200.0, 0.01);
    const auto e = entire_trajectory_estimate(s, periods(2, 20), 10.0);
    CHECK(e.agreement <= 1e-6);
    CHECK(e.gamma_signal.t0() == doctest::Approx(-10.0));
    CHECK(e.gamma_signal.t_end() == doctest::Approx(10.0));
    CHECK(e.t_last > e.t_prev);
  }
  SUBCASE("ramp with fabricated returns") {
    const Signal s = Signal::sample_scalar([](double t) { return t; }, 0.0, 200.0, 0.01, signals::Interp::linear);
    const auto e = entire_trajectory_estimate(s, returns_at({50, 60, 70}), 10.0);
    CHECK(e.agreement == doctest::Approx(10.0).epsilon(1e-6));
  }
  SUBCASE("forced scalar after settling") {
    const auto cfg = plab::cli::builtin_scenario("s1-opial-scalar");
    const Signal forcing = cfg.system.rhs.forcing.sample(1, 0.0, 0.0, 3000.0, 0.05);
    const auto r = recurrence::poisson_returns(forcing, {0.5, 0.3, 0.2, 0.1}, signals::Window(10.0, 10.0),
                                               recurrence::ReturnSearch{30.0, 0.0, 2900.0});
    REQUIRE(r.size() >= 2);
    const auto e = entire_trajectory_estimate(cfg.system, {0.0}, r, 10.0, tight());
    const std::size_t n = r.size();
    CHECK(e.agreement <= r.discrepancies[n - 1] + r.discrepancies[n - 2] + 1e-6);
  }
  SUBCASE("too few usable returns") {
    try {
      entire_trajectory_estimate(constant(0.0, 100.0), returns_at({5, 50}), 10.0);
      FAIL("expected InsufficientReturns");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InsufficientReturns);
    }
  }
}

TEST_CASE("uniform_stability_estimate") {
  StabilityConfig cfg;
  cfg.integrator = tight();
  cfg.probes = 16;
  cfg.horizon = 10.0;
  const std::vector<double> eps{0.01, 0.1};
  SUBCASE("contraction") {
    for (const auto& row : uniform_stability_estimate(scalar(-1.0, false), {0.0}, eps, cfg))
      CHECK(row.delta_hat >= row.epsilon * (1.0 - 1e-3));
  }
  SUBCASE("isometry") {
    for (const auto& row : uniform_stability_estimate(scalar(0.0, false), {0.0}, eps, cfg))
      CHECK(row.delta_hat == doctest::Approx(row.epsilon).epsilon(1e-6));
  }
  SUBCASE("expansion") {
    const auto rows = uniform_stability_estimate(scalar(1.0, false), {0.0}, eps, cfg);
    for (const auto& row : rows) CHECK(row.delta_hat == doctest::Approx(row.epsilon * std::exp(-10.0)).epsilon(1e-2));
    CHECK(rows[0].delta_hat <= rows[1].delta_hat);
  }
}

TEST_CASE("contraction_check") {
  const IntegratorConfig c = tight();
  CHECK(contraction_check(scalar(-1.0, false), 8, 5.0, c, 3).contracting);
  const auto v = contraction_check(scalar(0.0, false), 8, 5.0, c, 3);
  CHECK_FALSE(v.contracting);
  CHECK(v.witness);
  const auto s3 = plab::cli::builtin_scenario("s3-coop-2d");
  CHECK(contraction_check(s3.system, 8, 5.0, c, 3).contracting);
}

TEST_CASE("convergence_check") {
  SUBCASE("identical signals") {
    const Signal s = constant(1.0, 100.0);
    const auto r = convergence_check(s, s, 1e-3, 5, 20.0);
    CHECK(r.passed);
    for (const auto& [T, d] : r.splits) CHECK(d == 0.0);
  }
  SUBCASE("forced decay from two starts") {
    const SystemSpec sys = scalar(-1.0, true);
    const Signal a = systems::integrate_ode(sys, {0.0}, tight(100.0));
    const Signal b = systems::integrate_ode(sys, {1.0}, tight(100.0));
    CHECK(signals::sup_distance(a, b, signals::Window::from_range(10.0, 15.0)) <= std::exp(-10.0) + 1e-8);
    const auto r = convergence_check(a, b, 1e-3, 5, 20.0);
    CHECK(r.passed);
    CHECK(r.trend == Trend::decreasing);
    for (std::size_t k = 1; k < r.splits.size(); ++k) CHECK(r.splits[k].first > r.splits[k - 1].first);
  }
  SUBCASE("expansion") {
    const SystemSpec sys = scalar(1.0, false);
    const Signal a = systems::integrate_ode(sys, {0.01}, tight(10.0));
    const Signal b = systems::integrate_ode(sys, {0.02}, tight(10.0));
    const auto r = convergence_check(a, b, 1e-3, 5, 2.0);
    CHECK(r.trend == Trend::increasing);
    CHECK_FALSE(r.passed);
  }
}
