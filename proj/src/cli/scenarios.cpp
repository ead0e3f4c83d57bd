#include <cmath>
#include <numbers>

#include "plab/cli.hpp"
#include "plab/error.hpp"

namespace plab::cli {
namespace {

using systems::ForcingKind;
using systems::Matrix;
using systems::Method;
using systems::SystemKind;
using systems::TrigTerm;

const double kSqrt2 = std::numbers::sqrt2;
const double kPi = std::numbers::pi;

IntegratorConfig adaptive(double rel_tol, double t_end, double record_dt) {
  IntegratorConfig c;
  c.method = Method::rk45_adaptive;
  c.dt = 0.01;
  c.rel_tol = rel_tol;
  c.abs_tol = rel_tol * 1e-2;
  c.t_end = t_end;
  c.record_dt = record_dt;
  return c;
}

// Classification of a reconstructed entire trajectory on [-W, W]: the
// window covers [-W, 0], the shifts span [0, W].
ClassifyConfig entire_classify(double W, double step) {
  ClassifyConfig c;
  c.window = Window(-W / 2.0, W / 2.0);
  c.grid = {0.0, W, step};
  return c;
}

void common_checks(ScenarioConfig& s, std::size_t order_pairs) {
  s.analysis.convergence.enabled = true;
  s.analysis.order.pairs = order_pairs;
  s.analysis.stability.enabled = true;
}

ScenarioConfig opial_scalar() {
  ScenarioConfig s;
  s.name = "s1-opial-scalar";
  s.system.kind = SystemKind::scalar_ode;
  s.system.dim = 1;
  s.system.rhs.key = "linear+trig";
  s.system.rhs.coupling = Matrix(1, 1, {-1.0});
  s.system.rhs.forcing.terms = {TrigTerm{0, 1.0, 1.0, 0.0}, TrigTerm{0, 1.0, kSqrt2, 0.0}};
  s.system.box = {{-3.0}, {3.0}};
  s.integrator = adaptive(1e-10, 100.0, 0.01);
  s.analysis.initial = {0.0};
  s.analysis.closed_form = "undetermined-coefficients";
  common_checks(s, 100);
  auto& cv = s.analysis.convergence;
  cv.separation_lo = 10.0;
  cv.separation_hi = 15.0;
  cv.separation_bound = std::exp(-10.0) + 1e-6;

  // Quasi-periodic returns get sparse: a geometric schedule with ratio
  // 0.45 reaches D ~ 2e-5 near t ~ 5e5.
  auto& l = s.analysis.limits;
  l.enabled = true;
  l.integrator = adaptive(1e-8, 100.0, 0.05);
  l.returns.horizon = 520000.0;
  l.returns.ratio = 0.45;
  l.returns.count = 13;
  l.settle_time = 30.0;
  l.entire_half_width = 100.0;
  l.entire_classify = entire_classify(100.0, 0.05);
  l.expected_class = "quasi_periodic";
  l.expected_freqs = {1.0, kSqrt2};
  return s;
}

ScenarioConfig levitan() {
  ScenarioConfig s;
  s.name = "levitan";
  s.system.kind = SystemKind::scalar_ode;
  s.system.dim = 1;
  s.system.rhs.key = "levitan-base";
  s.system.rhs.coupling = Matrix(1, 1, {-1.0});
  s.system.rhs.forcing.kind = ForcingKind::levitan_psi;
  s.system.box = {{-3.0}, {3.0}};
  s.integrator = adaptive(1e-10, 100.0, 0.01);
  s.analysis.initial = {0.0};
  common_checks(s, 0);
  auto& lv = s.analysis.levitan;
  lv.enabled = true;
  lv.sample_dt = 0.05;
  lv.classify.window = Window(0.0, 500.0);
  lv.classify.grid = {0.0, 1000.0, 0.1};
  lv.classify.bohr_epsilons = {0.5, 0.2, 0.1};
  lv.classify.compare_epsilons = {0.2, 0.1};
  return s;
}

// Periodic forcings return exactly at multiples of the period, so a slower
// schedule still finds every return.
void periodic_limits(ScenarioConfig& s, double rel_tol, double settle, double horizon) {
  auto& l = s.analysis.limits;
  l.enabled = true;
  l.integrator = s.integrator;
  l.integrator.rel_tol = rel_tol;
  l.integrator.abs_tol = rel_tol * 1e-2;
  l.integrator.record_dt = 0.05;
  if (l.integrator.method == Method::rk4_fixed) l.integrator.dt = 0.01;
  l.returns.horizon = horizon;
  l.returns.ratio = 0.6;
  l.returns.count = 20;
  l.settle_time = settle;
  l.entire_half_width = 50.0;
  l.entire_classify = entire_classify(50.0, 0.05);
  l.expected_class = "periodic";
}

ScenarioConfig coop_2d() {
  ScenarioConfig s;
  s.name = "s3-coop-2d";
  s.system.kind = SystemKind::cooperative_ode;
  s.system.dim = 2;
  s.system.rhs.key = "linear+trig";
  s.system.rhs.coupling = Matrix(2, 2, {-1.0, 0.5, 0.5, -1.0});
  s.system.rhs.forcing.terms = {TrigTerm{0, 1.0, 1.0, 0.0}, TrigTerm{1, 1.0, 1.0, kPi / 2.0}};
  s.system.box = {{-3.0, -3.0}, {3.0, 3.0}};
  s.integrator = adaptive(1e-10, 100.0, 0.01);
  s.analysis.initial = {0.0, 0.0};
  common_checks(s, 100);
  periodic_limits(s, 1e-10, 30.0, 200.0);
  return s;
}

ScenarioConfig dde_linear() {
  ScenarioConfig s;
  s.name = "s4-dde-linear";
  s.system.kind = SystemKind::dde_single_delay;
  s.system.dim = 1;
  s.system.rhs.key = "delay-linear";
  s.system.rhs.coupling = Matrix(1, 1, {-2.0});
  s.system.rhs.delayed = Matrix(1, 1, {1.0});
  s.system.rhs.delay = 1.0;
  s.system.rhs.forcing.terms = {TrigTerm{0, 1.0, 1.0, 0.0}};
  s.system.box = {{-3.0}, {3.0}};
  s.integrator.method = Method::rk4_fixed;
  s.integrator.dt = 0.01;
  s.integrator.record_dt = 0.01;
  s.integrator.t_end = 100.0;
  s.analysis.initial = {0.0};
  common_checks(s, 100);
  periodic_limits(s, 1e-10, 60.0, 200.0);
  // Fixed-step RK4 at dt = 0.01 leaves snapshot noise of a few 1e-9.
  s.analysis.limits.noise_floor = 1e-7;
  return s;
}

ScenarioConfig rd_scalar() {
  ScenarioConfig s;
  s.name = "s5-rd-scalar";
  s.system.kind = SystemKind::parabolic_1d;
  s.system.dim = 1;
  s.system.rhs.key = "rd-scalar";
  s.system.rhs.coupling = Matrix(1, 1, {-1.0});
  s.system.rhs.diffusivity = {0.1};
  s.system.rhs.length = kPi;
  s.system.rhs.neumann = true;
  s.system.rhs.profile_const = 1.0;
  s.system.rhs.profile_cos = 1.0;
  s.system.rhs.forcing.terms = {TrigTerm{0, 1.0, 1.0, 0.0}};
  s.system.box = {{-3.0}, {3.0}};
  s.integrator = adaptive(1e-8, 100.0, 0.05);
  s.integrator.space_points = 33;
  s.analysis.initial = {0.0};
  common_checks(s, 100);
  periodic_limits(s, 1e-8, 30.0, 200.0);
  return s;
}

struct Entry {
  const char* name;
  const char* summary;
  ScenarioConfig (*make)();
};

const Entry kCatalog[] = {
    {"s1-opial-scalar", "x' = -x + sin t + sin(sqrt2 t); quasi-periodic forcing, closed-form solution",
     opial_scalar},
    {"levitan", "h = 2 + cos t + cos(sqrt2 t), psi = sin(1/h): Levitan but not Bohr almost periodic",
     levitan},
    {"s3-coop-2d", "u' = A u + (sin t, cos t), A cooperative and Hurwitz", coop_2d},
    {"s4-dde-linear", "x'(t) = -2 x(t) + x(t - 1) + sin t", dde_linear},
    {"s5-rd-scalar", "u_t = 0.1 u_xx - u + (1 + cos x) sin t on [0, pi], Neumann", rd_scalar},
};

}  // namespace

std::vector<std::string> scenario_names() {
  std::vector<std::string> out;
  for (const auto& e : kCatalog) out.emplace_back(e.name);
  return out;
}

bool is_builtin(const std::string& name) {
  for (const auto& e : kCatalog)
    if (name == e.name) return true;
  return false;
}

ScenarioConfig builtin_scenario(const std::string& name) {
  for (const auto& e : kCatalog)
    if (name == e.name) return e.make();
  fail(ErrorCode::ConfigInvalid, "unknown scenario '" + name + "'");
}

std::string scenario_summary(const std::string& name) {
  for (const auto& e : kCatalog)
    if (name == e.name) return e.summary;
  fail(ErrorCode::ConfigInvalid, "unknown scenario '" + name + "'");
}

}  // namespace plab::cli
