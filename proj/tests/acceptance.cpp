// Acceptance battery: one PASS/FAIL line per criterion.
//   acceptance <poisson_lab binary> <work dir>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "plab/cli.hpp"
#include "plab/limits.hpp"
#include "plab/recurrence.hpp"
#include "plab/signals.hpp"
#include "plab/systems.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace plab;
using recurrence::Signal;
using recurrence::TauGrid;
using recurrence::Window;

namespace {

const double kSqrt2 = std::numbers::sqrt2;
const double kPi = std::numbers::pi;

std::string g_lab;
fs::path g_work;
int g_failures = 0;

void report(int n, bool pass, const std::string& detail) {
  if (!pass) ++g_failures;
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", n, detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int lab(const std::string& args, const fs::path& log) {
  const std::string cmd = "\"" + g_lab + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const json* find_check(const json& manifest, const std::string& name) {
  for (const auto& c : manifest["checks"])
    if (c["name"] == name) return &c;
  return nullptr;
}

double num(const json& v) {
  if (v.is_number()) return v.get<double>();
  return std::nan("");
}

// x' = -x + sin t + sin(sqrt2 t): particular solution by undetermined
// coefficients, a sin(wt) + b cos(wt) with a = 1/(1+w^2), b = -w/(1+w^2).
double s1_particular(double t) {
  return (std::sin(t) - std::cos(t)) / 2.0 + (std::sin(kSqrt2 * t) - kSqrt2 * std::cos(kSqrt2 * t)) / 3.0;
}

void criterion1() {
  const auto cfg = cli::builtin_scenario("s1-opial-scalar");
  const auto t0 = std::chrono::steady_clock::now();
  auto ic = cfg.integrator;
  ic.t_end = 100.0;
  const Signal x = systems::integrate_ode(cfg.system, {s1_particular(0.0)}, ic);
  double err = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) err = std::max(err, std::abs(x.at(i, 0) - s1_particular(x.time(i))));
  const double secs = seconds_since(t0);
  report(1, err <= 1e-5 && secs < 5.0 && x.t_end() >= 100.0 - 1e-9,
         "s1 closed form sup error " + fmt(err) + " on [0, " + fmt(x.t_end()) + "] (<= 1e-5), runtime " + fmt(secs) +
             " s (< 5)");
}

void criterion2() {
  const auto cfg = cli::builtin_scenario("s1-opial-scalar");
  auto ic = cfg.integrator;
  ic.t_end = 100.0;
  const Signal a = systems::integrate_ode(cfg.system, {0.0}, ic);
  const Signal b = systems::integrate_ode(cfg.system, {1.0}, ic);
  const double sep = signals::sup_distance(a, b, Window::from_range(10.0, 15.0));
  const double bound = std::exp(-10.0) + 1e-6;
  const auto conv = limits::convergence_check(a, b, 1e-3, 5, 20.0);
  report(2, sep <= bound && conv.passed,
         "sup on [10,15] " + fmt(sep) + " (<= " + fmt(bound) + "), convergence_check " +
             (conv.passed ? "passed" : "failed") + " at 1e-3, last split " + fmt(conv.splits.back().second));
}

void criterion3() {
  recurrence::ClassifyConfig cc;
  cc.window = Window::from_range(0.0, 500.0);
  cc.grid = {0.0, 500.0, 0.05};
  const Signal s = Signal::sample_scalar([](double t) { return std::sin(t); }, 0.0, 1000.0, 0.05);
  const auto srep = recurrence::classify(s, nullptr, cc);
  const bool sin_ok = srep.periodic.verdict == recurrence::Tri::yes &&
                      std::abs(srep.periodic.period - 2.0 * kPi) <= 0.02;

  const Signal h = Signal::sample_scalar(systems::levitan_h, 0.0, 1000.0, 0.05);
  const auto fit = recurrence::quasi_periodic_fit(h, 4, cc.window);
  const bool freqs_ok = fit.freqs.size() == 2 && std::abs(fit.freqs[0] - 1.0) <= 1e-2 &&
                        std::abs(fit.freqs[1] - 1.41421) <= 1e-2 && fit.residual < 1e-2 && fit.independent;
  const auto hrep = recurrence::classify(h, nullptr, cc);
  const auto table = recurrence::density_table(h, {0.5, 0.2}, cc.grid, cc.window);
  bool unsat = true;
  std::string lengths;
  for (const auto& row : table) {
    unsat = unsat && !row.saturated;
    lengths += " L(" + fmt(row.epsilon) + ")=" + fmt(row.inclusion_length);
  }
  std::string freq_text;
  for (double w : fit.freqs) freq_text += " " + fmt(w);
  report(3, sin_ok && freqs_ok && unsat && hrep.primary_class() == "quasi_periodic",
         "sin period " + fmt(srep.periodic.period) + ", h class " + hrep.primary_class() + " freqs" + freq_text +
             " residual " + fmt(fit.residual) + ", bohr table" + lengths + (unsat ? " unsaturated" : " SATURATED"));
}

void criterion4() {
  const Window w(0.0, 500.0);
  const TauGrid grid{0.0, 1000.0, 0.1};
  const double dt = 0.05;
  auto sample = [&](auto fn) { return Signal::sample_scalar(fn, -501.0, 1501.0, dt); };
  const Signal h = sample(systems::levitan_h);
  const Signal phi = sample([](double t) { return 1.0 / systems::levitan_h(t); });
  const Signal psi = sample([](double t) { return std::sin(1.0 / systems::levitan_h(t)); });
  const auto dpsi = recurrence::discrepancy_profile(psi, grid, w);
  const auto table = recurrence::density_table_from_profile(dpsi, {0.1}, grid, w);
  const bool saturated = table.front().saturated;
  const std::vector<double> eps{0.2, 0.1};
  const auto vs_h = recurrence::comparability_from_profiles(psi, h, dpsi, recurrence::discrepancy_profile(h, grid, w),
                                                            eps, grid, w);
  const auto vs_phi = recurrence::comparability_from_profiles(
      psi, phi, dpsi, recurrence::discrepancy_profile(phi, grid, w), eps, grid, w);
  bool lipschitz_h = true;
  std::string text_h, text_phi;
  for (const auto& r : vs_h.pairs) {
    lipschitz_h = lipschitz_h && r.delta_hat >= r.epsilon * (1.0 - 1e-3);
    text_h += " " + fmt(r.delta_hat);
  }
  bool lipschitz_phi = true;
  for (const auto& r : vs_phi.pairs) {
    lipschitz_phi = lipschitz_phi && r.delta_hat >= r.epsilon * (1.0 - 1e-3);
    text_phi += " " + fmt(r.delta_hat);
  }
  report(4, saturated && lipschitz_h,
         std::string("psi bohr at 0.1 ") + (saturated ? "saturated" : "unsaturated") + " (L=" +
             fmt(table.front().inclusion_length) + "); delta_hat(psi, h) at eps {0.2, 0.1}:" + text_h +
             " (need >= eps(1-1e-3)); for reference delta_hat(psi, phi = 1/h):" + text_phi +
             (lipschitz_phi ? " meets the bound" : " misses the bound"));
}

void criterion5() {
  bool ok = true;
  std::string detail;
  for (const char* name : {"s3-coop-2d", "s4-dde-linear", "s5-rd-scalar"}) {
    auto cfg = cli::builtin_scenario(name);
    cfg.analysis.closed_form.clear();
    cfg.analysis.convergence.enabled = false;
    cfg.analysis.limits.enabled = false;
    cfg.analysis.stability.enabled = false;
    cfg.analysis.order.pairs = 100;
    cfg.analysis.order.horizon = 50.0;
    cfg.analysis.order.slack = 1e-6;
    cfg.seeds = 1;
    const auto m = cli::run_scenario(cfg, (g_work / "c5" / name).string());
    bool ordered = false;
    for (const auto& c : m.checks)
      if (c.name == "order_preserved") ordered = c.passed && c.values["pairs"] == 100 && c.values["violations"] == 0;
    ok = ok && ordered && !m.error;
    detail += std::string(name) + (ordered ? " ordered" : " VIOLATED") + "; ";
  }
  const double probes[] = {0.0, 0.7, 1.9, 3.3};
  bool qm_all = true;
  for (const auto& name : cli::scenario_names()) {
    const auto cfg = cli::builtin_scenario(name);
    qm_all = qm_all && systems::quasimonotone_check(cfg.system, cfg.system.box, probes, 1e-6).pass;
  }
  auto planted = cli::builtin_scenario("s3-coop-2d").system;
  planted.rhs.coupling = systems::Matrix(2, 2, {-1.0, -0.5, 0.5, -1.0});
  const auto pv = systems::quasimonotone_check(planted, planted.box, probes, 1e-6);
  const bool planted_fails = !pv.pass && pv.witness && pv.witness->i == 0 && pv.witness->j == 1;
  ok = ok && qm_all && planted_fails;
  report(5, ok,
         detail + "quasimonotone " + (qm_all ? "passes" : "FAILS") + " on all built-ins, planted counterexample " +
             (planted_fails ? "fails with witness (1,2)" : "NOT detected"));
}

void criterion6() {
  systems::SystemSpec sys;
  sys.kind = systems::SystemKind::parabolic_1d;
  sys.dim = 1;
  sys.rhs.key = "rd-scalar";
  sys.rhs.coupling = systems::Matrix(1, 1, {0.0});
  sys.rhs.diffusivity = {1.0};
  sys.rhs.length = 1.0;
  sys.rhs.neumann = true;
  const double nu = 1.0, L = 1.0;
  const std::size_t points = 200;
  const double T = L * L / (nu * kPi * kPi);
  systems::IntegratorConfig ic;
  ic.rel_tol = 1e-9;
  ic.abs_tol = 1e-12;
  ic.t_end = T;
  ic.record_dt = T / 10.0;
  ic.space_points = points;
  const auto t0 = std::chrono::steady_clock::now();
  const auto u0 = systems::make_grid_function(sys, points, [&](std::size_t, double x) { return 1.0 + std::cos(kPi * x / L); });
  const auto field = systems::integrate_parabolic(sys, u0, ic);
  const double secs = seconds_since(t0);
  // First cosine coefficient by trapezoid projection.
  auto mode = [&](const systems::GridFunction& g) {
    double s = 0.0;
    const double dx = L / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
      const double wgt = (i == 0 || i + 1 == points) ? 0.5 : 1.0;
      s += wgt * g.value(0, i) * std::cos(kPi * g.x(i) / L) * dx;
    }
    return 2.0 * s / L;
  };
  double mean_dev = 0.0, rate_dev = 0.0;
  const double a0 = mode(u0), m0 = u0.mean(0);
  for (std::size_t k = 1; k < field.signal.size(); ++k) {
    const auto g = field.at(k);
    const double t = field.signal.time(k);
    mean_dev = std::max(mean_dev, std::abs(g.mean(0) - m0) / std::abs(m0));
    rate_dev = std::max(rate_dev, std::abs(mode(g) / (a0 * std::exp(-nu * kPi * kPi * t / (L * L))) - 1.0));
  }
  report(6, mean_dev <= 1e-8 && rate_dev <= 1e-2 && secs < 10.0,
         "mean drift " + fmt(mean_dev) + " (<= 1e-8 relative), mode-1 decay deviation " + fmt(rate_dev) +
             " (<= 1%) up to t = L^2/(nu pi^2), runtime " + fmt(secs) + " s (< 10)");
}

struct LimitsSummary {
  bool ok = false;
  std::string text;
};

// Reads the limit checks of a finished run and applies the acceptance
// tolerances to the recorded values.
LimitsSummary limits_summary(const std::string& name, const fs::path& dir, bool full) {
  LimitsSummary s;
  const fs::path mpath = dir / "report.json";
  if (!fs::exists(mpath)) {
    s.text = name + ": no report";
    return s;
  }
  std::ifstream in(mpath);
  const json m = json::parse(in);
  const json* gc = find_check(m, "gamma_cauchy");
  const json* dc = find_check(m, "delta_cauchy");
  const json* ag = find_check(m, "gamma_delta_agree");
  const json* sw = find_check(m, "sandwich");
  const json* ec = find_check(m, "entire_class");
  if (!gc || !dc || !ag || !sw || !ec) {
    s.text = name + ": limit checks missing";
    return s;
  }
  const std::string cls = (*ec)["values"]["primary_class"];
  const bool class_ok = (*ec)["passed"].get<bool>();
  if (!full) {
    s.ok = class_ok;
    s.text = name + ": entire class " + cls + (class_ok ? "" : " (MISMATCH)");
    return s;
  }
  const double g_gap = num((*gc)["values"]["final_gap"]);
  const double d_gap = num((*dc)["values"]["final_gap"]);
  const double agree = num((*ag)["values"]["sup_dist"]);
  const double gma = num((*sw)["values"]["gamma_minus_alpha"]);
  const double bmd = num((*sw)["values"]["beta_minus_delta"]);
  const double fiber = std::max(num((*sw)["values"]["lower_excess"]), num((*sw)["values"]["upper_excess"]));
  const bool cauchy = (*gc)["passed"].get<bool>() && (*dc)["passed"].get<bool>() && g_gap < 1e-4 && d_gap < 1e-4;
  const bool sandwich = gma <= 1e-6 && bmd <= 1e-6;
  s.ok = cauchy && agree <= 1e-3 && class_ok && sandwich;
  s.text = name + ": final gaps " + fmt(g_gap) + "/" + fmt(d_gap) + ", |gamma-delta| " + fmt(agree) +
           ", entire class " + cls + (class_ok ? "" : " (MISMATCH)") + ", gamma-alpha " + fmt(gma) +
           " beta-delta " + fmt(bmd) + " (need <= 1e-6; fiber-matched excess " + fmt(fiber) + ")";
  return s;
}

void criteria7and8() {
  const fs::path a = g_work / "s1_a", b = g_work / "s1_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const int ca = lab("run s1-opial-scalar --seed 7 --out \"" + a.string() + "\"", g_work / "s1_a.log");
  const int cb = lab("run s1-opial-scalar --seed 7 --out \"" + b.string() + "\"", g_work / "s1_b.log");

  const fs::path s3 = g_work / "s3", s5 = g_work / "s5";
  fs::remove_all(s3);
  fs::remove_all(s5);
  lab("run s3-coop-2d --seed 7 --out \"" + s3.string() + "\"", g_work / "s3.log");
  lab("run s5-rd-scalar --seed 7 --out \"" + s5.string() + "\"", g_work / "s5.log");
  const auto l1 = limits_summary("s1", a, true);
  const auto l3 = limits_summary("s3", s3, true);
  const auto l5 = limits_summary("s5", s5, false);
  report(7, l1.ok && l3.ok && l5.ok, l1.text + "; " + l3.text + "; " + l5.text);

  std::size_t compared = 0;
  bool same = ca != 2 && cb != 2;
  std::string first_diff;
  if (same && fs::exists(a)) {
    for (const auto& e : fs::directory_iterator(a)) {
      if (e.path().extension() != ".csv") continue;
      ++compared;
      const fs::path other = b / e.path().filename();
      if (!fs::exists(other) || slurp(e.path()) != slurp(other)) {
        same = false;
        if (first_diff.empty()) first_diff = e.path().filename().string();
      }
    }
  }
  same = same && compared >= 3;
  report(8, same,
         std::to_string(compared) + " CSV files from two `run s1-opial-scalar --seed 7` invocations " +
             (same ? "byte-identical" : "DIFFER" + (first_diff.empty() ? std::string() : " (" + first_diff + ")")));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: acceptance <poisson_lab> <work dir>\n");
    return 2;
  }
  g_lab = argv[1];
  g_work = argv[2];
  fs::create_directories(g_work);
  using Step = void (*)();
  const Step steps[] = {criterion1, criterion2, criterion3, criterion4, criterion5, criterion6, criteria7and8};
  int n = 1;
  for (Step step : steps) {
    try {
      step();
    } catch (const std::exception& e) {
      report(n, false, std::string("error: ") + e.what());
    }
    ++n;
  }
  std::printf("%d criterion line(s) failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
