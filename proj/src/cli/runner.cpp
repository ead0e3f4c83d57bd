#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "plab/cli.hpp"
#include "plab/error.hpp"
#include "plab/parallel.hpp"
#include "recurrence/report_tree.hpp"

namespace plab::cli {

const char* const kToolVersion = "poisson_lab 1.0.0";

namespace {

namespace fs = std::filesystem;
using recurrence::number;
using recurrence::Tri;
using signals::Signal;
using systems::SystemKind;

std::size_t full_size(const ScenarioConfig& cfg) { return limits::state_size(cfg.system, cfg.integrator); }

// Per-species values expanded to a state point (flat profiles for parabolic
// kinds).
State expand(const ScenarioConfig& cfg, const State& species) {
  const std::size_t n = full_size(cfg);
  if (n == species.size()) return species;
  const std::size_t points = cfg.integrator.space_points;
  State u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = species[i / points];
  return u;
}

std::size_t species_of(const ScenarioConfig& cfg, std::size_t i) {
  return full_size(cfg) == cfg.system.dim ? i : i / cfg.integrator.space_points;
}

Signal trajectory(const SystemSpec& sys, const State& u0, const IntegratorConfig& ic) {
  switch (sys.kind) {
    case SystemKind::scalar_ode:
    case SystemKind::cooperative_ode:
      return systems::integrate_ode(sys, u0, ic);
    case SystemKind::dde_single_delay:
      return systems::integrate_dde(sys, systems::constant_history(sys, u0, ic), ic);
    case SystemKind::parabolic_1d: {
      systems::GridFunction g;
      g.species = sys.dim;
      g.points = ic.space_points;
      g.length = sys.rhs.length;
      g.values = u0;
      return systems::integrate_parabolic(sys, g, ic).signal;
    }
  }
  fail(ErrorCode::ConfigInvalid, "unsupported system kind");
}

json state_json(const State& u) {
  json a = json::array();
  for (double v : u) a.push_back(number(v));
  return a;
}

void write_rows(const fs::path& path, const std::string& header, const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::ConfigInvalid, "cannot write '" + path.string() + "'");
  out << header << '\n';
  char buf[32];
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", row[c]);
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
}

std::string state_header(const char* first, std::size_t n) {
  std::string h = first;
  for (std::size_t c = 0; c < n; ++c) h += ",x" + std::to_string(c + 1);
  return h;
}

class Run {
 public:
  Run(const ScenarioConfig& cfg, fs::path dir) : cfg_(cfg), dir_(std::move(dir)) {}

  void execute() {
    const auto& a = cfg_.analysis;
    u0_ = expand(cfg_, a.initial);
    quasimonotone();
    main_trajectory();
    if (!a.closed_form.empty()) closed_form();
    if (a.convergence.enabled) convergence();
    if (a.order.pairs > 0) order();
    if (a.limits.enabled) limits_stage();
    if (a.stability.enabled) stability();
    if (a.levitan.enabled) levitan();
  }

  json report;
  std::vector<CheckResult> checks;
  std::vector<std::string> files;

 private:
  void check(const std::string& name, bool passed, json values) {
    checks.push_back({name, passed, std::move(values)});
  }

  void emit(const std::string& name) { files.push_back(name); }

  void quasimonotone() {
    const std::vector<double> probes{0.0, 0.7, 1.9, 3.1, 4.4, 5.6};
    const auto v = systems::quasimonotone_check(cfg_.system, cfg_.system.box, probes,
                                                cfg_.analysis.quasimonotone_step);
    json values = {{"samples", v.samples}};
    if (v.witness) {
      const auto& w = *v.witness;
      values["witness"] = {{"t", number(w.t)}, {"u", state_json(w.u)}, {"i", w.i}, {"j", w.j},
                           {"delayed", w.delayed}, {"partial", number(w.partial)}};
    }
    check("quasimonotone", v.pass, values);
  }

  void main_trajectory() {
    traj_.emplace(trajectory(cfg_.system, u0_, cfg_.integrator));
    signals::write_csv_file((dir_ / "trajectory.csv").string(), *traj_);
    emit("trajectory.csv");
    report["trajectory"] = {{"t0", number(traj_->t0())}, {"t_end", number(traj_->t_end())},
                            {"samples", traj_->size()}, {"columns", traj_->dim()},
                            {"initial", state_json(cfg_.analysis.initial)}};
  }

  // x' = a x + c + sum A sin(w t + p): particular solution plus the
  // transient (x0 - x_p(0)) e^{a t}.
  void closed_form() {
    const auto& sys = cfg_.system;
    const double a = sys.rhs.coupling(0, 0);
    const auto& f = sys.rhs.forcing;
    const double c = f.offsets.empty() ? 0.0 : f.offsets[0];
    const double shift = sys.base_shift;
    auto particular = [&](double t) {
      double x = -c / a;
      for (const auto& term : f.terms) {
        const double th = term.omega * (t + shift) + term.phase;
        const double den = term.omega * term.omega + a * a;
        x += -term.amplitude * (a * std::sin(th) + term.omega * std::cos(th)) / den;
      }
      return x;
    };
    const double x0 = cfg_.analysis.initial[0];
    double err = 0.0;
    const double horizon = cfg_.analysis.closed_form_horizon;
    for (std::size_t i = 0; i < traj_->size() && traj_->time(i) <= horizon + 1e-9; ++i) {
      const double t = traj_->time(i);
      const double exact = particular(t) + (x0 - particular(0.0)) * std::exp(a * t);
      err = std::max(err, std::abs(traj_->at(i, 0) - exact));
    }
    const double tol = cfg_.analysis.closed_form_tol;
    check("closed_form", err <= tol, {{"sup_error", number(err)}, {"tolerance", number(tol)},
                                      {"horizon", number(horizon)}});
  }

  void convergence() {
    const auto& cv = cfg_.analysis.convergence;
    State shifted = cfg_.analysis.initial;
    for (double& v : shifted) v += cv.offset;
    const Signal other = trajectory(cfg_.system, expand(cfg_, shifted), cfg_.integrator);
    const auto r = limits::convergence_check(*traj_, other, cv.threshold, cv.splits, cv.window);
    std::vector<std::vector<double>> rows;
    json splits = json::array();
    for (const auto& [T, d] : r.splits) {
      rows.push_back({T, d});
      splits.push_back({{"T", number(T)}, {"sup_dist", number(d)}});
    }
    write_rows(dir_ / "convergence.csv", "T,sup_dist", rows);
    emit("convergence.csv");
    check("convergence", r.passed, {{"threshold", number(r.threshold)}, {"trend", limits::to_string(r.trend)},
                                    {"window", number(r.window)}, {"splits", splits}});
    if (cv.separation_bound > 0.0) {
      const double d = signals::sup_distance(*traj_, other, Window::from_range(cv.separation_lo, cv.separation_hi));
      check("separation_bound", d <= cv.separation_bound,
            {{"lo", number(cv.separation_lo)}, {"hi", number(cv.separation_hi)},
             {"sup_dist", number(d)}, {"bound", number(cv.separation_bound)}, {"offset", number(cv.offset)}});
    }
  }

  void order() {
    const auto& oc = cfg_.analysis.order;
    const auto& box = cfg_.system.box;
    const std::size_t n = full_size(cfg_);
    std::mt19937_64 rng(cfg_.seeds);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::pair<State, State>> starts;
    for (std::size_t p = 0; p < oc.pairs; ++p) {
      State u(n), v(n);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t s = species_of(cfg_, i);
        const double lo = box.empty() ? -1.0 : box.lo[s];
        const double hi = box.empty() ? 1.0 : box.hi[s];
        u[i] = lo + (hi - lo) * unit(rng);
        v[i] = u[i] + (hi - u[i]) * unit(rng);
      }
      starts.emplace_back(std::move(u), std::move(v));
    }
    IntegratorConfig ic = cfg_.integrator;
    ic.t_end = oc.horizon;
    std::vector<systems::OrderVerdict> verdicts(oc.pairs);
    std::vector<double> tolerances(oc.pairs);
    parallel_for(
        oc.pairs,
        [&](std::size_t p) {
          const Signal a = trajectory(cfg_.system, starts[p].first, ic);
          const Signal b = trajectory(cfg_.system, starts[p].second, ic);
          tolerances[p] = 1e-9 + oc.slack * std::max(a.sup_norm(), b.sup_norm());
          verdicts[p] = systems::order_check(a, b, tolerances[p]);
        },
        1);
    std::size_t violations = 0;
    json witness = nullptr;
    for (std::size_t p = 0; p < oc.pairs; ++p) {
      if (verdicts[p].ordered) continue;
      if (violations++ == 0)
        witness = {{"pair", p}, {"t", number(verdicts[p].t)}, {"component", verdicts[p].component},
                   {"excess", number(verdicts[p].excess)}, {"tolerance", number(tolerances[p])}};
    }
    check("order_preserved", violations == 0,
          {{"pairs", oc.pairs}, {"horizon", number(oc.horizon)}, {"slack", number(oc.slack)},
           {"seed", cfg_.seeds}, {"violations", violations}, {"witness", witness}});
  }

  void limits_stage() {
    const auto& l = cfg_.analysis.limits;
    const auto& sys = cfg_.system;
    const auto& rc = l.returns;
    const Signal forcing = sys.rhs.forcing.sample(sys.dim, sys.base_shift, rc.window.lo(),
                                                  rc.horizon + rc.window.hi() + 2.0 * rc.sample_dt, rc.sample_dt);
    recurrence::ReturnSearch search;
    search.separation = rc.separation;
    search.t_max = rc.horizon;
    const auto schedule = recurrence::geometric_schedule(rc.epsilon0, rc.ratio, rc.count);
    const auto seq = recurrence::poisson_returns(forcing, schedule, rc.window, search);
    json out;
    out["returns"] = recurrence::returns_tree(seq);
    out["returns"]["window"] = recurrence::window_tree(rc.window);

    std::size_t retained = 0;
    for (double t : seq.times)
      if (t > l.settle_time) ++retained;
    check("returns_found", retained >= l.tail + 1,
          {{"found", seq.size()}, {"retained", retained}, {"needed", l.tail + 1},
           {"settle_time", number(l.settle_time)}});
    if (retained < l.tail + 1) {
      report["limits"] = out;
      return;
    }

    const auto om = limits::omega_fiber_sample(sys, u0_, seq, l.settle_time, l.integrator);
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < om.times.size(); ++k) {
      std::vector<double> row{om.times[k]};
      row.insert(row.end(), om.snapshots[k].begin(), om.snapshots[k].end());
      rows.push_back(std::move(row));
    }
    write_rows(dir_ / "omega_sample.csv", state_header("t_n", full_size(cfg_)), rows);
    emit("omega_sample.csv");
    const auto ext = limits::fiber_extrema(om, l.sandwich_tol);
    out["omega"] = {{"times", om.times.size()}, {"diameter", number(limits::omega_diameter(om))},
                    {"alpha", state_json(ext.alpha)}, {"beta", state_json(ext.beta)},
                    {"alpha_in_sample", ext.alpha_in_sample}, {"beta_in_sample", ext.beta_in_sample}};

    limits::GammaConfig gc;
    gc.integrator = l.integrator;
    gc.settle_time = l.settle_time;
    gc.tol = l.gamma_tol;
    gc.noise_floor = l.noise_floor;
    gc.tail = l.tail;
    gc.require_cauchy = false;
    const auto low = limits::gamma_extract(sys, ext.alpha, seq, gc);
    const auto high = limits::gamma_extract(sys, ext.beta, seq, gc);
    auto gamma_json = [](const limits::GammaResult& g) {
      json tail = json::array();
      for (double d : g.cauchy_tail) tail.push_back(number(d));
      return json{{"value", state_json(g.gamma)}, {"cauchy", g.cauchy}, {"gaps", tail},
                  {"final_gap", number(g.cauchy_tail.back())}};
    };
    out["gamma"] = gamma_json(low);
    out["delta"] = gamma_json(high);
    check("gamma_cauchy", low.cauchy, {{"final_gap", number(low.cauchy_tail.back())}, {"tol", number(l.gamma_tol)}});
    check("delta_cauchy", high.cauchy, {{"final_gap", number(high.cauchy_tail.back())}, {"tol", number(l.gamma_tol)}});
    double agree = 0.0;
    for (std::size_t c = 0; c < low.gamma.size(); ++c) agree = std::max(agree, std::abs(low.gamma[c] - high.gamma[c]));
    check("gamma_delta_agree", agree <= l.agreement_tol, {{"sup_dist", number(agree)}, {"tol", number(l.agreement_tol)}});

    const auto sw = limits::sandwich_check(om, ext, low, high, l.sandwich_tol);
    check("sandwich", sw.holds,
          {{"tolerance", number(sw.tolerance)}, {"lower_excess", number(sw.lower_excess)},
           {"upper_excess", number(sw.upper_excess)}, {"gamma_minus_alpha", number(sw.gamma_minus_alpha)},
           {"beta_minus_delta", number(sw.beta_minus_delta)}});

    // Restarts from the first and the last retained snapshot.
    const double inv_first = limits::omega_invariance(sys, om, 0, l.integrator);
    const double inv_last = limits::omega_invariance(sys, om, om.snapshots.size() - 1, l.integrator);
    const double diameter = limits::omega_diameter(om);
    out["invariance"] = {{"hausdorff_first", number(inv_first)}, {"hausdorff_last", number(inv_last)},
                         {"diameter", number(diameter)}};
    check("omega_invariance", std::max(inv_first, inv_last) <= l.invariance_tol,
          {{"hausdorff", number(std::max(inv_first, inv_last))}, {"tol", number(l.invariance_tol)}});

    const auto entire = limits::entire_trajectory_estimate(sys, u0_, seq, l.entire_half_width, l.integrator);
    const auto rep = recurrence::classify(entire.gamma_signal, nullptr, l.entire_classify);
    out["entire"] = {{"t_last", number(entire.t_last)}, {"t_prev", number(entire.t_prev)},
                     {"agreement", number(entire.agreement)}, {"half_width", number(l.entire_half_width)},
                     {"report", recurrence::report_tree(rep)}};
    bool class_ok = l.expected_class.empty() || rep.primary_class() == l.expected_class;
    json freqs = json::array();
    for (double w : rep.quasi_periodic.fit.freqs) freqs.push_back(number(w));
    if (!l.expected_freqs.empty()) {
      const auto& got = rep.quasi_periodic.fit.freqs;
      for (double want : l.expected_freqs) {
        bool hit = false;
        for (double w : got) hit = hit || std::abs(w - want) <= l.freq_tol;
        class_ok = class_ok && hit;
      }
    }
    check("entire_class", class_ok,
          {{"primary_class", rep.primary_class()}, {"expected", l.expected_class}, {"freqs", freqs}});
    report["limits"] = out;
  }

  void stability() {
    const auto& st = cfg_.analysis.stability;
    limits::StabilityConfig sc;
    sc.integrator = cfg_.integrator;
    sc.probes = st.probes;
    sc.horizon = st.horizon;
    sc.seed = cfg_.seeds;
    const auto rows = limits::uniform_stability_estimate(cfg_.system, u0_, st.epsilons, sc);
    json table = json::array();
    bool positive = true;
    for (const auto& r : rows) {
      table.push_back({{"epsilon", number(r.epsilon)}, {"delta_hat", number(r.delta_hat)}});
      positive = positive && r.delta_hat > 0.0;
    }
    check("uniform_stability", positive, {{"table", table}, {"probes", st.probes}, {"horizon", number(st.horizon)}});

    const auto cv = limits::contraction_check(cfg_.system, st.contraction_pairs, st.horizon, cfg_.integrator, cfg_.seeds);
    json values = {{"pairs", cv.pairs}, {"horizon", number(st.horizon)}};
    if (cv.witness)
      values["witness"] = {{"u", state_json(cv.witness->first)}, {"v", state_json(cv.witness->second)},
                           {"t", number(cv.t)}, {"previous", number(cv.previous)},
                           {"current", number(cv.current)}};
    check("contraction", cv.contracting, values);
  }

  void levitan() {
    const auto& lv = cfg_.analysis.levitan;
    const auto& cc = lv.classify;
    const double t0 = cc.window.lo() + cc.grid.min - 1.0;
    const double t1 = cc.window.hi() + cc.grid.max + 1.0;
    const double dt = lv.sample_dt;
    auto h = [](double t) { return systems::levitan_h(t); };
    const Signal hs = Signal::sample_scalar(h, t0, t1, dt);
    const Signal phi = Signal::sample_scalar([&](double t) { return 1.0 / h(t); }, t0, t1, dt);
    const Signal psi = Signal::sample_scalar([&](double t) { return std::sin(1.0 / h(t)); }, t0, t1, dt);

    const auto h_rep = recurrence::classify(hs, nullptr, cc);
    const auto psi_rep = recurrence::classify(psi, &hs, cc);
    const auto phi_prof = recurrence::comparability_profile(psi, phi, cc.compare_epsilons, cc.grid, cc.window);
    report["levitan"] = {{"h", recurrence::report_tree(h_rep)},
                         {"psi", recurrence::report_tree(psi_rep)},
                         {"psi_vs_phi", recurrence::profile_tree(phi_prof)}};

    check("levitan_h_bohr", h_rep.bohr.verdict == Tri::yes, {{"verdict", to_string(h_rep.bohr.verdict)}});
    bool saturated = false;
    for (const auto& row : psi_rep.bohr.table)
      if (std::abs(row.epsilon - lv.saturated_epsilon) <= 1e-12 * lv.saturated_epsilon) saturated = row.saturated;
    check("levitan_psi_bohr_saturated", saturated, {{"epsilon", number(lv.saturated_epsilon)}});
    const bool comparable = psi_rep.comparability &&
                            psi_rep.comparability->profile.verdict == recurrence::ProfileVerdict::comparable_evidence;
    check("levitan_psi_comparable_h", comparable,
          {{"verdict", psi_rep.comparability ? to_string(psi_rep.comparability->profile.verdict) : "none"}});
    bool lipschitz = !phi_prof.pairs.empty();
    json rows = json::array();
    for (const auto& r : phi_prof.pairs) {
      lipschitz = lipschitz && r.delta_hat >= r.epsilon * (1.0 - lv.lipschitz_slack);
      rows.push_back({{"epsilon", number(r.epsilon)}, {"delta_hat", number(r.delta_hat)}});
    }
    check("levitan_psi_phi_lipschitz", lipschitz, {{"pairs", rows}, {"slack", number(lv.lipschitz_slack)}});
  }

  const ScenarioConfig& cfg_;
  fs::path dir_;
  State u0_;
  std::optional<Signal> traj_;
};

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::ConfigInvalid, "cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

json checks_json(const std::vector<CheckResult>& checks, bool with_values) {
  json a = json::array();
  for (const auto& c : checks) {
    json e = {{"name", c.name}, {"passed", c.passed}};
    if (with_values) e["values"] = c.values;
    a.push_back(std::move(e));
  }
  return a;
}

ClassifyConfig fitted_to(double lo, double hi, double dt) {
  const double len = hi - lo;
  if (!(len > 8.0 * dt))
    fail(ErrorCode::DomainMismatch, "signal domain too short for a window and shifts");
  ClassifyConfig c;
  const double half = 0.5 * (len - 4.0 * dt);
  c.window = Window::from_range(lo + dt, lo + dt + half);
  const double span = std::floor(half / dt) * dt;
  const double step = std::max(dt, std::ceil(span / 5000.0 / dt) * dt);
  c.grid = {0.0, std::floor(span / step) * step, step};
  return c;
}

}  // namespace

bool RunManifest::passed() const {
  if (error) return false;
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

RunManifest run_scenario(const ScenarioConfig& cfg, const std::string& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::ConfigInvalid, "cannot create output directory '" + out_dir + "'");

  RunManifest m;
  m.config = to_json(cfg);
  m.tool_version = kToolVersion;
  Run run(cfg, dir);
  try {
    run.execute();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigInvalid) throw;
    m.error = e.what();
  }
  m.checks = run.checks;
  m.files = run.files;

  json report = run.report;
  report["scenario"] = cfg.name;
  report["system_kind"] = systems::to_string(cfg.system.kind);
  report["checks"] = checks_json(m.checks, true);
  report["error"] = m.error ? json(*m.error) : json(nullptr);
  write_json(dir / "report.json", report);
  m.files.push_back("report.json");
  m.files.push_back("manifest.json");

  m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json man = {{"config", m.config},
              {"tool_version", m.tool_version},
              {"wall_clock_seconds", m.wall_clock_seconds},
              {"files", m.files},
              {"checks", checks_json(m.checks, false)},
              {"passed", m.passed()},
              {"error", m.error ? json(*m.error) : json(nullptr)}};
  write_json(dir / "manifest.json", man);
  return m;
}

ClassifyConfig fitted_classify(double lo, double hi, double dt) { return fitted_to(lo, hi, dt); }

json classify_file(const std::string& path, const json& overlay) {
  const Signal f = signals::read_csv_file(path);
  const auto cfg = parse_classify(overlay, fitted_to(f.t0(), f.t_end(), f.dt()));
  const auto rep = recurrence::classify(f, nullptr, cfg);
  json out = recurrence::report_tree(rep);
  out["source"] = path;
  return out;
}

json compare_files(const std::string& traj_path, const std::string& base_path, const json& overlay) {
  const Signal x = signals::read_csv_file(traj_path);
  const Signal y = signals::read_csv_file(base_path);
  const double lo = std::max(x.t0(), y.t0());
  const double hi = std::min(x.t_end(), y.t_end());
  if (!(hi > lo)) fail(ErrorCode::DomainMismatch, "the two signals have disjoint domains");
  const auto cfg = parse_classify(overlay, fitted_to(lo, hi, std::max(x.dt(), y.dt())));
  const double tol = 1e-9 * std::max(x.dt(), y.dt());
  if (cfg.window.lo() + cfg.grid.min < lo - tol || cfg.window.hi() + cfg.grid.max > hi + tol)
    fail(ErrorCode::DomainMismatch, "window and shifts do not fit the common domain of both signals");
  const auto prof = recurrence::comparability_profile(x, y, cfg.compare_epsilons, cfg.grid, cfg.window);
  json out = recurrence::profile_tree(prof);
  out["traj"] = traj_path;
  out["base"] = base_path;
  return out;
}

}  // namespace plab::cli
