#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "plab/cli.hpp"
#include "plab/error.hpp"

namespace plab::cli {
namespace {

using recurrence::FitOptions;
using recurrence::ReturnSearch;
using recurrence::TauGrid;
using systems::Forcing;
using systems::ForcingKind;
using systems::Matrix;
using systems::RhsSpec;
using systems::StateBox;
using systems::TrigTerm;

[[noreturn]] void bad(const std::string& why) { fail(ErrorCode::ConfigInvalid, why); }

// Reads the keys of one object into fields, remembering which keys were
// consumed so that leftovers (typos) are reported.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) bad(path_ + " must be an object");
  }
  Reader(const Reader&) = delete;
  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) bad("unknown key " + path_ + "." + it.key());
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      bad(path_ + "." + key + ": " + e.what());
    }
  }

  template <class Fn>
  void sub(const char* key, Fn&& fn) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    fn(*it, path_ + "." + key);
  }

  bool has(const char* key) const { return j_.contains(key); }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json window_json(const Window& w) { return {{"center", w.center}, {"half_width", w.half_width}}; }

void read_window(const json& j, const std::string& path, Window& w) {
  Reader r(j, path);
  double c = w.center, h = w.half_width;
  r.get("center", c);
  r.get("half_width", h);
  if (!(h > 0.0) || !std::isfinite(c)) bad(path + ": half_width must be positive");
  w = Window(c, h);
}

json grid_json(const TauGrid& g) { return {{"min", g.min}, {"max", g.max}, {"step", g.step}}; }

void read_grid(const json& j, const std::string& path, TauGrid& g) {
  Reader r(j, path);
  r.get("min", g.min);
  r.get("max", g.max);
  r.get("step", g.step);
}

json matrix_json(const Matrix& m) {
  return {{"rows", m.rows}, {"cols", m.cols}, {"values", m.values}};
}

void read_matrix(const json& j, const std::string& path, Matrix& m) {
  Reader r(j, path);
  r.get("rows", m.rows);
  r.get("cols", m.cols);
  r.get("values", m.values);
  if (m.values.size() != m.rows * m.cols) bad(path + ": values must hold rows * cols entries");
}

std::string forcing_name(ForcingKind k) {
  switch (k) {
    case ForcingKind::trig: return "trig";
    case ForcingKind::levitan_h: return "levitan_h";
    case ForcingKind::levitan_phi: return "levitan_phi";
    case ForcingKind::levitan_psi: return "levitan_psi";
  }
  return "trig";
}

ForcingKind forcing_kind(const std::string& s) {
  for (auto k : {ForcingKind::trig, ForcingKind::levitan_h, ForcingKind::levitan_phi, ForcingKind::levitan_psi})
    if (forcing_name(k) == s) return k;
  bad("unknown forcing kind '" + s + "'");
}

json forcing_json(const Forcing& f) {
  json terms = json::array();
  for (const auto& t : f.terms)
    terms.push_back({{"component", t.component}, {"amplitude", t.amplitude}, {"omega", t.omega}, {"phase", t.phase}});
  return {{"kind", forcing_name(f.kind)}, {"offsets", f.offsets}, {"terms", terms},
          {"scale", f.scale}, {"component", f.component}};
}

void read_forcing(const json& j, const std::string& path, Forcing& f) {
  Reader r(j, path);
  std::string kind = forcing_name(f.kind);
  r.get("kind", kind);
  f.kind = forcing_kind(kind);
  r.get("offsets", f.offsets);
  r.sub("terms", [&](const json& a, const std::string& p) {
    if (!a.is_array()) bad(p + " must be an array");
    f.terms.clear();
    for (std::size_t i = 0; i < a.size(); ++i) {
      TrigTerm t;
      Reader tr(a[i], p + "[" + std::to_string(i) + "]");
      tr.get("component", t.component);
      tr.get("amplitude", t.amplitude);
      tr.get("omega", t.omega);
      tr.get("phase", t.phase);
      f.terms.push_back(t);
    }
  });
  r.get("scale", f.scale);
  r.get("component", f.component);
}

json rhs_json(const RhsSpec& s) {
  return {{"key", s.key},
          {"coupling", matrix_json(s.coupling)},
          {"delayed", matrix_json(s.delayed)},
          {"forcing", forcing_json(s.forcing)},
          {"delay", s.delay},
          {"diffusivity", s.diffusivity},
          {"length", s.length},
          {"neumann", s.neumann},
          {"profile_const", s.profile_const},
          {"profile_cos", s.profile_cos}};
}

void read_rhs(const json& j, const std::string& path, RhsSpec& s) {
  Reader r(j, path);
  r.get("key", s.key);
  r.sub("coupling", [&](const json& m, const std::string& p) { read_matrix(m, p, s.coupling); });
  r.sub("delayed", [&](const json& m, const std::string& p) { read_matrix(m, p, s.delayed); });
  r.sub("forcing", [&](const json& m, const std::string& p) { read_forcing(m, p, s.forcing); });
  r.get("delay", s.delay);
  r.get("diffusivity", s.diffusivity);
  r.get("length", s.length);
  r.get("neumann", s.neumann);
  r.get("profile_const", s.profile_const);
  r.get("profile_cos", s.profile_cos);
}

json system_json(const SystemSpec& s) {
  return {{"kind", systems::to_string(s.kind)},
          {"dim", s.dim},
          {"rhs", rhs_json(s.rhs)},
          {"base_shift", s.base_shift},
          {"box", {{"lo", s.box.lo}, {"hi", s.box.hi}}}};
}

void read_system(const json& j, const std::string& path, SystemSpec& s) {
  Reader r(j, path);
  std::string kind = systems::to_string(s.kind);
  r.get("kind", kind);
  try {
    s.kind = systems::system_kind_from_string(kind);
  } catch (const Error& e) {
    bad(path + ".kind: " + e.what());
  }
  r.get("dim", s.dim);
  r.sub("rhs", [&](const json& m, const std::string& p) { read_rhs(m, p, s.rhs); });
  r.get("base_shift", s.base_shift);
  r.sub("box", [&](const json& m, const std::string& p) {
    Reader br(m, p);
    br.get("lo", s.box.lo);
    br.get("hi", s.box.hi);
  });
}

json integrator_json(const IntegratorConfig& c) {
  return {{"method", systems::to_string(c.method)},
          {"dt", c.dt},
          {"rel_tol", c.rel_tol},
          {"abs_tol", c.abs_tol},
          {"t_end", c.t_end},
          {"record_dt", c.record_dt},
          {"space_points", c.space_points},
          {"blowup_bound", c.blowup_bound},
          {"max_steps", c.max_steps}};
}

void read_integrator(const json& j, const std::string& path, IntegratorConfig& c) {
  Reader r(j, path);
  std::string method = systems::to_string(c.method);
  r.get("method", method);
  try {
    c.method = systems::method_from_string(method);
  } catch (const Error& e) {
    bad(path + ".method: " + e.what());
  }
  r.get("dt", c.dt);
  r.get("rel_tol", c.rel_tol);
  r.get("abs_tol", c.abs_tol);
  r.get("t_end", c.t_end);
  r.get("record_dt", c.record_dt);
  r.get("space_points", c.space_points);
  r.get("blowup_bound", c.blowup_bound);
  r.get("max_steps", c.max_steps);
}

void read_classify(const json& j, const std::string& path, ClassifyConfig& c) {
  Reader r(j, path);
  r.sub("window", [&](const json& m, const std::string& p) { read_window(m, p, c.window); });
  r.sub("grid", [&](const json& m, const std::string& p) { read_grid(m, p, c.grid); });
  r.get("bohr_epsilons", c.bohr_epsilons);
  r.get("compare_epsilons", c.compare_epsilons);
  r.get("return_schedule", c.return_schedule);
  r.sub("returns", [&](const json& m, const std::string& p) {
    Reader rr(m, p);
    rr.get("separation", c.returns.separation);
    rr.get("scan_step", c.returns.scan_step);
    rr.get("t_max", c.returns.t_max);
  });
  r.get("stationary_tol", c.stationary_tol);
  r.get("candidate_level", c.candidate_level);
  r.get("periodic_tol", c.periodic_tol);
  r.get("max_freqs", c.max_freqs);
  r.sub("fit", [&](const json& m, const std::string& p) {
    Reader fr(m, p);
    fr.get("threshold", c.fit.threshold);
    fr.get("ratio_tol", c.fit.ratio_tol);
    fr.get("cf_depth", c.fit.cf_depth);
    fr.get("cf_max_denominator", c.fit.cf_max_denominator);
  });
  r.get("min_returns", c.min_returns);
  r.get("extra_centers", c.extra_centers);
}

json returns_json(const ReturnsConfig& c) {
  return {{"window", window_json(c.window)}, {"epsilon0", c.epsilon0}, {"ratio", c.ratio},
          {"count", c.count}, {"separation", c.separation}, {"sample_dt", c.sample_dt},
          {"horizon", c.horizon}};
}

void read_returns(const json& j, const std::string& path, ReturnsConfig& c) {
  Reader r(j, path);
  r.sub("window", [&](const json& m, const std::string& p) { read_window(m, p, c.window); });
  r.get("epsilon0", c.epsilon0);
  r.get("ratio", c.ratio);
  r.get("count", c.count);
  r.get("separation", c.separation);
  r.get("sample_dt", c.sample_dt);
  r.get("horizon", c.horizon);
}

json analysis_json(const AnalysisConfig& a) {
  const auto& cv = a.convergence;
  const auto& lm = a.limits;
  const auto& st = a.stability;
  const auto& lv = a.levitan;
  return {
      {"initial", a.initial},
      {"closed_form", a.closed_form},
      {"closed_form_tol", a.closed_form_tol},
      {"closed_form_horizon", a.closed_form_horizon},
      {"quasimonotone_step", a.quasimonotone_step},
      {"convergence",
       {{"enabled", cv.enabled}, {"offset", cv.offset}, {"threshold", cv.threshold},
        {"splits", cv.splits}, {"window", cv.window}, {"separation_lo", cv.separation_lo},
        {"separation_hi", cv.separation_hi}, {"separation_bound", cv.separation_bound}}},
      {"order", {{"pairs", a.order.pairs}, {"horizon", a.order.horizon}, {"slack", a.order.slack}}},
      {"limits",
       {{"enabled", lm.enabled}, {"integrator", integrator_json(lm.integrator)},
        {"returns", returns_json(lm.returns)}, {"settle_time", lm.settle_time},
        {"gamma_tol", lm.gamma_tol}, {"noise_floor", lm.noise_floor}, {"tail", lm.tail}, {"agreement_tol", lm.agreement_tol},
        {"sandwich_tol", lm.sandwich_tol}, {"invariance_tol", lm.invariance_tol},
        {"entire_half_width", lm.entire_half_width},
        {"entire_classify", to_json(lm.entire_classify)}, {"expected_class", lm.expected_class}, {"expected_freqs", lm.expected_freqs},
        {"freq_tol", lm.freq_tol}}},
      {"stability",
       {{"enabled", st.enabled}, {"epsilons", st.epsilons}, {"probes", st.probes},
        {"horizon", st.horizon}, {"contraction_pairs", st.contraction_pairs}}},
      {"levitan",
       {{"enabled", lv.enabled}, {"sample_dt", lv.sample_dt}, {"classify", to_json(lv.classify)},
        {"saturated_epsilon", lv.saturated_epsilon}, {"lipschitz_slack", lv.lipschitz_slack}}},
  };
}

void read_analysis(const json& j, const std::string& path, AnalysisConfig& a) {
  Reader r(j, path);
  r.get("initial", a.initial);
  r.get("closed_form", a.closed_form);
  r.get("closed_form_tol", a.closed_form_tol);
  r.get("closed_form_horizon", a.closed_form_horizon);
  r.get("quasimonotone_step", a.quasimonotone_step);
  r.sub("convergence", [&](const json& m, const std::string& p) {
    auto& c = a.convergence;
    Reader cr(m, p);
    cr.get("enabled", c.enabled);
    cr.get("offset", c.offset);
    cr.get("threshold", c.threshold);
    cr.get("splits", c.splits);
    cr.get("window", c.window);
    cr.get("separation_lo", c.separation_lo);
    cr.get("separation_hi", c.separation_hi);
    cr.get("separation_bound", c.separation_bound);
  });
  r.sub("order", [&](const json& m, const std::string& p) {
    Reader orr(m, p);
    orr.get("pairs", a.order.pairs);
    orr.get("horizon", a.order.horizon);
    orr.get("slack", a.order.slack);
  });
  r.sub("limits", [&](const json& m, const std::string& p) {
    auto& l = a.limits;
    Reader lr(m, p);
    lr.get("enabled", l.enabled);
    lr.sub("integrator", [&](const json& x, const std::string& q) { read_integrator(x, q, l.integrator); });
    lr.sub("returns", [&](const json& x, const std::string& q) { read_returns(x, q, l.returns); });
    lr.get("settle_time", l.settle_time);
    lr.get("gamma_tol", l.gamma_tol);
    lr.get("noise_floor", l.noise_floor);
    lr.get("tail", l.tail);
    lr.get("agreement_tol", l.agreement_tol);
    lr.get("sandwich_tol", l.sandwich_tol);
    lr.get("invariance_tol", l.invariance_tol);
    lr.get("entire_half_width", l.entire_half_width);
    lr.sub("entire_classify", [&](const json& x, const std::string& q) { read_classify(x, q, l.entire_classify); });
    lr.get("expected_class", l.expected_class);
    lr.get("expected_freqs", l.expected_freqs);
    lr.get("freq_tol", l.freq_tol);
  });
  r.sub("stability", [&](const json& m, const std::string& p) {
    auto& s = a.stability;
    Reader sr(m, p);
    sr.get("enabled", s.enabled);
    sr.get("epsilons", s.epsilons);
    sr.get("probes", s.probes);
    sr.get("horizon", s.horizon);
    sr.get("contraction_pairs", s.contraction_pairs);
  });
  r.sub("levitan", [&](const json& m, const std::string& p) {
    auto& l = a.levitan;
    Reader lr(m, p);
    lr.get("enabled", l.enabled);
    lr.get("sample_dt", l.sample_dt);
    lr.sub("classify", [&](const json& x, const std::string& q) { read_classify(x, q, l.classify); });
    lr.get("saturated_epsilon", l.saturated_epsilon);
    lr.get("lipschitz_slack", l.lipschitz_slack);
  });
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) bad(std::string(what) + " must be positive");
}

void validate_classify(const ClassifyConfig& c, const char* what) {
  try {
    c.grid.validate();
  } catch (const Error& e) {
    bad(std::string(what) + ".grid: " + e.what());
  }
  for (double e : c.bohr_epsilons) require_positive(e, "bohr epsilon");
  for (double e : c.compare_epsilons) require_positive(e, "compare epsilon");
  for (double e : c.return_schedule) require_positive(e, "return epsilon");
  require_positive(c.stationary_tol, "stationary_tol");
  require_positive(c.periodic_tol, "periodic_tol");
  require_positive(c.candidate_level, "candidate_level");
  require_positive(c.fit.threshold, "fit.threshold");
  require_positive(c.fit.ratio_tol, "fit.ratio_tol");
}

}  // namespace

json to_json(const ClassifyConfig& c) {
  return {{"window", window_json(c.window)},
          {"grid", grid_json(c.grid)},
          {"bohr_epsilons", c.bohr_epsilons},
          {"compare_epsilons", c.compare_epsilons},
          {"return_schedule", c.return_schedule},
          {"returns",
           {{"separation", c.returns.separation}, {"scan_step", c.returns.scan_step}, {"t_max", c.returns.t_max}}},
          {"stationary_tol", c.stationary_tol},
          {"candidate_level", c.candidate_level},
          {"periodic_tol", c.periodic_tol},
          {"max_freqs", c.max_freqs},
          {"fit",
           {{"threshold", c.fit.threshold}, {"ratio_tol", c.fit.ratio_tol}, {"cf_depth", c.fit.cf_depth},
            {"cf_max_denominator", c.fit.cf_max_denominator}}},
          {"min_returns", c.min_returns},
          {"extra_centers", c.extra_centers}};
}

ClassifyConfig parse_classify(const json& doc, ClassifyConfig base) {
  ClassifyConfig c = std::move(base);
  read_classify(doc, "classify", c);
  validate_classify(c, "classify");
  return c;
}

json to_json(const ScenarioConfig& cfg) {
  return {{"name", cfg.name},
          {"system", system_json(cfg.system)},
          {"integrator", integrator_json(cfg.integrator)},
          {"analysis", analysis_json(cfg.analysis)},
          {"seeds", cfg.seeds},
          {"outputs", cfg.outputs}};
}

void ScenarioConfig::validate() const {
  if (name.empty()) bad("scenario name must be nonempty");
  system.validate();
  integrator.validate();
  const auto& a = analysis;
  if (a.initial.size() != system.dim) bad("analysis.initial must have one entry per species");
  if (!a.closed_form.empty()) {
    if (a.closed_form != "undetermined-coefficients")
      bad("unknown closed_form oracle '" + a.closed_form + "'");
    if (system.kind != systems::SystemKind::scalar_ode || system.rhs.key != "linear+trig")
      bad("the undetermined-coefficients oracle needs a scalar linear+trig system");
    if (system.rhs.coupling.empty() || !(system.rhs.coupling(0, 0) < 0.0))
      bad("the undetermined-coefficients oracle needs a negative coefficient");
  }
  require_positive(a.closed_form_tol, "closed_form_tol");
  require_positive(a.closed_form_horizon, "closed_form_horizon");
  require_positive(a.quasimonotone_step, "quasimonotone_step");
  if (a.convergence.enabled) {
    require_positive(a.convergence.threshold, "convergence.threshold");
    require_positive(a.convergence.window, "convergence.window");
    if (a.convergence.splits < 2) bad("convergence.splits must be at least 2");
    if (a.convergence.separation_bound < 0.0) bad("convergence.separation_bound must be nonnegative");
  }
  if (a.order.pairs > 0) {
    require_positive(a.order.horizon, "order.horizon");
    require_positive(a.order.slack, "order.slack");
  }
  if (a.limits.enabled) {
    const auto& l = a.limits;
    try {
      l.integrator.validate();
    } catch (const Error& e) {
      bad(std::string("analysis.limits.integrator: ") + e.what());
    }
    require_positive(l.returns.epsilon0, "limits.returns.epsilon0");
    if (!(l.returns.ratio > 0.0 && l.returns.ratio < 1.0)) bad("limits.returns.ratio must be in (0, 1)");
    if (l.returns.count == 0) bad("limits.returns.count must be positive");
    require_positive(l.returns.separation, "limits.returns.separation");
    require_positive(l.returns.sample_dt, "limits.returns.sample_dt");
    require_positive(l.returns.horizon, "limits.returns.horizon");
    require_positive(l.gamma_tol, "limits.gamma_tol");
    require_positive(l.noise_floor, "limits.noise_floor");
    require_positive(l.agreement_tol, "limits.agreement_tol");
    require_positive(l.sandwich_tol, "limits.sandwich_tol");
    require_positive(l.invariance_tol, "limits.invariance_tol");
    require_positive(l.entire_half_width, "limits.entire_half_width");
    if (l.tail == 0) bad("limits.tail must be positive");
    require_positive(l.freq_tol, "limits.freq_tol");
    validate_classify(l.entire_classify, "limits.entire_classify");
  }
  if (a.stability.enabled) {
    for (double e : a.stability.epsilons) require_positive(e, "stability epsilon");
    if (a.stability.probes < 8) bad("stability.probes must be at least 8");
    require_positive(a.stability.horizon, "stability.horizon");
    if (a.stability.contraction_pairs < 8) bad("stability.contraction_pairs must be at least 8");
  }
  if (a.levitan.enabled) {
    require_positive(a.levitan.sample_dt, "levitan.sample_dt");
    require_positive(a.levitan.saturated_epsilon, "levitan.saturated_epsilon");
    validate_classify(a.levitan.classify, "levitan.classify");
  }
}

ScenarioConfig parse_config(const json& doc) {
  if (!doc.is_object()) bad("configuration must be a JSON object");
  ScenarioConfig cfg;
  if (doc.contains("name") && doc["name"].is_string() && is_builtin(doc["name"].get<std::string>())) {
    cfg = builtin_scenario(doc["name"].get<std::string>());
  } else if (!doc.contains("system")) {
    bad("configuration names no built-in scenario and supplies no system");
  }
  Reader r(doc, "config");
  r.get("name", cfg.name);
  r.sub("system", [&](const json& m, const std::string& p) { read_system(m, p, cfg.system); });
  r.sub("integrator", [&](const json& m, const std::string& p) { read_integrator(m, p, cfg.integrator); });
  r.sub("analysis", [&](const json& m, const std::string& p) { read_analysis(m, p, cfg.analysis); });
  r.get("seeds", cfg.seeds);
  r.get("outputs", cfg.outputs);
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open configuration '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    bad("configuration '" + path + "': " + e.what());
  }
  return parse_config(doc);
}

}  // namespace plab::cli
