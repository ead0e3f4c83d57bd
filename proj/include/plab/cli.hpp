#pragma once

// Scenario configuration, the built-in catalog and the batch runner behind
// the poisson_lab command line tool.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "plab/limits.hpp"
#include "plab/recurrence.hpp"
#include "plab/systems.hpp"

namespace plab::cli {

using nlohmann::json;
using recurrence::ClassifyConfig;
using signals::Window;
using systems::IntegratorConfig;
using systems::State;
using systems::SystemSpec;

/// Poisson returns of the forcing, searched on its samples.
struct ReturnsConfig {
  Window window{0.0, 10.0};
  double epsilon0 = 0.5;
  double ratio = 0.45;
  std::size_t count = 13;
  double separation = 1.0;
  double sample_dt = 0.05;
  double horizon = 0.0;  // t_max of the search
};

struct OrderConfig {
  std::size_t pairs = 0;  // 0 disables the check
  double horizon = 50.0;
  double slack = 1e-6;    // tolerance 1e-9 + slack * trajectory scale
};

struct ConvergenceConfig {
  bool enabled = false;
  double offset = 1.0;  // second initial condition: initial + offset
  double threshold = 1e-3;
  std::size_t splits = 5;
  double window = 20.0;  // splits * window should cover the trajectory
  // Optional bound on the sup distance over [separation_lo, separation_hi].
  double separation_lo = 0.0;
  double separation_hi = 0.0;
  double separation_bound = 0.0;  // 0 disables
};

struct LimitsConfig {
  bool enabled = false;
  IntegratorConfig integrator;
  ReturnsConfig returns;
  double settle_time = 30.0;
  double gamma_tol = 1e-4;
  double noise_floor = 1e-9;     // snapshot gaps below this count as converged
  std::size_t tail = 5;
  double agreement_tol = 1e-3;   // |gamma - delta|
  double sandwich_tol = 1e-6;
  double invariance_tol = 1e-3;  // Hausdorff distance after a restart
  double entire_half_width = 100.0;
  ClassifyConfig entire_classify;
  std::string expected_class;    // primary class of the entire trajectory
  std::vector<double> expected_freqs;  // quasi-periodic fit of the entire trajectory
  double freq_tol = 1e-2;
};

struct StabilityStage {
  bool enabled = false;
  std::vector<double> epsilons{0.1, 0.01};
  std::size_t probes = 16;
  double horizon = 10.0;
  std::size_t contraction_pairs = 8;
};

/// Levitan example: h, phi = 1/h and psi = sin(1/h) sampled in closed form.
struct LevitanConfig {
  bool enabled = false;
  double sample_dt = 0.05;
  ClassifyConfig classify;
  double saturated_epsilon = 0.1;
  double lipschitz_slack = 1e-3;
};

struct AnalysisConfig {
  State initial{0.0};            // per species; parabolic kinds use a flat profile
  // "undetermined-coefficients" (scalar linear+trig only) or empty.
  std::string closed_form;
  double closed_form_tol = 1e-5;
  double closed_form_horizon = 100.0;
  double quasimonotone_step = 1e-6;
  ConvergenceConfig convergence;
  OrderConfig order;
  LimitsConfig limits;
  StabilityStage stability;
  LevitanConfig levitan;
};

struct ScenarioConfig {
  std::string name;
  SystemSpec system;
  IntegratorConfig integrator;
  AnalysisConfig analysis;
  std::uint64_t seeds = 1;
  std::string outputs;

  /// Throws ConfigInvalid.
  void validate() const;
};

std::vector<std::string> scenario_names();
bool is_builtin(const std::string& name);
/// Throws ConfigInvalid for unknown names.
ScenarioConfig builtin_scenario(const std::string& name);
std::string scenario_summary(const std::string& name);

json to_json(const ScenarioConfig& cfg);
/// Keys mirror the field names. When "name" is a built-in the document is
/// applied on top of that scenario; otherwise "system" is required. Unknown
/// keys are rejected with ConfigInvalid.
ScenarioConfig parse_config(const json& doc);
ScenarioConfig load_config(const std::string& path);

/// Reads the keys present in doc on top of base.
ClassifyConfig parse_classify(const json& doc, ClassifyConfig base = {});
json to_json(const ClassifyConfig& cfg);

struct CheckResult {
  std::string name;
  bool passed = false;
  json values;
};

struct RunManifest {
  json config;
  std::string tool_version;
  double wall_clock_seconds = 0.0;
  std::vector<std::string> files;
  std::vector<CheckResult> checks;
  std::optional<std::string> error;

  bool passed() const;
};

extern const char* const kToolVersion;

/// Integrates, runs the configured recurrence and limit checks and writes
/// trajectory.csv, omega_sample.csv, convergence.csv, report.json and
/// manifest.json (each only when produced) into out_dir.
RunManifest run_scenario(const ScenarioConfig& cfg, const std::string& out_dir);

/// Analysis settings fitted to a domain [lo, hi] sampled at dt: the window
/// covers the first half and the shifts span the second.
ClassifyConfig fitted_classify(double lo, double hi, double dt);

/// Report with the seven class verdicts; overlay keys (ClassifyConfig field
/// names) are applied on top of the fitted settings.
json classify_file(const std::string& path, const json& overlay = json::object());
/// Comparability of traj against base on their common domain; throws
/// DomainMismatch when it is too short.
json compare_files(const std::string& traj_path, const std::string& base_path,
                   const json& overlay = json::object());

}  // namespace plab::cli
