#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "plab/cli.hpp"
#include "plab/error.hpp"

namespace {

using plab::cli::json;

constexpr int kPass = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) plab::fail(plab::ErrorCode::ConfigInvalid, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    plab::fail(plab::ErrorCode::ConfigInvalid, "'" + path + "': " + e.what());
  }
}

void emit(const json& doc, const std::string& out_dir, const std::string& file) {
  if (out_dir.empty()) {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  std::filesystem::create_directories(out_dir);
  std::ofstream out(std::filesystem::path(out_dir) / file);
  out << doc.dump(2) << '\n';
  std::cout << (std::filesystem::path(out_dir) / file).string() << '\n';
}

std::string default_out(const std::string& flag, const std::string& configured, const std::string& name) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("POISSON_LAB_OUT"); env && *env)
    return (std::filesystem::path(env) / name).string();
  if (!configured.empty()) return configured;
  return (std::filesystem::path("out") / name).string();
}

int run_command(const std::string& target, const std::string& out_flag, std::optional<std::uint64_t> seed,
                std::optional<double> horizon) {
  plab::cli::ScenarioConfig cfg = plab::cli::is_builtin(target) ? plab::cli::builtin_scenario(target)
                                                                : plab::cli::load_config(target);
  if (seed) cfg.seeds = *seed;
  if (horizon) {
    cfg.integrator.t_end = *horizon;
    auto& cv = cfg.analysis.convergence;
    cv.window = *horizon / static_cast<double>(std::max<std::size_t>(cv.splits, 1));
  }
  cfg.validate();
  const std::string dir = default_out(out_flag, cfg.outputs, cfg.name);
  const auto m = plab::cli::run_scenario(cfg, dir);
  for (const auto& c : m.checks) std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << '\n';
  if (m.error) std::cout << "ERROR " << *m.error << '\n';
  std::cout << "output: " << dir << '\n';
  return m.passed() ? kPass : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for monotone nonautonomous systems and recurrence analysis"};
  app.require_subcommand(1);

  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> horizon;
  app.add_option("--out", out_dir, "Output directory (default: $POISSON_LAB_OUT/<name> or out/<name>)");
  app.add_option("--seed", seed, "Seed for randomized checks");
  app.add_option("--horizon", horizon, "Trajectory horizon t_end")->check(CLI::PositiveNumber);

  std::string target;
  auto* run = app.add_subcommand("run", "Run a built-in scenario or a configuration file");
  run->add_option("target", target, "Scenario name or configuration path")->required();
  run->fallthrough();

  std::string csv_path, config_path;
  auto* classify = app.add_subcommand("classify", "Classify the recurrence of a sampled signal (CSV)");
  classify->add_option("csv", csv_path, "Signal CSV (t,x1,...)")->required();
  classify->add_option("--config", config_path, "JSON with analysis overrides (window, grid, ...)");
  classify->fallthrough();

  std::string traj_path, base_path;
  auto* compare = app.add_subcommand("compare", "Comparability profile of a trajectory against a base");
  compare->add_option("traj", traj_path, "Trajectory CSV")->required();
  compare->add_option("base", base_path, "Base CSV")->required();
  compare->add_option("--config", config_path, "JSON with analysis overrides");
  compare->fallthrough();

  auto* list = app.add_subcommand("list", "List the built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*list) {
      for (const auto& name : plab::cli::scenario_names())
        std::cout << name << "  " << plab::cli::scenario_summary(name) << '\n';
      return kPass;
    }
    if (*run) return run_command(target, out_dir, seed, horizon);
    const json overlay = config_path.empty() ? json::object() : read_json_file(config_path);
    if (*classify) {
      emit(plab::cli::classify_file(csv_path, overlay), out_dir, "classify.json");
      return kPass;
    }
    if (*compare) {
      emit(plab::cli::compare_files(traj_path, base_path, overlay), out_dir, "compare.json");
      return kPass;
    }
  } catch (const plab::Error& e) {
    std::cerr << "poisson_lab: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "poisson_lab: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
