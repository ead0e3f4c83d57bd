#pragma once

// Omega-limit sampling at base return times, fiberwise extremal elements,
// extraction of the limit solutions gamma/delta, and finite-horizon
// stability, contraction and convergence estimates.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "plab/recurrence.hpp"
#include "plab/systems.hpp"

namespace plab::limits {

using recurrence::ReturnSequence;
using signals::Signal;
using systems::IntegratorConfig;
using systems::State;
using systems::SystemSpec;

/// States pi(t_k, u0) over the base point of sys. ODE kinds integrate u0
/// directly, parabolic kinds take the stacked grid state, and DDE kinds
/// start from the constant history u0 on [-r, 0].
std::vector<State> flow_at(const SystemSpec& sys, const State& u0, std::span<const double> times,
                           const IntegratorConfig& cfg);

/// Length of a state point for sys (dim, or dim * space_points).
std::size_t state_size(const SystemSpec& sys, const IntegratorConfig& cfg);

struct OmegaSample {
  ReturnSequence returns;
  double settle_time = 0.0;
  std::vector<double> times;      // retained t_n > settle_time
  std::vector<State> snapshots;   // x(t_n), same order
  std::string fiber_tag;
};

/// Snapshots traj(t_n) for t_n > settle_time; throws InsufficientReturns
/// when fewer than 3 are retained.
OmegaSample omega_fiber_sample(const Signal& traj, const ReturnSequence& returns, double settle_time,
                               std::string fiber_tag = {});
/// Same, integrating the system only up to the retained return times.
OmegaSample omega_fiber_sample(const SystemSpec& sys, const State& u0, const ReturnSequence& returns,
                               double settle_time, const IntegratorConfig& cfg);

/// Largest sup-norm distance between two snapshots.
double omega_diameter(const OmegaSample& s);

struct ExtremalPair {
  State alpha;
  State beta;
  bool alpha_in_sample = false;
  bool beta_in_sample = false;
};

/// Componentwise infimum and supremum of the snapshots; in_sample when some
/// snapshot matches within tol in the sup norm.
ExtremalPair fiber_extrema(const OmegaSample& s, double tol);

struct GammaConfig {
  IntegratorConfig integrator;
  double settle_time = 0.0;
  double tol = 1e-4;           // final gap must fall below this
  double noise_floor = 1e-9;   // gaps at or below this count as converged
  std::size_t tail = 5;        // gaps inspected for the Cauchy test
  bool require_cauchy = true;  // throw NotCauchy instead of returning
};

struct GammaResult {
  State gamma;
  std::vector<double> times;
  std::vector<State> snapshots;
  std::vector<double> cauchy_tail;  // |s_{n+1} - s_n| for consecutive snapshots
  bool cauchy = false;
};

/// Integrates from start, snapshots at the retained return times and takes
/// the final snapshot as gamma. Cauchy when each of the last `tail` gaps is
/// strictly below its predecessor or under the noise floor, and the final
/// gap is below tol.
GammaResult gamma_extract(const SystemSpec& sys, const State& start, const ReturnSequence& returns,
                          const GammaConfig& cfg);

struct SandwichCheck {
  bool holds = false;
  double tolerance = 0.0;
  double lower_excess = 0.0;  // max_n max_c pi(t_n, alpha) - x(t_n)
  double upper_excess = 0.0;  // max_n max_c x(t_n) - pi(t_n, beta)
  double gamma_minus_alpha = 0.0;  // unmatched comparison, reported only
  double beta_minus_delta = 0.0;
};

/// Fiber-matched order gamma <= alpha <= beta <= delta: at every retained
/// return the alpha-started and beta-started snapshots bracket the sampled
/// trajectory within tol.
SandwichCheck sandwich_check(const OmegaSample& x, const ExtremalPair& ext, const GammaResult& low,
                             const GammaResult& high, double tol);

/// Hausdorff distance between the snapshots and the states reached from
/// snapshot `index` at the same return times.
double omega_invariance(const SystemSpec& sys, const OmegaSample& s, std::size_t index,
                        const IntegratorConfig& cfg);

double hausdorff(const std::vector<State>& a, const std::vector<State>& b);

struct EntireTrajectory {
  Signal gamma_signal;     // traj(t + t_last) on [-W, W]
  double agreement = 0.0;  // sup distance to the reconstruction from t_prev
  double t_last = 0.0;
  double t_prev = 0.0;
};

/// Reconstructions gamma_n(t) = traj(t + t_n) from the last two return times
/// with t_n - W and t_n + W inside the trajectory's domain.
EntireTrajectory entire_trajectory_estimate(const Signal& traj, const ReturnSequence& returns,
                                            double half_width);
/// Same, integrating the system and recording only the two windows; the
/// windows are sampled at cfg.record_dt.
EntireTrajectory entire_trajectory_estimate(const SystemSpec& sys, const State& u0,
                                            const ReturnSequence& returns, double half_width,
                                            const IntegratorConfig& cfg);

struct StabilityConfig {
  IntegratorConfig integrator;
  std::size_t probes = 16;
  double horizon = 10.0;
  std::uint64_t seed = 1;
  int bisection_steps = 40;
};

struct StabilityRow {
  double epsilon = 0.0;
  double delta_hat = 0.0;
};

/// Largest delta in (0, eps] such that every probe on the sup-norm shell of
/// radius delta around the anchor stays within eps of the anchor's
/// trajectory on [0, horizon]. Probes: the two ordered directions (all +1,
/// all -1) plus seeded random sign/magnitude mixes. The result is made
/// nondecreasing in eps by a running maximum.
std::vector<StabilityRow> uniform_stability_estimate(const SystemSpec& sys, const State& anchor,
                                                     const std::vector<double>& epsilon_list,
                                                     const StabilityConfig& cfg);

struct ContractionVerdict {
  bool contracting = false;
  std::size_t pairs = 0;
  std::optional<std::pair<State, State>> witness;
  double t = 0.0;          // first sample where the distance failed to drop
  double previous = 0.0;   // distance at the preceding sample
  double current = 0.0;
};

/// For seeded random pairs in the scenario box, checks that the sup-norm
/// distance strictly decreases across `samples` equally spaced times in
/// (0, horizon].
ContractionVerdict contraction_check(const SystemSpec& sys, std::size_t pairs, double horizon,
                                     const IntegratorConfig& cfg, std::uint64_t seed,
                                     std::size_t samples = 20);

enum class Trend { decreasing, stagnant, increasing };
std::string to_string(Trend t);

struct ConvergenceReport {
  std::vector<std::pair<double, double>> splits;  // (T, sup distance on [T, T + window])
  Trend trend = Trend::stagnant;
  bool passed = false;
  double threshold = 0.0;
  double window = 0.0;
};

/// Sup distances on split_count consecutive trailing windows of the common
/// domain. passed iff the last distance is below threshold and the trend is
/// not increasing.
ConvergenceReport convergence_check(const Signal& a, const Signal& b, double threshold,
                                    std::size_t split_count, double window_length);

}  // namespace plab::limits
