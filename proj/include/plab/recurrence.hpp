#pragma once

// Recurrence classification of sampled signals on finite evidence windows:
// epsilon-shift sets, inclusion-length tables, return sequences, spectral
// quasi-periodic fits and comparability profiles. Every verdict is
// evidence on the recorded window and grid, never proof.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "plab/signals.hpp"

namespace plab::recurrence {

using signals::Signal;
using signals::Window;

/// Candidate shifts tau = min + k*step, k = 0..size()-1, with max included
/// when it falls on the grid (tolerance 1e-9 step).
struct TauGrid {
  double min = 0.0;
  double max = 100.0;
  double step = 0.01;

  std::size_t size() const;
  double at(std::size_t k) const { return min + step * static_cast<double>(k); }
  double range() const { return max - min; }
  void validate() const;
};

/// D(tau) for every grid tau, sup discrepancy on w. Data-parallel over tau.
std::vector<double> discrepancy_profile(const Signal& f, const TauGrid& grid, const Window& w);
/// Bebutov distance d(f^tau, f) for every grid tau, l_max = w.half_width,
/// centered at w.center.
std::vector<double> bebutov_profile(const Signal& f, const TauGrid& grid, const Window& w);

struct ShiftStatistics {
  double epsilon = 0.0;
  Window window;
  TauGrid grid;
  std::vector<double> shifts;          // increasing grid taus with D < epsilon
  std::vector<double> discrepancies;   // D at each shift
  double max_gap = 0.0;
};

/// Shift statistics from a precomputed profile (see discrepancy_profile).
///
/// Adjacent grid shifts form one run, represented by its argmin. max_gap is
/// the largest of: the grid step, distances between consecutive run
/// representatives, and the uncovered spans before the first and after the
/// last shift.
ShiftStatistics shift_statistics(const std::vector<double>& profile, double epsilon,
                                 const TauGrid& grid, const Window& w);

ShiftStatistics almost_periods(const Signal& f, double epsilon, const TauGrid& grid, const Window& w);

struct DensityRow {
  double epsilon = 0.0;
  double inclusion_length = 0.0;  // L(eps) = max_gap
  bool saturated = false;         // max_gap > grid range / 2
  std::size_t shift_count = 0;
};

std::vector<DensityRow> density_table(const Signal& f, const std::vector<double>& epsilons,
                                      const TauGrid& grid, const Window& w);
std::vector<DensityRow> density_table_from_profile(const std::vector<double>& profile,
                                                   const std::vector<double>& epsilons,
                                                   const TauGrid& grid, const Window& w);

// ---------------------------------------------------------------------------

struct ReturnSequence {
  std::vector<double> times;
  std::vector<double> discrepancies;
  std::vector<double> epsilon_schedule;  // epsilon used for each entry
  Window window;

  std::size_t size() const noexcept { return times.size(); }
  bool empty() const noexcept { return times.empty(); }
};

struct ReturnSearch {
  double separation = 1.0;  // t_{n+1} >= t_n + separation; t_1 >= separation
  double scan_step = 0.0;   // 0: the signal's dt
  double t_max = 0.0;       // 0: largest tau keeping w + tau inside the domain
};

/// Greedy search: for each eps_n in turn, scan forward from t_{n-1} +
/// separation to the first dip of D below eps_n, then descend to the local
/// minimum of D and refine it by golden-section search. Stops at the first
/// eps_n without a return; an empty result is legal.
ReturnSequence poisson_returns(const Signal& f, const std::vector<double>& epsilon_schedule,
                               const Window& w, const ReturnSearch& opts = {});

/// eps_0 * ratio^n for n = 0..count-1, floored at eps_min.
std::vector<double> geometric_schedule(double eps0, double ratio, std::size_t count,
                                       double eps_min = 0.0);

// ---------------------------------------------------------------------------

struct QuasiPeriodicFit {
  std::vector<double> freqs;       // angular, ascending
  std::vector<double> amplitudes;  // max over components of sqrt(a^2 + b^2), same order
  double residual = 1.0;           // sup|f - fit| / sup|f - mean| on the window
  bool independent = false;        // pairwise rational independence
  std::optional<std::pair<std::size_t, std::size_t>> dependent_pair;
};

struct FitOptions {
  double threshold = 1e-2;       // residual below which the fit is accepted
  double ratio_tol = 1e-6;
  int cf_depth = 20;
  long cf_max_denominator = 10'000;
};

/// Spectral peak extraction (Hann window, 4x zero padding, parabolic peak
/// interpolation) with greedy mode addition and least-squares refit of
/// amplitudes and phases; frequencies are refined by minimising the
/// least-squares error.
QuasiPeriodicFit quasi_periodic_fit(const Signal& f, std::size_t max_freqs, const Window& w,
                                    const FitOptions& opts = {});

/// Continued-fraction test: a/b is treated as rational when some convergent
/// p/q (depth <= cf_depth, q <= cf_max_denominator) satisfies
/// |a/b - p/q| < min(ratio_tol, 0.1 / q^2).
bool rationally_dependent(double a, double b, const FitOptions& opts = {});

// ---------------------------------------------------------------------------

enum class ProfileVerdict { comparable_evidence, refuted, inconclusive };
std::string to_string(ProfileVerdict v);

struct ComparabilityRow {
  double epsilon = 0.0;
  double delta_hat = 0.0;  // +inf when no grid tau has D_x >= epsilon
  std::optional<double> witness_tau;  // argmin D_y over taus with D_x >= epsilon
  double witness_dx = 0.0;
  double witness_dy = 0.0;
};

struct ComparabilityProfile {
  std::vector<ComparabilityRow> pairs;  // in the order of epsilon_list
  Window window;
  TauGrid grid;
  ProfileVerdict verdict = ProfileVerdict::inconclusive;
  std::optional<double> witness_tau;  // set when refuted
  double zero_tolerance = 0.0;        // D_y at or below this counts as an exact return
};

/// delta_hat(eps) = min of D_y over grid taus with D_x >= eps, which is the
/// largest delta such that D_y(tau) < delta implies D_x(tau) < eps on the
/// grid; +inf when no grid tau has D_x >= eps.
///
/// The few smallest-D_y candidates per eps are refined off the grid by
/// golden-section search on D_y. Refuted when a refined tau has D_y within
/// zero_tolerance = 1e-6 * max(1, sup|y|) while D_x >= eps still holds: a
/// numerically exact return of the base that is not an eps-shift of x.
ComparabilityProfile comparability_profile(const Signal& x, const Signal& y,
                                           const std::vector<double>& epsilon_list,
                                           const TauGrid& grid, const Window& w);
/// As comparability_profile with precomputed grid profiles dx, dy.
ComparabilityProfile comparability_from_profiles(const Signal& x, const Signal& y,
                                                 const std::vector<double>& dx,
                                                 const std::vector<double>& dy,
                                                 const std::vector<double>& epsilon_list,
                                                 const TauGrid& grid, const Window& w);

// ---------------------------------------------------------------------------

enum class Tri { yes, no, inconclusive };
std::string to_string(Tri t);

struct StationaryVerdict {
  Tri verdict = Tri::inconclusive;
  double deviation = 0.0;  // sup |f - f(window start)| on the window
  double tolerance = 0.0;
};

struct PeriodicVerdict {
  Tri verdict = Tri::inconclusive;
  double period = 0.0;
  double discrepancy = 0.0;      // D(period), refined
  double tolerance = 0.0;
  std::optional<double> best_tau;  // no: best non-trivial candidate
  double best_discrepancy = 0.0;
};

struct QuasiPeriodicVerdict {
  Tri verdict = Tri::inconclusive;
  QuasiPeriodicFit fit;
  bool from_period = false;  // implied by a periodic yes
};

struct DensityVerdict {
  Tri verdict = Tri::inconclusive;
  std::vector<DensityRow> table;
  std::optional<double> witness_epsilon;  // first saturated epsilon
  bool implied = false;  // almost_recurrent yes implied by bohr yes
};

struct PoissonVerdict {
  Tri verdict = Tri::inconclusive;
  ReturnSequence returns;
};

struct PseudoRecurrentFlag {
  bool flag = false;
};

struct ComparabilityEvidence {
  ComparabilityProfile profile;
  std::vector<ComparabilityProfile> shifted_centers;  // strong-comparability proxy
  std::vector<std::string> transferred;  // classes carried from the base
  bool levitan_evidence = false;
};

struct ClassifyConfig {
  Window window{250.0, 250.0};
  TauGrid grid{0.0, 500.0, 0.01};
  std::vector<double> bohr_epsilons{0.5, 0.2};
  std::vector<double> compare_epsilons{0.2, 0.1};
  std::vector<double> return_schedule{0.5, 0.2, 0.1};
  ReturnSearch returns{};
  double stationary_tol = 1e-6;  // relative to max(1, sup|f|)
  double candidate_level = 0.1;  // relative; periodic candidates dip below this
  double periodic_tol = 1e-3;    // relative to the amplitude
  std::size_t max_freqs = 4;
  FitOptions fit{};
  std::size_t min_returns = 3;
  std::vector<double> extra_centers;  // window centers for the strong proxy
};

struct RecurrenceReport {
  Window window;
  TauGrid grid;
  StationaryVerdict stationary;
  PeriodicVerdict periodic;
  QuasiPeriodicVerdict quasi_periodic;
  DensityVerdict bohr;
  DensityVerdict almost_recurrent;
  PoissonVerdict poisson;
  PseudoRecurrentFlag pseudo_recurrent;
  std::optional<ComparabilityEvidence> comparability;

  /// First class in cascade order with a yes verdict, or "none".
  std::string primary_class() const;
};

/// Runs stationary -> periodic -> quasi_periodic -> bohr -> almost_recurrent
/// -> poisson on f; with a base, attaches the comparability profile of f
/// against the base and the classes it transfers.
RecurrenceReport classify(const Signal& f, const Signal* base, const ClassifyConfig& cfg);

/// Serializes to the documented report tree (docs/report-schema.md).
std::string to_json(const RecurrenceReport& report, int indent = 2);
std::string to_json(const ComparabilityProfile& profile, int indent = 2);

}  // namespace plab::recurrence
