#include <algorithm>
#include <cmath>
#include <limits>

#include "plab/error.hpp"
#include "plab/parallel.hpp"
#include "plab/recurrence.hpp"

namespace plab::recurrence {

std::size_t TauGrid::size() const {
  return static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
}

void TauGrid::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) fail(ErrorCode::InvalidArgument, "tau grid step must be positive");
  if (!(max >= min) || !std::isfinite(min) || !std::isfinite(max))
    fail(ErrorCode::InvalidArgument, "tau grid must satisfy min <= max");
}

namespace {

template <class Metric>
std::vector<double> scan(const TauGrid& grid, Metric&& metric) {
  grid.validate();
  const std::size_t n = grid.size();
  std::vector<double> out(n);
  // Evaluate the endpoints first so domain errors surface on this thread.
  out[0] = metric(grid.at(0));
  if (n > 1) out[n - 1] = metric(grid.at(n - 1));
  if (n > 2) parallel_for(n - 2, [&](std::size_t k) { out[k + 1] = metric(grid.at(k + 1)); });
  return out;
}

}  // namespace

std::vector<double> discrepancy_profile(const Signal& f, const TauGrid& grid, const Window& w) {
  return scan(grid, [&](double tau) { return signals::shift_discrepancy(f, tau, w); });
}

std::vector<double> bebutov_profile(const Signal& f, const TauGrid& grid, const Window& w) {
  return scan(grid, [&](double tau) {
    return signals::bebutov_shift_distance(f, tau, w.half_width, w.center);
  });
}

ShiftStatistics shift_statistics(const std::vector<double>& profile, double epsilon,
                                 const TauGrid& grid, const Window& w) {
  if (!(epsilon > 0.0)) fail(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (profile.size() != grid.size()) fail(ErrorCode::DimensionMismatch, "profile does not match grid");
  ShiftStatistics st;
  st.epsilon = epsilon;
  st.window = w;
  st.grid = grid;

  std::vector<double> reps;
  bool in_run = false;
  double best = 0.0;
  double best_tau = 0.0;
  for (std::size_t k = 0; k < profile.size(); ++k) {
    const double tau = grid.at(k);
    if (profile[k] < epsilon) {
      st.shifts.push_back(tau);
      st.discrepancies.push_back(profile[k]);
      if (!in_run || profile[k] < best) {
        best = profile[k];
        best_tau = tau;
      }
      in_run = true;
    } else if (in_run) {
      reps.push_back(best_tau);
      in_run = false;
    }
  }
  if (in_run) reps.push_back(best_tau);

  if (st.shifts.empty()) {
    st.max_gap = grid.range();
    return st;
  }
  double gap = grid.step;
  for (std::size_t i = 1; i < reps.size(); ++i) gap = std::max(gap, reps[i] - reps[i - 1]);
  gap = std::max(gap, st.shifts.front() - grid.min);
  gap = std::max(gap, grid.max - st.shifts.back());
  st.max_gap = gap;
  return st;
}

ShiftStatistics almost_periods(const Signal& f, double epsilon, const TauGrid& grid, const Window& w) {
  return shift_statistics(discrepancy_profile(f, grid, w), epsilon, grid, w);
}

std::vector<DensityRow> density_table_from_profile(const std::vector<double>& profile,
                                                   const std::vector<double>& epsilons,
                                                   const TauGrid& grid, const Window& w) {
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0)) fail(ErrorCode::InvalidArgument, "epsilons must be positive");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
      fail(ErrorCode::InvalidArgument, "epsilons must be strictly decreasing");
  }
  std::vector<DensityRow> rows;
  rows.reserve(epsilons.size());
  for (double eps : epsilons) {
    const auto st = shift_statistics(profile, eps, grid, w);
    rows.push_back({eps, st.max_gap, st.max_gap > 0.5 * grid.range(), st.shifts.size()});
  }
  return rows;
}

std::vector<DensityRow> density_table(const Signal& f, const std::vector<double>& epsilons,
                                      const TauGrid& grid, const Window& w) {
  return density_table_from_profile(discrepancy_profile(f, grid, w), epsilons, grid, w);
}

}  // namespace plab::recurrence
