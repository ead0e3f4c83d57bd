#include <algorithm>
#include <cmath>
#include <limits>

#include "plab/error.hpp"
#include "plab/limits.hpp"

namespace plab::limits {
namespace {

double sup_gap(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

std::size_t state_size(const SystemSpec& sys, const IntegratorConfig& cfg) {
  return sys.kind == systems::SystemKind::parabolic_1d ? sys.dim * cfg.space_points : sys.dim;
}

std::vector<State> flow_at(const SystemSpec& sys, const State& u0, std::span<const double> times,
                           const IntegratorConfig& cfg) {
  if (times.empty()) return {};
  if (sys.kind != systems::SystemKind::dde_single_delay)
    return systems::integrate_ode_at(sys, u0, times, cfg);
  // Record past the last time so that it is read away from the spline's
  // natural end condition.
  IntegratorConfig c = cfg;
  c.t_end = times.back() + 20.0 * c.record_dt;
  const Signal hist = systems::constant_history(sys, u0, c);
  const Signal sol = systems::integrate_dde(sys, hist, c);
  std::vector<State> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(sol.eval(t));
  return out;
}

double hausdorff(const std::vector<State>& a, const std::vector<State>& b) {
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  auto directed = [](const std::vector<State>& p, const std::vector<State>& q) {
    double worst = 0.0;
    for (const auto& x : p) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : q) best = std::min(best, sup_gap(x, y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

EntireTrajectory entire_trajectory_estimate(const Signal& traj, const ReturnSequence& returns,
                                            double W) {
  if (!(W > 0.0)) fail(ErrorCode::InvalidArgument, "half width must be positive");
  std::vector<double> usable;
  const double tol = Signal::grid_tol * traj.dt();
  for (double t : returns.times)
    if (t - W >= traj.t0() - tol && t + W <= traj.t_end() + tol) usable.push_back(t);
  if (usable.size() < 2)
    fail(ErrorCode::InsufficientReturns, "need two return times with [t_n - W, t_n + W] inside the trajectory");
  const double t_last = usable.back();
  const double t_prev = usable[usable.size() - 2];
  const double dt = traj.dt();
  const auto n = static_cast<std::size_t>(std::floor(2.0 * W / dt + 1e-9)) + 1;
  const std::size_t dim = traj.dim();
  std::vector<double> last(n * dim), prev(n * dim), v(dim);
  double agreement = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = -W + dt * static_cast<double>(k);
    traj.eval(std::clamp(s + t_last, traj.t0(), traj.t_end()), v);
    std::copy(v.begin(), v.end(), last.begin() + static_cast<long>(k * dim));
    traj.eval(std::clamp(s + t_prev, traj.t0(), traj.t_end()), v);
    std::copy(v.begin(), v.end(), prev.begin() + static_cast<long>(k * dim));
    for (std::size_t c = 0; c < dim; ++c)
      agreement = std::max(agreement, std::abs(last[k * dim + c] - prev[k * dim + c]));
  }
  return {Signal(-W, dt, dim, std::move(last), traj.interp()), agreement, t_last, t_prev};
}

EntireTrajectory entire_trajectory_estimate(const SystemSpec& sys, const State& u0,
                                            const ReturnSequence& returns, double W,
                                            const IntegratorConfig& cfg) {
  if (!(W > 0.0)) fail(ErrorCode::InvalidArgument, "half width must be positive");
  std::vector<double> usable;
  for (double t : returns.times)
    if (t - W >= 0.0) usable.push_back(t);
  if (usable.size() < 2)
    fail(ErrorCode::InsufficientReturns, "need two return times with t_n - W >= 0");
  const double t_last = usable.back();
  const double t_prev = usable[usable.size() - 2];
  const double dt = cfg.record_dt;
  const auto n = static_cast<std::size_t>(std::floor(2.0 * W / dt + 1e-9)) + 1;

  // Union of both windows' sample times, increasing; each slot remembers
  // which reconstruction(s) it feeds.
  struct Slot {
    double t;
    int which;  // 0: prev, 1: last
    std::size_t k;
  };
  std::vector<Slot> slots;
  slots.reserve(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = -W + dt * static_cast<double>(k);
    slots.push_back({t_prev + s, 0, k});
    slots.push_back({t_last + s, 1, k});
  }
  std::stable_sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) { return a.t < b.t; });
  std::vector<double> times;
  std::vector<std::size_t> slot_time(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (times.empty() || slots[i].t > times.back() + 1e-12 * std::max(1.0, std::abs(slots[i].t)))
      times.push_back(slots[i].t);
    slot_time[i] = times.size() - 1;
  }
  const auto states = flow_at(sys, u0, times, cfg);
  const std::size_t dim = states.front().size();
  std::vector<double> last(n * dim), prev(n * dim);
  for (std::size_t i = 0; i < slots.size(); ++i) {
    auto& dst = slots[i].which == 1 ? last : prev;
    const auto& st = states[slot_time[i]];
    std::copy(st.begin(), st.end(), dst.begin() + static_cast<long>(slots[i].k * dim));
  }
  double agreement = 0.0;
  for (std::size_t i = 0; i < last.size(); ++i) agreement = std::max(agreement, std::abs(last[i] - prev[i]));
  return {Signal(-W, dt, dim, std::move(last)), agreement, t_last, t_prev};
}

}  // namespace plab::limits
