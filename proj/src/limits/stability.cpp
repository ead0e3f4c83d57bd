#include <algorithm>
#include <cmath>
#include <random>

#include "plab/error.hpp"
#include "plab/limits.hpp"
#include "plab/parallel.hpp"

namespace plab::limits {
namespace {

double sup_gap(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<double> sample_times(double horizon, double dt, std::size_t max_count = 0) {
  auto n = static_cast<std::size_t>(std::floor(horizon / dt + 1e-9));
  double step = dt;
  if (max_count > 0 && n > max_count) {
    n = max_count;
    step = horizon / static_cast<double>(n);
  }
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) t[k] = step * static_cast<double>(k + 1);
  return t;
}

// Unit sup-norm directions: all +1, all -1, then seeded mixes with one
// coordinate pinned to +-1.
std::vector<State> probe_directions(std::size_t n, std::size_t count, std::uint64_t seed) {
  std::vector<State> dirs;
  dirs.push_back(State(n, 1.0));
  dirs.push_back(State(n, -1.0));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  while (dirs.size() < count) {
    State d(n);
    for (double& v : d) v = u(rng);
    d[pick(rng)] = u(rng) < 0.0 ? -1.0 : 1.0;
    dirs.push_back(std::move(d));
  }
  return dirs;
}

}  // namespace

std::vector<StabilityRow> uniform_stability_estimate(const SystemSpec& sys, const State& anchor,
                                                     const std::vector<double>& epsilon_list,
                                                     const StabilityConfig& cfg) {
  if (cfg.probes < 8) fail(ErrorCode::InvalidArgument, "uniform stability needs at least 8 probes");
  if (!(cfg.horizon > 0.0)) fail(ErrorCode::InvalidArgument, "horizon must be positive");
  const auto times = sample_times(cfg.horizon, cfg.integrator.record_dt);
  const auto ref = flow_at(sys, anchor, times, cfg.integrator);
  const auto dirs = probe_directions(anchor.size(), cfg.probes, cfg.seed);

  auto stays_close = [&](double delta, double eps) {
    std::vector<char> ok(dirs.size(), 1);
    parallel_for(
        dirs.size(),
        [&](std::size_t p) {
          State start = anchor;
          for (std::size_t i = 0; i < start.size(); ++i) start[i] += delta * dirs[p][i];
          const auto traj = flow_at(sys, start, times, cfg.integrator);
          for (std::size_t k = 0; k < traj.size(); ++k) {
            if (sup_gap(traj[k], ref[k]) > eps * (1.0 + 1e-12)) {
              ok[p] = 0;
              return;
            }
          }
        },
        1);
    return std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
  };

  std::vector<StabilityRow> rows;
  for (double eps : epsilon_list) {
    if (!(eps > 0.0)) fail(ErrorCode::InvalidArgument, "epsilon must be positive");
    double found = 0.0;
    if (stays_close(eps, eps)) {
      found = eps;
    } else {
      double lo = 0.0, hi = eps;
      for (int it = 0; it < cfg.bisection_steps; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (stays_close(mid, eps))
          lo = mid;
        else
          hi = mid;
      }
      found = lo;
    }
    rows.push_back({eps, found});
  }
  // A delta that works for eps also works for every larger eps.
  std::vector<std::size_t> order(rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rows[a].epsilon < rows[b].epsilon; });
  double running = 0.0;
  for (std::size_t i : order) {
    running = std::max(running, rows[i].delta_hat);
    rows[i].delta_hat = running;
  }
  return rows;
}

ContractionVerdict contraction_check(const SystemSpec& sys, std::size_t pairs, double horizon,
                                     const IntegratorConfig& cfg, std::uint64_t seed,
                                     std::size_t samples) {
  if (pairs < 8) fail(ErrorCode::InvalidArgument, "contraction check needs at least 8 pairs");
  if (!(horizon > 0.0)) fail(ErrorCode::InvalidArgument, "horizon must be positive");
  const std::size_t n = state_size(sys, cfg);
  std::vector<double> times(samples);
  for (std::size_t k = 0; k < samples; ++k)
    times[k] = horizon * static_cast<double>(k + 1) / static_cast<double>(samples);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<State, State>> starts;
  for (std::size_t p = 0; p < pairs; ++p) {
    State a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = n == sys.dim ? i : i / cfg.space_points;
      const double lo = sys.box.empty() ? -1.0 : sys.box.lo[c];
      const double hi = sys.box.empty() ? 1.0 : sys.box.hi[c];
      a[i] = lo + (hi - lo) * unit(rng);
      b[i] = lo + (hi - lo) * unit(rng);
    }
    starts.emplace_back(std::move(a), std::move(b));
  }

  struct Failure {
    bool failed = false;
    double t = 0.0, previous = 0.0, current = 0.0;
  };
  std::vector<Failure> failures(pairs);
  parallel_for(
      pairs,
      [&](std::size_t p) {
        const auto ta = flow_at(sys, starts[p].first, times, cfg);
        const auto tb = flow_at(sys, starts[p].second, times, cfg);
        double prev = sup_gap(starts[p].first, starts[p].second);
        for (std::size_t k = 0; k < times.size(); ++k) {
          const double d = sup_gap(ta[k], tb[k]);
          if (!(d < prev)) {
            failures[p] = {true, times[k], prev, d};
            return;
          }
          prev = d;
        }
      },
      1);

  ContractionVerdict v;
  v.pairs = pairs;
  v.contracting = true;
  for (std::size_t p = 0; p < pairs; ++p) {
    if (failures[p].failed) {
      v.contracting = false;
      v.witness = starts[p];
      v.t = failures[p].t;
      v.previous = failures[p].previous;
      v.current = failures[p].current;
      break;
    }
  }
  return v;
}

}  // namespace plab::limits
