#include <algorithm>
#include <cmath>
#include <limits>

#include "plab/error.hpp"
#include "plab/recurrence.hpp"

namespace plab::recurrence {
namespace {

constexpr std::size_t kRefineCandidates = 5;

template <class Fn>
std::pair<double, double> golden_min(Fn&& fn, double a, double b, int iters = 48) {
  constexpr double g = 0.6180339887498949;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = fn(x1), f2 = fn(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = fn(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = fn(x2);
    }
  }
  return f1 <= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

}  // namespace

std::string to_string(ProfileVerdict v) {
  switch (v) {
    case ProfileVerdict::comparable_evidence: return "comparable-evidence";
    case ProfileVerdict::refuted: return "refuted";
    case ProfileVerdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

ComparabilityProfile comparability_from_profiles(const Signal& x, const Signal& y,
                                                 const std::vector<double>& dx,
                                                 const std::vector<double>& dy,
                                                 const std::vector<double>& epsilon_list,
                                                 const TauGrid& grid, const Window& w) {
  if (dx.size() != dy.size() || dx.size() != grid.size())
    fail(ErrorCode::DimensionMismatch, "discrepancy profiles do not match the grid");
  ComparabilityProfile p;
  p.window = w;
  p.grid = grid;
  p.zero_tolerance = 1e-6 * std::max(1.0, y.sup_norm());
  if (grid.size() < 2) return p;

  // Shifts admissible for both signals.
  const double dt = std::max(x.dt(), y.dt());
  const double tau_lo = std::max({grid.min, x.t0() - w.lo(), y.t0() - w.lo()}) + dt;
  const double tau_hi = std::min({grid.max, x.t_end() - w.hi(), y.t_end() - w.hi()}) - dt;
  auto Dy = [&](double tau) { return signals::shift_discrepancy(y, tau, w); };

  // Visit taus by increasing D_y (ties by tau); the first with D_x >= eps
  // fixes delta_hat(eps).
  std::vector<std::size_t> order(dy.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dy[a] < dy[b]; });

  for (double eps : epsilon_list) {
    if (!(eps > 0.0)) fail(ErrorCode::InvalidArgument, "epsilon must be positive");
    ComparabilityRow row;
    row.epsilon = eps;
    row.delta_hat = std::numeric_limits<double>::infinity();
    std::size_t refined = 0;
    for (std::size_t k : order) {
      if (dx[k] < eps) continue;
      if (refined == 0) {
        row.delta_hat = dy[k];
        row.witness_tau = grid.at(k);
        row.witness_dx = dx[k];
        row.witness_dy = dy[k];
      }
      const double tau = grid.at(k);
      const double lo = std::max(tau_lo, tau - grid.step);
      const double hi = std::min(tau_hi, tau + grid.step);
      if (hi > lo) {
        const auto [t_star, d_star] = golden_min(Dy, lo, hi);
        if (d_star < row.delta_hat) {
          const double dx_star = signals::shift_discrepancy(x, t_star, w);
          if (dx_star >= eps) {
            row.delta_hat = d_star;
            row.witness_tau = t_star;
            row.witness_dx = dx_star;
            row.witness_dy = d_star;
          }
        }
      }
      if (++refined == kRefineCandidates) break;
    }
    p.pairs.push_back(row);
  }

  // A witness for eps is also one for every smaller eps.
  std::vector<std::size_t> by_eps(p.pairs.size());
  for (std::size_t i = 0; i < by_eps.size(); ++i) by_eps[i] = i;
  std::stable_sort(by_eps.begin(), by_eps.end(),
                   [&](std::size_t a, std::size_t b) { return p.pairs[a].epsilon > p.pairs[b].epsilon; });
  for (std::size_t i = 1; i < by_eps.size(); ++i) {
    auto& cur = p.pairs[by_eps[i]];
    const auto& prev = p.pairs[by_eps[i - 1]];
    if (prev.delta_hat < cur.delta_hat) {
      const double eps = cur.epsilon;
      cur = prev;
      cur.epsilon = eps;
    }
  }

  p.verdict = ProfileVerdict::comparable_evidence;
  for (const auto& row : p.pairs) {
    if (row.delta_hat <= p.zero_tolerance) {
      p.verdict = ProfileVerdict::refuted;
      p.witness_tau = row.witness_tau;
      break;
    }
  }
  return p;
}

ComparabilityProfile comparability_profile(const Signal& x, const Signal& y,
                                           const std::vector<double>& epsilon_list,
                                           const TauGrid& grid, const Window& w) {
  const auto dx = discrepancy_profile(x, grid, w);
  const auto dy = discrepancy_profile(y, grid, w);
  return comparability_from_profiles(x, y, dx, dy, epsilon_list, grid, w);
}

}  // namespace plab::recurrence
