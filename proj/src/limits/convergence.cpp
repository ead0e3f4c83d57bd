#include <algorithm>
#include <cmath>
#include <sstream>

#include "plab/error.hpp"
#include "plab/limits.hpp"

namespace plab::limits {

std::string to_string(Trend t) {
  switch (t) {
    case Trend::decreasing: return "decreasing";
    case Trend::stagnant: return "stagnant";
    case Trend::increasing: return "increasing";
  }
  return "stagnant";
}

ConvergenceReport convergence_check(const Signal& a, const Signal& b, double threshold,
                                    std::size_t split_count, double window_length) {
  if (a.dim() != b.dim()) fail(ErrorCode::DimensionMismatch, "convergence_check: dimensions differ");
  if (split_count == 0 || !(window_length > 0.0))
    fail(ErrorCode::InvalidArgument, "convergence_check needs split_count >= 1 and a positive window");
  const double lo = std::max(a.t0(), b.t0());
  const double hi = std::min(a.t_end(), b.t_end());
  const double needed = static_cast<double>(split_count) * window_length;
  if (hi - lo < needed * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "common domain [" << lo << ", " << hi << "] shorter than " << split_count << " x "
        << window_length;
    fail(ErrorCode::DomainMismatch, msg.str());
  }
  ConvergenceReport r;
  r.threshold = threshold;
  r.window = window_length;
  double scale = std::max(a.sup_norm(), b.sup_norm());
  for (std::size_t k = 0; k < split_count; ++k) {
    const double T = hi - static_cast<double>(split_count - k) * window_length;
    const auto w = signals::Window::from_range(T, T + window_length);
    r.splits.emplace_back(T, signals::sup_distance(a, b, w));
  }
  const double noise = 1e-12 * std::max(1.0, scale);
  const double first = r.splits.front().second;
  const double last = r.splits.back().second;
  bool monotone = true;
  for (std::size_t k = 1; k < r.splits.size(); ++k)
    if (r.splits[k].second > r.splits[k - 1].second + noise) monotone = false;
  if (last > first + noise)
    r.trend = Trend::increasing;
  else if (monotone && last < first - noise)
    r.trend = Trend::decreasing;
  else
    r.trend = Trend::stagnant;
  r.passed = last < threshold && r.trend != Trend::increasing;
  return r;
}

}  // namespace plab::limits
