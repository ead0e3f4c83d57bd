#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "plab/error.hpp"
#include "plab/signals.hpp"
#include "signals/shift_view.hpp"

namespace plab::signals {
namespace {

void require_same_dim(const Signal& f, const Signal& g) {
  if (f.dim() != g.dim()) {
    std::ostringstream msg;
    msg << "dimensions differ: " << f.dim() << " vs " << g.dim();
    fail(ErrorCode::DimensionMismatch, msg.str());
  }
}

void require_translate_inside(const detail::ShiftView& view, const IndexRange& r, double tau) {
  if (static_cast<long>(r.first) < view.lo() || static_cast<long>(r.last) > view.hi()) {
    std::ostringstream msg;
    msg << "window translated by tau = " << tau << " leaves the signal domain";
    fail(ErrorCode::WindowOutOfDomain, msg.str());
  }
}

// Pointwise |f(t_i) - g(t_i)|_inf on f's grid points in r. Uses direct
// indexing when g shares f's grid phase.
std::vector<double> pointwise_gap(const Signal& f, const Signal& g, const IndexRange& r) {
  std::vector<double> gap(r.count());
  const double offset = (f.t0() - g.t0()) / g.dt();
  const bool aligned = std::abs(f.dt() - g.dt()) <= Signal::grid_tol * f.dt() &&
                       std::abs(offset - std::round(offset)) <= Signal::grid_tol;
  std::vector<double> gv(g.dim());
  for (std::size_t i = r.first; i <= r.last; ++i) {
    double m = 0.0;
    if (aligned) {
      const long j = static_cast<long>(i) + std::lround(offset);
      if (j < 0 || j >= static_cast<long>(g.size()))
        fail(ErrorCode::WindowOutOfDomain, "window leaves the second signal's domain");
      for (std::size_t c = 0; c < f.dim(); ++c)
        m = std::max(m, std::abs(f.at(i, c) - g.at(static_cast<std::size_t>(j), c)));
    } else {
      g.eval(f.time(i), gv);
      for (std::size_t c = 0; c < f.dim(); ++c) m = std::max(m, std::abs(f.at(i, c) - gv[c]));
    }
    gap[i - r.first] = m;
  }
  return gap;
}

// sup over l = k dt (k = 1..K) of min{max gap over |t - center| <= l, 1/l}.
// gap[i] belongs to grid index r.first + i of f.
double bebutov_reduce(const Signal& f, const std::vector<double>& gap, const IndexRange& r,
                      double l_max, double center) {
  const double dt = f.dt();
  const auto steps = static_cast<std::size_t>(std::floor(l_max / dt + Signal::grid_tol));
  if (steps == 0) fail(ErrorCode::InvalidArgument, "l_max must be at least one grid step");
  const double tol = Signal::grid_tol;
  const double c = (center - f.t0()) / dt;
  // Current index interval [left, right] (absolute indices), empty at start.
  long left = static_cast<long>(std::ceil(c - tol));
  long right = left - 1;
  double running = 0.0;
  double best = 0.0;
  for (std::size_t k = 1; k <= steps; ++k) {
    const double l = dt * static_cast<double>(k);
    const long new_left = static_cast<long>(std::ceil(c - static_cast<double>(k) - tol));
    const long new_right = static_cast<long>(std::floor(c + static_cast<double>(k) + tol));
    if (right < left) {
      left = new_left;
      right = left - 1;
    }
    for (long i = new_left; i < left; ++i)
      running = std::max(running, gap[static_cast<std::size_t>(i) - r.first]);
    for (long i = right + 1; i <= new_right; ++i)
      running = std::max(running, gap[static_cast<std::size_t>(i) - r.first]);
    left = std::min(left, new_left);
    right = std::max(right, new_right);
    best = std::max(best, std::min(running, 1.0 / l));
  }
  return best;
}

}  // namespace

double shift_discrepancy(const Signal& f, double tau, const Window& w) {
  return shift_discrepancy(f, tau, w, std::numeric_limits<double>::infinity());
}

double shift_discrepancy(const Signal& f, double tau, const Window& w, double cutoff) {
  const IndexRange r = window_indices(f, w);
  const detail::ShiftView view(f, tau);
  require_translate_inside(view, r, tau);
  if (view.exact() && view.offset() == 0) return 0.0;
  double m = 0.0;
  const std::size_t dim = f.dim();
  for (std::size_t i = r.first; i <= r.last; ++i) {
    for (std::size_t c = 0; c < dim; ++c) m = std::max(m, std::abs(view.value(i, c) - f.at(i, c)));
    if (m >= cutoff) return m;
  }
  return m;
}

double bebutov_distance(const Signal& f, const Signal& g, double l_max, double center) {
  require_same_dim(f, g);
  if (!(l_max > 0.0)) fail(ErrorCode::InvalidArgument, "l_max must be positive");
  const Window w(center, l_max);
  const IndexRange r = window_indices(f, w);
  (void)window_indices(g, w);
  return bebutov_reduce(f, pointwise_gap(f, g, r), r, l_max, center);
}

double bebutov_shift_distance(const Signal& f, double tau, double l_max, double center) {
  if (!(l_max > 0.0)) fail(ErrorCode::InvalidArgument, "l_max must be positive");
  const Window w(center, l_max);
  const IndexRange r = window_indices(f, w);
  const detail::ShiftView view(f, tau);
  require_translate_inside(view, r, tau);
  std::vector<double> gap(r.count());
  for (std::size_t i = r.first; i <= r.last; ++i) {
    double m = 0.0;
    for (std::size_t c = 0; c < f.dim(); ++c)
      m = std::max(m, std::abs(view.value(i, c) - f.at(i, c)));
    gap[i - r.first] = m;
  }
  return bebutov_reduce(f, gap, r, l_max, center);
}

double sup_distance(const Signal& f, const Signal& g, const Window& w) {
  require_same_dim(f, g);
  const IndexRange r = window_indices(f, w);
  (void)window_indices(g, w);
  const auto gap = pointwise_gap(f, g, r);
  return gap.empty() ? 0.0 : *std::max_element(gap.begin(), gap.end());
}

}  // namespace plab::signals
