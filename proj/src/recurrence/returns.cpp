#include <algorithm>
#include <cmath>

#include "plab/error.hpp"
#include "plab/recurrence.hpp"

namespace plab::recurrence {
namespace {

constexpr double kGolden = 0.6180339887498949;

template <class Fn>
std::pair<double, double> golden_min(Fn&& fn, double a, double b, int iters = 48) {
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = fn(x1), f2 = fn(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = fn(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = fn(x2);
    }
  }
  return f1 <= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

}  // namespace

std::vector<double> geometric_schedule(double eps0, double ratio, std::size_t count, double eps_min) {
  if (!(eps0 > 0.0) || !(ratio > 0.0 && ratio < 1.0))
    fail(ErrorCode::InvalidArgument, "schedule needs eps0 > 0 and 0 < ratio < 1");
  std::vector<double> out;
  out.reserve(count);
  double e = eps0;
  for (std::size_t n = 0; n < count; ++n) {
    out.push_back(std::max(e, eps_min));
    e *= ratio;
  }
  return out;
}

ReturnSequence poisson_returns(const Signal& f, const std::vector<double>& schedule,
                               const Window& w, const ReturnSearch& opts) {
  ReturnSequence seq;
  seq.window = w;
  for (std::size_t i = 0; i < schedule.size(); ++i)
    if (!(schedule[i] > 0.0)) fail(ErrorCode::InvalidArgument, "epsilon schedule must be positive");

  const double s = opts.scan_step > 0.0 ? opts.scan_step : f.dt();
  const double t_max = opts.t_max > 0.0 ? opts.t_max : f.t_end() - w.hi() - f.dt();
  if (t_max <= 0.0) return seq;
  const double lip = f.lipschitz_estimate();
  const double margin = 0.625 * lip * s;

  auto D = [&](double tau) { return signals::shift_discrepancy(f, tau, w); };

  double t_prev = 0.0;
  for (double eps : schedule) {
    // Scan positions stay on multiples of s so exact-offset shifts need no interpolation.
    const double start = s * std::ceil((t_prev + opts.separation) / s - 1e-9);
    bool found = false;
    for (std::size_t k = 0; !found; ++k) {
      const double t = start + s * static_cast<double>(k);
      if (t > t_max) break;
      const double d = signals::shift_discrepancy(f, t, w, eps + margin);
      if (d >= eps + margin) continue;
      auto refine = [&](double at, double& tau, double& dv) {
        const double lo = std::max(start, at - s);
        const double hi = std::min(t_max, at + s);
        if (hi <= lo) return;
        const auto [x, fx] = golden_min(D, lo, hi);
        if (fx < dv) {
          tau = x;
          dv = fx;
        }
      };
      // A near miss on the grid may still dip below eps between grid points;
      // accepted dips then descend to the local minimum.
      double tau = t;
      double dv = d;
      refine(t, tau, dv);
      if (dv >= eps) continue;
      double g = t;
      double gv = d;  // exact below the cutoff
      while (g + s <= t_max) {
        const double next = D(g + s);
        if (next >= gv) break;
        g += s;
        gv = next;
      }
      if (g != t) {
        double tau_g = g;
        double dv_g = gv;
        refine(g, tau_g, dv_g);
        if (dv_g < dv) {
          tau = tau_g;
          dv = dv_g;
        }
      }
      if (dv < eps) {
        seq.times.push_back(tau);
        seq.discrepancies.push_back(dv);
        seq.epsilon_schedule.push_back(eps);
        t_prev = tau;
        found = true;
      }
    }
    if (!found) break;
  }
  return seq;
}

}  // namespace plab::recurrence
