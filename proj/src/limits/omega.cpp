#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "plab/error.hpp"
#include "plab/limits.hpp"

namespace plab::limits {
namespace {

double sup_gap(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<double> retained_times(const ReturnSequence& returns, double settle_time) {
  std::vector<double> out;
  for (double t : returns.times)
    if (t > settle_time) out.push_back(t);
  return out;
}

void require_three(std::size_t n, double settle_time) {
  if (n < 3) {
    std::ostringstream msg;
    msg << n << " return times after settle time " << settle_time << " (need 3)";
    fail(ErrorCode::InsufficientReturns, msg.str());
  }
}

std::string describe_fiber(const SystemSpec& sys) {
  std::ostringstream tag;
  tag << sys.rhs.key << " tau=" << sys.base_shift;
  return tag.str();
}

}  // namespace

OmegaSample omega_fiber_sample(const Signal& traj, const ReturnSequence& returns, double settle_time,
                               std::string fiber_tag) {
  OmegaSample s;
  s.returns = returns;
  s.settle_time = settle_time;
  s.fiber_tag = std::move(fiber_tag);
  s.times = retained_times(returns, settle_time);
  require_three(s.times.size(), settle_time);
  for (double t : s.times) s.snapshots.push_back(traj.eval(t));
  return s;
}

OmegaSample omega_fiber_sample(const SystemSpec& sys, const State& u0, const ReturnSequence& returns,
                               double settle_time, const IntegratorConfig& cfg) {
  OmegaSample s;
  s.returns = returns;
  s.settle_time = settle_time;
  s.fiber_tag = describe_fiber(sys);
  s.times = retained_times(returns, settle_time);
  require_three(s.times.size(), settle_time);
  s.snapshots = flow_at(sys, u0, s.times, cfg);
  return s;
}

double omega_diameter(const OmegaSample& s) {
  double d = 0.0;
  for (std::size_t i = 0; i < s.snapshots.size(); ++i)
    for (std::size_t j = i + 1; j < s.snapshots.size(); ++j)
      d = std::max(d, sup_gap(s.snapshots[i], s.snapshots[j]));
  return d;
}

ExtremalPair fiber_extrema(const OmegaSample& s, double tol) {
  if (s.snapshots.empty()) fail(ErrorCode::InvalidArgument, "fiber_extrema needs a snapshot");
  ExtremalPair p;
  p.alpha = s.snapshots.front();
  p.beta = s.snapshots.front();
  for (const auto& x : s.snapshots) {
    for (std::size_t c = 0; c < x.size(); ++c) {
      p.alpha[c] = std::min(p.alpha[c], x[c]);
      p.beta[c] = std::max(p.beta[c], x[c]);
    }
  }
  for (const auto& x : s.snapshots) {
    if (sup_gap(x, p.alpha) <= tol) p.alpha_in_sample = true;
    if (sup_gap(x, p.beta) <= tol) p.beta_in_sample = true;
  }
  return p;
}

GammaResult gamma_extract(const SystemSpec& sys, const State& start, const ReturnSequence& returns,
                          const GammaConfig& cfg) {
  GammaResult g;
  g.times = retained_times(returns, cfg.settle_time);
  if (g.times.size() < cfg.tail + 1) {
    std::ostringstream msg;
    msg << g.times.size() << " return times after settle time " << cfg.settle_time << " (need "
        << cfg.tail + 1 << ")";
    fail(ErrorCode::InsufficientReturns, msg.str());
  }
  g.snapshots = flow_at(sys, start, g.times, cfg.integrator);
  for (std::size_t n = 1; n < g.snapshots.size(); ++n)
    g.cauchy_tail.push_back(sup_gap(g.snapshots[n], g.snapshots[n - 1]));
  g.gamma = g.snapshots.back();

  const auto& gaps = g.cauchy_tail;
  bool ok = gaps.back() < cfg.tol;
  for (std::size_t k = gaps.size() - cfg.tail + 1; k < gaps.size() && ok; ++k)
    ok = gaps[k] < gaps[k - 1] || gaps[k] <= cfg.noise_floor;
  g.cauchy = ok;
  if (!ok && cfg.require_cauchy) {
    std::ostringstream msg;
    msg << "snapshot gaps over the last " << cfg.tail << " returns:";
    for (std::size_t k = gaps.size() - cfg.tail; k < gaps.size(); ++k) msg << ' ' << gaps[k];
    fail(ErrorCode::NotCauchy, msg.str());
  }
  return g;
}

SandwichCheck sandwich_check(const OmegaSample& x, const ExtremalPair& ext, const GammaResult& low,
                             const GammaResult& high, double tol) {
  if (low.snapshots.size() != x.snapshots.size() || high.snapshots.size() != x.snapshots.size())
    fail(ErrorCode::DimensionMismatch, "sandwich check needs snapshots at the same return times");
  SandwichCheck s;
  s.tolerance = tol;
  s.lower_excess = -std::numeric_limits<double>::infinity();
  s.upper_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < x.snapshots.size(); ++n) {
    for (std::size_t c = 0; c < x.snapshots[n].size(); ++c) {
      s.lower_excess = std::max(s.lower_excess, low.snapshots[n][c] - x.snapshots[n][c]);
      s.upper_excess = std::max(s.upper_excess, x.snapshots[n][c] - high.snapshots[n][c]);
    }
  }
  s.gamma_minus_alpha = -std::numeric_limits<double>::infinity();
  s.beta_minus_delta = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < ext.alpha.size(); ++c) {
    s.gamma_minus_alpha = std::max(s.gamma_minus_alpha, low.gamma[c] - ext.alpha[c]);
    s.beta_minus_delta = std::max(s.beta_minus_delta, ext.beta[c] - high.gamma[c]);
  }
  s.holds = s.lower_excess <= tol && s.upper_excess <= tol;
  return s;
}

double omega_invariance(const SystemSpec& sys, const OmegaSample& s, std::size_t index,
                        const IntegratorConfig& cfg) {
  if (index >= s.snapshots.size()) fail(ErrorCode::InvalidArgument, "snapshot index out of range");
  const auto restarted = flow_at(sys, s.snapshots[index], s.times, cfg);
  return hausdorff(restarted, s.snapshots);
}

}  // namespace plab::limits
