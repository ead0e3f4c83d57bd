#include <algorithm>
#include <cmath>
#include <sstream>

#include "plab/error.hpp"
#include "plab/systems.hpp"

namespace plab::systems {
namespace {

struct DelayGrid {
  double record = 0.0;       // output spacing, divides r
  double step = 0.0;         // internal step, divides record
  std::size_t per_record = 1;
  std::size_t history_records = 1;  // r / record
};

DelayGrid delay_grid(double r, const IntegratorConfig& cfg) {
  DelayGrid g;
  g.history_records = static_cast<std::size_t>(std::ceil(r / cfg.record_dt - 1e-9));
  g.record = r / static_cast<double>(g.history_records);
  g.per_record = static_cast<std::size_t>(std::ceil(g.record / cfg.dt - 1e-9));
  g.step = g.record / static_cast<double>(g.per_record);
  return g;
}

// Solution nodes u_k at t = k h with derivatives, for Hermite lookups of u(s),
// s in [0, t_k]; s < 0 falls back to the history signal.
class DelayedSolution {
 public:
  DelayedSolution(const Signal& history, std::size_t dim, double h)
      : history_(history), dim_(dim), h_(h) {}

  void push(std::span<const double> u, std::span<const double> du) {
    nodes_.insert(nodes_.end(), u.begin(), u.end());
    slopes_.insert(slopes_.end(), du.begin(), du.end());
  }

  void lookup(double s, std::span<double> out) const {
    if (s <= 0.0) {
      history_.eval(std::max(s, history_.t0()), out);
      return;
    }
    const double pos = s / h_;
    auto k = static_cast<std::size_t>(std::floor(pos + 1e-9));
    const std::size_t count = nodes_.size() / dim_;
    double theta = pos - static_cast<double>(k);
    if (std::abs(theta) <= 1e-9) {
      if (k >= count) fail(ErrorCode::InvalidArgument, "delayed lookup ahead of the solution");
      std::copy_n(nodes_.begin() + static_cast<long>(k * dim_), dim_, out.begin());
      return;
    }
    if (k + 1 >= count) fail(ErrorCode::InvalidArgument, "delayed lookup ahead of the solution");
    theta = std::clamp(theta, 0.0, 1.0);
    const double t2 = theta * theta;
    const double t3 = t2 * theta;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + theta;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    for (std::size_t c = 0; c < dim_; ++c) {
      const double y0 = nodes_[k * dim_ + c], y1 = nodes_[(k + 1) * dim_ + c];
      const double m0 = slopes_[k * dim_ + c], m1 = slopes_[(k + 1) * dim_ + c];
      out[c] = h00 * y0 + h10 * h_ * m0 + h01 * y1 + h11 * h_ * m1;
    }
  }

  std::span<const double> node(std::size_t k) const { return {nodes_.data() + k * dim_, dim_}; }

 private:
  const Signal& history_;
  std::size_t dim_;
  double h_;
  std::vector<double> nodes_;
  std::vector<double> slopes_;
};

}  // namespace

Signal constant_history(const SystemSpec& sys, const State& c, const IntegratorConfig& cfg) {
  sys.validate();
  cfg.validate();
  if (c.size() != sys.dim) fail(ErrorCode::DimensionMismatch, "history constant has wrong dimension");
  const double r = sys.rhs.delay;
  const DelayGrid g = delay_grid(r, cfg);
  std::vector<double> data;
  data.reserve((g.history_records + 1) * sys.dim);
  for (std::size_t k = 0; k <= g.history_records; ++k) data.insert(data.end(), c.begin(), c.end());
  return Signal(-r, g.record, sys.dim, std::move(data));
}

Signal integrate_dde(const SystemSpec& sys, const Signal& history, const IntegratorConfig& cfg) {
  sys.validate();
  cfg.validate();
  if (sys.kind != SystemKind::dde_single_delay)
    fail(ErrorCode::InvalidArgument, "integrate_dde requires dde_single_delay");
  const double r = sys.rhs.delay;
  const std::size_t n = sys.dim;
  if (history.dim() != n) fail(ErrorCode::DimensionMismatch, "history has wrong dimension");
  const double tol = 1e-9 * std::max(1.0, r);
  if (std::abs(history.t0() + r) > tol || std::abs(history.t_end()) > tol) {
    std::ostringstream msg;
    msg << "history covers [" << history.t0() << ", " << history.t_end() << "], expected [" << -r
        << ", 0]";
    fail(ErrorCode::HistoryDomainMismatch, msg.str());
  }
  if (cfg.method != Method::rk4_fixed && cfg.dt > r)
    fail(ErrorCode::ConfigInvalid, "DDE step must not exceed the delay");

  const DelayGrid g = delay_grid(r, cfg);
  const double h = g.step;
  const double bound = blowup_bound_for(sys, cfg);
  const DelayRhsFn rhs = make_delay_rhs(sys);
  const auto records = static_cast<std::size_t>(std::floor(cfg.t_end / g.record + 1e-9));
  const std::size_t total_steps = records * g.per_record;
  if (total_steps > cfg.max_steps) fail(ErrorCode::StepUnderflow, "DDE step budget exceeded");

  // Output: history resampled on the record grid, then the computed records.
  std::vector<double> out;
  out.reserve((g.history_records + records + 1) * n);
  std::vector<double> v(n);
  for (std::size_t k = 0; k <= g.history_records; ++k) {
    if (k == g.history_records) {
      history.eval(history.t_end(), v);
    } else {
      history.eval(-r + g.record * static_cast<double>(k), v);
    }
    out.insert(out.end(), v.begin(), v.end());
  }

  DelayedSolution sol(history, n, h);
  State u(n), lag(n), k1(n), k2(n), k3(n), k4(n), tmp(n);
  history.eval(history.t_end(), u);
  sol.lookup(-r, lag);
  rhs(0.0, u, lag, k1);
  sol.push(u, k1);

  auto stage = [&](double t, std::span<const double> state, std::span<double> du) {
    sol.lookup(t - r, lag);
    rhs(t, state, lag, du);
  };

  for (std::size_t s = 0; s < total_steps; ++s) {
    const double t = h * static_cast<double>(s);
    // k1 is the slope stored with the current node.
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k1[i];
    stage(t + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k2[i];
    stage(t + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + h * k3[i];
    stage(t + h, tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(u[i]) || std::abs(u[i]) > bound) {
        std::ostringstream msg;
        msg << "component " << i << " = " << u[i] << " at t = " << t + h << " exceeds bound " << bound;
        fail(ErrorCode::BlowupDetected, msg.str());
      }
    }
    stage(t + h, u, k1);
    sol.push(u, k1);
    if ((s + 1) % g.per_record == 0) out.insert(out.end(), u.begin(), u.end());
  }
  return Signal(-r, g.record, n, std::move(out));
}

}  // namespace plab::systems
