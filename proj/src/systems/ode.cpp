#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "plab/error.hpp"
#include "plab/systems.hpp"

namespace plab::systems {
namespace {

void check_state(std::span<const double> u, double t, double bound) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!std::isfinite(u[i]) || std::abs(u[i]) > bound) {
      std::ostringstream msg;
      msg << "component " << i << " = " << u[i] << " at t = " << t << " exceeds bound " << bound;
      fail(ErrorCode::BlowupDetected, msg.str());
    }
  }
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

class Stepper {
 public:
  Stepper(const RhsFn& rhs, std::size_t n, const IntegratorConfig& cfg, double bound)
      : rhs_(rhs), cfg_(cfg), bound_(bound), k1_(n), k2_(n), k3_(n), k4_(n), k5_(n), k6_(n),
        k7_(n), tmp_(n), next_(n) {
    h_ = cfg.dt;
  }

  // Advances (t, u) to exactly t_stop.
  void advance(double& t, std::vector<double>& u, double t_stop) {
    if (t_stop <= t) return;
    if (cfg_.method == Method::rk4_fixed)
      advance_rk4(t, u, t_stop);
    else
      advance_dp45(t, u, t_stop);
  }

 private:
  void count_step(double t) {
    if (++steps_ > cfg_.max_steps) {
      std::ostringstream msg;
      msg << "step budget " << cfg_.max_steps << " exhausted at t = " << t;
      fail(ErrorCode::StepUnderflow, msg.str());
    }
  }

  void advance_rk4(double& t, std::vector<double>& u, double t_stop) {
    const std::size_t n = u.size();
    const double span = t_stop - t;
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / cfg_.dt - 1e-9)));
    const double h = span / static_cast<double>(steps);
    const double t_begin = t;
    for (std::size_t s = 0; s < steps; ++s) {
      const double ts = t_begin + h * static_cast<double>(s);
      rhs_(ts, u, k1_);
      for (std::size_t i = 0; i < n; ++i) tmp_[i] = u[i] + 0.5 * h * k1_[i];
      rhs_(ts + 0.5 * h, tmp_, k2_);
      for (std::size_t i = 0; i < n; ++i) tmp_[i] = u[i] + 0.5 * h * k2_[i];
      rhs_(ts + 0.5 * h, tmp_, k3_);
      for (std::size_t i = 0; i < n; ++i) tmp_[i] = u[i] + h * k3_[i];
      rhs_(ts + h, tmp_, k4_);
      for (std::size_t i = 0; i < n; ++i)
        u[i] += h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
      check_state(u, ts + h, bound_);
      count_step(ts + h);
    }
    t = t_stop;
  }

  void advance_dp45(double& t, std::vector<double>& u, double t_stop) {
    const std::size_t n = u.size();
    while (t < t_stop) {
      if (!fsal_valid_) {
        rhs_(t, u, k1_);
        fsal_valid_ = true;
      }
      const double remaining = t_stop - t;
      bool last = false;
      double h = h_;
      if (h >= remaining * (1.0 - 1e-12)) {
        h = remaining;
        last = true;
      }
      const double floor = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
      if (h < floor) {
        std::ostringstream msg;
        msg << "adaptive step " << h << " below machine floor at t = " << t;
        fail(ErrorCode::StepUnderflow, msg.str());
      }
      for (std::size_t i = 0; i < n; ++i) tmp_[i] = u[i] + h * a21 * k1_[i];
      rhs_(t + c2 * h, tmp_, k2_);
      for (std::size_t i = 0; i < n; ++i) tmp_[i] = u[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
      rhs_(t + c3 * h, tmp_, k3_);
      for (std::size_t i = 0; i < n; ++i)
        tmp_[i] = u[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
      rhs_(t + c4 * h, tmp_, k4_);
      for (std::size_t i = 0; i < n; ++i)
        tmp_[i] = u[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
      rhs_(t + c5 * h, tmp_, k5_);
      for (std::size_t i = 0; i < n; ++i)
        tmp_[i] = u[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] +
                              a65 * k5_[i]);
      rhs_(t + h, tmp_, k6_);
      for (std::size_t i = 0; i < n; ++i)
        next_[i] = u[i] + h * (b1 * k1_[i] + b3 * k3_[i] + b4 * k4_[i] + b5 * k5_[i] + b6 * k6_[i]);
      rhs_(t + h, next_, k7_);

      double err = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double e = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] +
                              e6 * k6_[i] + e7 * k7_[i]);
        const double sc = cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(u[i]), std::abs(next_[i]));
        err += (e / sc) * (e / sc);
      }
      err = std::sqrt(err / static_cast<double>(n));
      if (!std::isfinite(err)) err = 1e10;
      count_step(t);

      if (err <= 1.0) {
        t = last ? t_stop : t + h;
        u.swap(next_);
        k1_.swap(k7_);
        check_state(u, t, bound_);
        const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        // A step clipped to land on t_stop says nothing about the natural size.
        if (!last || factor < 1.0) h_ = h * factor;
      } else {
        h_ = h * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
      }
    }
  }

  const RhsFn& rhs_;
  const IntegratorConfig& cfg_;
  double bound_;
  double h_ = 0.0;
  bool fsal_valid_ = false;
  std::size_t steps_ = 0;
  std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, next_;
};

}  // namespace

std::vector<State> integrate_at(const RhsFn& rhs, const State& u0, double t_start,
                                std::span<const double> times, const IntegratorConfig& cfg,
                                double bound) {
  cfg.validate();
  check_state(u0, t_start, bound);
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < t_start || (k > 0 && times[k] <= times[k - 1]))
      fail(ErrorCode::InvalidArgument, "output times must be increasing and >= t_start");
  }
  std::vector<State> out;
  out.reserve(times.size());
  Stepper stepper(rhs, u0.size(), cfg, bound);
  State u = u0;
  double t = t_start;
  for (double stop : times) {
    stepper.advance(t, u, stop);
    out.push_back(u);
  }
  return out;
}

std::vector<State> integrate_ode_at(const SystemSpec& sys, const State& u0,
                                    std::span<const double> times, const IntegratorConfig& cfg) {
  sys.validate();
  RhsFn rhs;
  std::size_t n = sys.dim;
  if (sys.kind == SystemKind::parabolic_1d) {
    n = sys.dim * cfg.space_points;
    rhs = make_parabolic_rhs(sys, cfg.space_points);
  } else {
    rhs = make_ode_rhs(sys);
  }
  if (u0.size() != n) fail(ErrorCode::DimensionMismatch, "initial state has wrong dimension");
  return integrate_at(rhs, u0, 0.0, times, cfg, blowup_bound_for(sys, cfg));
}

Signal integrate_ode(const SystemSpec& sys, const State& u0, const IntegratorConfig& cfg) {
  sys.validate();
  cfg.validate();
  if (sys.kind != SystemKind::scalar_ode && sys.kind != SystemKind::cooperative_ode)
    fail(ErrorCode::InvalidArgument, "integrate_ode requires an ODE kind");
  if (u0.size() != sys.dim) fail(ErrorCode::DimensionMismatch, "u0 has wrong dimension");
  const auto records =
      static_cast<std::size_t>(std::floor(cfg.t_end / cfg.record_dt + 1e-9));
  std::vector<double> times(records);
  for (std::size_t k = 0; k < records; ++k) times[k] = cfg.record_dt * static_cast<double>(k + 1);
  const auto states = integrate_at(make_ode_rhs(sys), u0, 0.0, times, cfg, blowup_bound_for(sys, cfg));
  std::vector<double> data;
  data.reserve((records + 1) * sys.dim);
  data.insert(data.end(), u0.begin(), u0.end());
  for (const auto& s : states) data.insert(data.end(), s.begin(), s.end());
  return Signal(0.0, cfg.record_dt, sys.dim, std::move(data));
}

}  // namespace plab::systems
