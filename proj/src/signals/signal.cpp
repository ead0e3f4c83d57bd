#include <algorithm>
#include <cmath>
#include <sstream>

#include "plab/error.hpp"
#include "plab/signals.hpp"
#include "signals/shift_view.hpp"

namespace plab::signals {

Window::Window(double center_, double half_width_) : center(center_), half_width(half_width_) {
  if (!(half_width > 0.0) || !std::isfinite(half_width) || !std::isfinite(center))
    fail(ErrorCode::InvalidArgument, "window half_width must be positive and finite");
}

Window Window::from_range(double lo, double hi) { return Window(0.5 * (lo + hi), 0.5 * (hi - lo)); }

Signal::Signal(double t0, double dt, std::size_t dim, std::vector<double> samples, Interp interp)
    : t0_(t0), dt_(dt), dim_(dim), interp_(interp), data_(std::move(samples)) {
  if (!(dt_ > 0.0) || !std::isfinite(dt_) || !std::isfinite(t0_))
    fail(ErrorCode::InvalidArgument, "signal step must be positive and finite");
  if (dim_ == 0) fail(ErrorCode::InvalidArgument, "signal dimension must be positive");
  if (data_.empty()) fail(ErrorCode::InvalidArgument, "signal needs at least one sample");
  if (data_.size() % dim_ != 0)
    fail(ErrorCode::DimensionMismatch, "sample buffer is not a multiple of dim");
  for (double v : data_)
    if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "signal samples must be finite");
  if (interp_ == Interp::cubic) build_spline();
}

// Natural cubic spline with unit-spaced knots scaled by dt: solves
// M_{i-1} + 4 M_i + M_{i+1} = 6 (y_{i+1} - 2 y_i + y_{i-1}) / dt^2, M_0 = M_{n-1} = 0.
void Signal::build_spline() {
  const std::size_t n = size();
  if (n < 3) return;
  second_.assign(data_.size(), 0.0);
  const double scale = 6.0 / (dt_ * dt_);
  const std::size_t m = n - 2;
  std::vector<double> cprime(m);
  std::vector<double> dprime(m);
  for (std::size_t c = 0; c < dim_; ++c) {
    auto y = [&](std::size_t i) { return data_[i * dim_ + c]; };
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t i = k + 1;
      const double rhs = scale * (y(i + 1) - 2.0 * y(i) + y(i - 1));
      const double sub = (k == 0) ? 0.0 : 1.0;
      const double denom = 4.0 - sub * (k == 0 ? 0.0 : cprime[k - 1]);
      cprime[k] = 1.0 / denom;
      dprime[k] = (rhs - sub * (k == 0 ? 0.0 : dprime[k - 1])) / denom;
    }
    for (std::size_t k = m; k-- > 0;) {
      const double next = (k + 1 < m) ? second_[(k + 2) * dim_ + c] : 0.0;
      second_[(k + 1) * dim_ + c] = dprime[k] - cprime[k] * next;
    }
  }
}

Signal Signal::sample(const std::function<void(double, std::span<double>)>& fn, double t0,
                      double t1, double dt, std::size_t dim, Interp interp) {
  if (!(dt > 0.0)) fail(ErrorCode::InvalidArgument, "sampling step must be positive");
  if (t1 < t0) fail(ErrorCode::InvalidArgument, "sampling interval is reversed");
  const auto n = static_cast<std::size_t>(std::floor((t1 - t0) / dt + grid_tol)) + 1;
  std::vector<double> data(n * dim);
  for (std::size_t i = 0; i < n; ++i)
    fn(t0 + dt * static_cast<double>(i), std::span<double>(data.data() + i * dim, dim));
  return Signal(t0, dt, dim, std::move(data), interp);
}

Signal Signal::sample_scalar(const std::function<double(double)>& fn, double t0, double t1,
                             double dt, Interp interp) {
  return sample([&](double t, std::span<double> out) { out[0] = fn(t); }, t0, t1, dt, 1, interp);
}

void Signal::eval(double t, std::span<double> out) const {
  const std::size_t n = size();
  double s = (t - t0_) / dt_;
  if (s < -grid_tol || s > static_cast<double>(n - 1) + grid_tol) {
    std::ostringstream msg;
    msg << "t = " << t << " outside signal domain [" << t0_ << ", " << t_end() << "]";
    fail(ErrorCode::WindowOutOfDomain, msg.str());
  }
  if (n == 1) {
    std::copy_n(data_.begin(), dim_, out.begin());
    return;
  }
  s = std::clamp(s, 0.0, static_cast<double>(n - 1));
  auto j = static_cast<std::size_t>(std::floor(s));
  if (j >= n - 1) j = n - 2;
  const double a = s - static_cast<double>(j);
  const double b = 1.0 - a;
  const bool cubic = !second_.empty();
  const double h2 = dt_ * dt_ / 6.0;
  for (std::size_t c = 0; c < dim_; ++c) {
    double v = b * data_[j * dim_ + c] + a * data_[(j + 1) * dim_ + c];
    if (cubic)
      v += ((b * b * b - b) * second_[j * dim_ + c] + (a * a * a - a) * second_[(j + 1) * dim_ + c]) *
           h2;
    out[c] = v;
  }
}

double Signal::eval(double t, std::size_t component) const {
  std::vector<double> v(dim_);
  eval(t, v);
  return v[component];
}

std::vector<double> Signal::eval(double t) const {
  std::vector<double> v(dim_);
  eval(t, v);
  return v;
}

double Signal::sup_norm() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Signal::lipschitz_estimate() const noexcept {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < size(); ++i)
    for (std::size_t c = 0; c < dim_; ++c)
      m = std::max(m, std::abs(at(i + 1, c) - at(i, c)));
  return m / dt_;
}

Signal Signal::component(std::size_t c) const {
  if (c >= dim_) fail(ErrorCode::DimensionMismatch, "component index out of range");
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = at(i, c);
  return Signal(t0_, dt_, 1, std::move(out), interp_);
}

Signal Signal::with_interp(Interp interp) const { return Signal(t0_, dt_, dim_, data_, interp); }

Signal Signal::restrict(double lo, double hi) const {
  const auto r = window_indices(*this, Window::from_range(lo, hi));
  std::vector<double> out(data_.begin() + static_cast<long>(r.first * dim_),
                          data_.begin() + static_cast<long>((r.last + 1) * dim_));
  return Signal(time(r.first), dt_, dim_, std::move(out), interp_);
}

IndexRange window_indices(const Signal& f, const Window& w) {
  const double tol = Signal::grid_tol;
  const double lo = (w.lo() - f.t0()) / f.dt();
  const double hi = (w.hi() - f.t0()) / f.dt();
  const auto last_index = static_cast<double>(f.size() - 1);
  if (lo < -tol || hi > last_index + tol || f.size() < 2) {
    std::ostringstream msg;
    msg << "window [" << w.lo() << ", " << w.hi() << "] not inside domain [" << f.t0() << ", "
        << f.t_end() << "]";
    fail(ErrorCode::WindowOutOfDomain, msg.str());
  }
  const double first = std::max(0.0, std::ceil(lo - tol));
  const double last = std::min(last_index, std::floor(hi + tol));
  if (first > last) fail(ErrorCode::WindowOutOfDomain, "window contains no grid point");
  return {static_cast<std::size_t>(first), static_cast<std::size_t>(last)};
}

Signal shift(const Signal& f, double tau) {
  const double length = f.domain().length();
  if (!(std::abs(tau) < length) && !(tau == 0.0))
    fail(ErrorCode::ShiftOutOfDomain, "|tau| must be smaller than the domain length");
  detail::ShiftView view(f, tau);
  const long lo = std::max(0L, view.lo());
  const long hi = std::min(static_cast<long>(f.size()) - 1, view.hi());
  if (lo > hi) fail(ErrorCode::ShiftOutOfDomain, "shifted domain is empty");
  const std::size_t dim = f.dim();
  std::vector<double> out(static_cast<std::size_t>(hi - lo + 1) * dim);
  for (long i = lo; i <= hi; ++i)
    for (std::size_t c = 0; c < dim; ++c)
      out[static_cast<std::size_t>(i - lo) * dim + c] = view.value(static_cast<std::size_t>(i), c);
  return Signal(f.time(static_cast<std::size_t>(lo)), f.dt(), dim, std::move(out), f.interp());
}

}  // namespace plab::signals
