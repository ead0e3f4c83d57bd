#pragma once

#include <cmath>
#include <cstddef>

#include "plab/signals.hpp"

namespace plab::signals::detail {

// Evaluates f(t_i + tau) at f's own grid points t_i. Every grid point shares
// the same fractional offset, so the interpolation weights are computed once.
class ShiftView {
 public:
  ShiftView(const Signal& f, double tau) : f_(f) {
    const double offset = tau / f.dt();
    double whole = std::floor(offset);
    double frac = offset - whole;
    if (frac < Signal::grid_tol) {
      frac = 0.0;
    } else if (frac > 1.0 - Signal::grid_tol) {
      frac = 0.0;
      whole += 1.0;
    }
    k_ = static_cast<long>(whole);
    a_ = frac;
    const double b = 1.0 - a_;
    const double h2 = f.dt() * f.dt() / 6.0;
    w0_ = b;
    w1_ = a_;
    c0_ = (b * b * b - b) * h2;
    c1_ = (a_ * a_ * a_ - a_) * h2;
    cubic_ = f.interp() == Interp::cubic && !f.curvature().empty();
  }

  long offset() const noexcept { return k_; }
  bool exact() const noexcept { return a_ == 0.0; }

  // Valid i satisfy lo() <= i <= hi() (signed; may be empty).
  long lo() const noexcept { return -k_; }
  long hi() const noexcept {
    return static_cast<long>(f_.size()) - 1 - k_ - (exact() ? 0 : 1);
  }

  double value(std::size_t i, std::size_t c) const noexcept {
    const std::size_t j = static_cast<std::size_t>(static_cast<long>(i) + k_);
    const std::size_t d = f_.dim();
    const double* y = f_.data().data();
    if (exact()) return y[j * d + c];
    double v = w0_ * y[j * d + c] + w1_ * y[(j + 1) * d + c];
    if (cubic_) {
      const double* m = f_.curvature().data();
      v += c0_ * m[j * d + c] + c1_ * m[(j + 1) * d + c];
    }
    return v;
  }

 private:
  const Signal& f_;
  long k_ = 0;
  double a_ = 0.0;
  double w0_ = 1.0, w1_ = 0.0, c0_ = 0.0, c1_ = 0.0;
  bool cubic_ = false;
};

}  // namespace plab::signals::detail
