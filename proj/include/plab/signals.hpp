#pragma once

// Sampled function space: uniformly sampled vector-valued signals, the shift
// flow f -> f^tau, windowed discrepancies and the Bebutov metric.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace plab::signals {

enum class Interp { linear, cubic };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const noexcept { return hi - lo; }
};

/// Finite stand-in for "all t": the closed interval [center - half_width,
/// center + half_width].
struct Window {
  double center = 0.0;
  double half_width = 1.0;

  Window() = default;
  Window(double center_, double half_width_);

  static Window from_range(double lo, double hi);

  double lo() const noexcept { return center - half_width; }
  double hi() const noexcept { return center + half_width; }
  Window translated(double tau) const { return Window(center + tau, half_width); }
};

/// Uniformly sampled function t -> R^dim on [t0, t0 + dt*(size-1)].
///
/// Samples are stored row-major (sample i occupies [i*dim, (i+1)*dim)).
/// Cubic interpolation uses a natural spline per component built at
/// construction; linear interpolation is exact for affine data. A Signal is
/// immutable once built.
class Signal {
 public:
  Signal(double t0, double dt, std::size_t dim, std::vector<double> samples,
         Interp interp = Interp::cubic);

  /// Samples fn(t, out) on the grid t0, t0+dt, ... up to t1 (inclusive within
  /// 1e-9 dt).
  static Signal sample(const std::function<void(double, std::span<double>)>& fn, double t0,
                       double t1, double dt, std::size_t dim, Interp interp = Interp::cubic);
  static Signal sample_scalar(const std::function<double(double)>& fn, double t0, double t1,
                              double dt, Interp interp = Interp::cubic);

  double t0() const noexcept { return t0_; }
  double dt() const noexcept { return dt_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return data_.size() / dim_; }
  Interp interp() const noexcept { return interp_; }

  double time(std::size_t i) const noexcept { return t0_ + dt_ * static_cast<double>(i); }
  double t_end() const noexcept { return time(size() - 1); }
  Interval domain() const noexcept { return {t0_, t_end()}; }

  std::span<const double> operator[](std::size_t i) const noexcept {
    return {data_.data() + i * dim_, dim_};
  }
  double at(std::size_t i, std::size_t c) const noexcept { return data_[i * dim_ + c]; }
  std::span<const double> data() const noexcept { return data_; }

  /// Spline second derivatives, same layout as data(); empty for linear.
  std::span<const double> curvature() const noexcept { return second_; }

  /// Interpolated value at t; throws WindowOutOfDomain outside the domain.
  void eval(double t, std::span<double> out) const;
  double eval(double t, std::size_t component) const;
  std::vector<double> eval(double t) const;

  /// sup over samples of the infinity norm.
  double sup_norm() const noexcept;
  /// max over consecutive samples of |f(t+dt)-f(t)|_inf / dt.
  double lipschitz_estimate() const noexcept;

  Signal component(std::size_t c) const;
  Signal with_interp(Interp interp) const;
  /// Grid points inside [lo, hi] (tolerance 1e-9 dt), same phase.
  Signal restrict(double lo, double hi) const;

  /// Relative tolerance used for all grid membership tests.
  static constexpr double grid_tol = 1e-9;

 private:
  void build_spline();

  double t0_;
  double dt_;
  std::size_t dim_;
  Interp interp_;
  std::vector<double> data_;
  std::vector<double> second_;
};

/// g(t) = f(t + tau) on the shrunken common domain, on f's grid phase.
Signal shift(const Signal& f, double tau);

/// D(tau) = max over grid t in w of |f(t+tau) - f(t)|_inf.
double shift_discrepancy(const Signal& f, double tau, const Window& w);

/// As shift_discrepancy, but stops scanning as soon as the running maximum
/// reaches cutoff. The returned value is exact when below cutoff and >= cutoff
/// otherwise.
double shift_discrepancy(const Signal& f, double tau, const Window& w, double cutoff);

/// sup over l in {dt, 2dt, ..., l_max} of min{max_{|t-center|<=l} |f-g|_inf, 1/l},
/// with dt taken from f.
double bebutov_distance(const Signal& f, const Signal& g, double l_max, double center);

/// bebutov_distance(shift(f, tau), f, l_max, center) without materialising the
/// shifted signal.
double bebutov_shift_distance(const Signal& f, double tau, double l_max, double center);

/// max over f's grid t in w of |f(t) - g(t)|_inf.
double sup_distance(const Signal& f, const Signal& g, const Window& w);

/// Index range [first, last] of f's grid points inside w; throws
/// WindowOutOfDomain when w is not inside f's domain.
struct IndexRange {
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t count() const noexcept { return last - first + 1; }
};
IndexRange window_indices(const Signal& f, const Window& w);

// CSV with header t,x1,...,xn and a constant step.
Signal read_csv(std::istream& in, Interp interp = Interp::cubic);
Signal read_csv_file(const std::string& path, Interp interp = Interp::cubic);
void write_csv(std::ostream& out, const Signal& f);
void write_csv_file(const std::string& path, const Signal& f);

}  // namespace plab::signals
