#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "plab/error.hpp"
#include "plab/recurrence.hpp"

namespace plab::recurrence {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Window samples, centered per component, with times relative to the window
// center (keeps the trigonometric design well conditioned).
struct Samples {
  std::size_t n = 0;
  std::size_t dim = 0;
  double dt = 0.0;
  std::vector<double> t;
  std::vector<std::vector<double>> x;  // per component
  double scale = 0.0;
};

Samples window_samples(const Signal& f, const Window& w) {
  const auto r = signals::window_indices(f, w);
  Samples s;
  s.n = r.count();
  s.dim = f.dim();
  s.dt = f.dt();
  s.t.resize(s.n);
  s.x.assign(s.dim, std::vector<double>(s.n));
  for (std::size_t i = 0; i < s.n; ++i) {
    s.t[i] = f.time(r.first + i) - w.center;
    for (std::size_t c = 0; c < s.dim; ++c) s.x[c][i] = f.at(r.first + i, c);
  }
  for (auto& xc : s.x) {
    const double mean = std::accumulate(xc.begin(), xc.end(), 0.0) / static_cast<double>(s.n);
    for (double& v : xc) {
      v -= mean;
      s.scale = std::max(s.scale, std::abs(v));
    }
  }
  return s;
}

// Peak of the component-summed Hann-windowed power spectrum, zero padded 4x.
// Returns the angular frequency after parabolic interpolation of log power,
// or 0 when no usable peak exists.
double spectral_peak(const std::vector<std::vector<double>>& x, double dt, const std::vector<double>& exclude) {
  const std::size_t n = x.front().size();
  const std::size_t npad = 4 * n;
  const std::size_t bins = npad / 2 + 1;
  std::vector<double> power(bins, 0.0);
  double* in = fftw_alloc_real(npad);
  fftw_complex* out = fftw_alloc_complex(bins);
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(npad), in, out, FFTW_ESTIMATE);
  for (const auto& xc : x) {
    for (std::size_t i = 0; i < npad; ++i) {
      if (i < n) {
        const double hann = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n - 1)));
        in[i] = hann * xc[i];
      } else {
        in[i] = 0.0;
      }
    }
    fftw_execute(plan);
    for (std::size_t k = 0; k < bins; ++k) power[k] += out[k][0] * out[k][0] + out[k][1] * out[k][1];
  }
  fftw_destroy_plan(plan);
  fftw_free(in);
  fftw_free(out);

  const double bin_omega = 2.0 * kPi / (static_cast<double>(npad) * dt);
  // Skip the lowest natural bin, where the mean and window leakage live.
  std::size_t best = 0;
  double best_p = 0.0;
  for (std::size_t k = 4; k + 1 < bins; ++k) {
    if (power[k] <= best_p || power[k] < power[k - 1] || power[k] < power[k + 1]) continue;
    const double omega = bin_omega * static_cast<double>(k);
    bool taken = false;
    for (double e : exclude)
      if (std::abs(omega - e) < 2.0 * bin_omega) taken = true;
    if (taken) continue;
    best = k;
    best_p = power[k];
  }
  if (best == 0 || best_p <= 0.0) return 0.0;
  const double a = std::log(power[best - 1] + 1e-300);
  const double b = std::log(power[best] + 1e-300);
  const double c = std::log(power[best + 1] + 1e-300);
  const double denom = a - 2.0 * b + c;
  const double delta = denom < 0.0 ? std::clamp(0.5 * (a - c) / denom, -0.5, 0.5) : 0.0;
  return bin_omega * (static_cast<double>(best) + delta);
}

struct LsFit {
  double sse = 0.0;
  Eigen::MatrixXd coef;  // (1 + 2k) x dim
};

Eigen::MatrixXd design(const std::vector<double>& t, const std::vector<double>& freqs,
                       std::size_t stride) {
  const std::size_t rows = (t.size() + stride - 1) / stride;
  Eigen::MatrixXd A(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(1 + 2 * freqs.size()));
  for (std::size_t r = 0; r < rows; ++r) {
    const double tt = t[r * stride];
    const auto ri = static_cast<Eigen::Index>(r);
    A(ri, 0) = 1.0;
    for (std::size_t j = 0; j < freqs.size(); ++j) {
      A(ri, static_cast<Eigen::Index>(1 + 2 * j)) = std::cos(freqs[j] * tt);
      A(ri, static_cast<Eigen::Index>(2 + 2 * j)) = std::sin(freqs[j] * tt);
    }
  }
  return A;
}

LsFit least_squares(const Samples& s, const std::vector<double>& freqs, std::size_t stride) {
  const Eigen::MatrixXd A = design(s.t, freqs, stride);
  Eigen::MatrixXd B(A.rows(), static_cast<Eigen::Index>(s.dim));
  for (Eigen::Index r = 0; r < A.rows(); ++r)
    for (std::size_t c = 0; c < s.dim; ++c)
      B(r, static_cast<Eigen::Index>(c)) = s.x[c][static_cast<std::size_t>(r) * stride];
  LsFit fit;
  fit.coef = A.colPivHouseholderQr().solve(B);
  fit.sse = (A * fit.coef - B).squaredNorm();
  return fit;
}

std::size_t stride_for(const Samples& s, const std::vector<double>& freqs) {
  double top = 0.0;
  for (double f : freqs) top = std::max(top, f);
  if (top <= 0.0) return 1;
  // Keep at least 8 samples per shortest period and 64 rows per parameter.
  auto stride = static_cast<std::size_t>(std::floor(2.0 * kPi / (8.0 * top * s.dt)));
  const std::size_t rows_needed = 64 * (1 + 2 * freqs.size());
  stride = std::min(stride, std::max<std::size_t>(1, s.n / rows_needed));
  return std::max<std::size_t>(1, stride);
}

template <class Fn>
double golden_argmin(Fn&& fn, double a, double b, int iters) {
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
  return f1 <= f2 ? x1 : x2;
}

void refine(const Samples& s, std::vector<double>& freqs, double half_width) {
  const std::size_t stride = stride_for(s, freqs);
  for (int sweep = 0; sweep < 3; ++sweep) {
    for (std::size_t j = 0; j < freqs.size(); ++j) {
      const double center = freqs[j];
      auto sse = [&](double omega) {
        std::vector<double> trial = freqs;
        trial[j] = omega;
        return least_squares(s, trial, stride).sse;
      };
      const double lo = std::max(center - half_width, 0.25 * center);
      const double best = golden_argmin(sse, lo, center + half_width, 40);
      if (sse(best) <= sse(center)) freqs[j] = best;
    }
  }
}

double sup_residual(const Samples& s, const std::vector<double>& freqs, const LsFit& fit,
                    std::vector<std::vector<double>>* residual_out) {
  const Eigen::MatrixXd A = design(s.t, freqs, 1);
  const Eigen::MatrixXd model = A * fit.coef;
  double m = 0.0;
  if (residual_out) residual_out->assign(s.dim, std::vector<double>(s.n));
  for (std::size_t c = 0; c < s.dim; ++c) {
    for (std::size_t i = 0; i < s.n; ++i) {
      const double r = s.x[c][i] - model(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
      m = std::max(m, std::abs(r));
      if (residual_out) (*residual_out)[c][i] = r;
    }
  }
  return m;
}

}  // namespace

bool rationally_dependent(double a, double b, const FitOptions& opts) {
  const double hi = std::max(std::abs(a), std::abs(b));
  const double lo = std::min(std::abs(a), std::abs(b));
  if (lo == 0.0) return true;
  const double r = hi / lo;
  double x = r;
  long h1 = 1, h2 = 0, k1 = 0, k2 = 1;
  for (int depth = 0; depth < opts.cf_depth; ++depth) {
    const double an = std::floor(x);
    if (an > 1e12) break;
    const long a_n = static_cast<long>(an);
    const long h = a_n * h1 + h2;
    const long k = a_n * k1 + k2;
    if (k > opts.cf_max_denominator) break;
    const double q = static_cast<double>(k);
    if (std::abs(r - static_cast<double>(h) / q) < std::min(opts.ratio_tol, 0.1 / (q * q))) return true;
    h2 = h1;
    h1 = h;
    k2 = k1;
    k1 = k;
    const double frac = x - an;
    if (frac <= 0.0) break;
    x = 1.0 / frac;
  }
  return false;
}

QuasiPeriodicFit quasi_periodic_fit(const Signal& f, std::size_t max_freqs, const Window& w,
                                    const FitOptions& opts) {
  const Samples s = window_samples(f, w);
  QuasiPeriodicFit out;
  if (s.scale == 0.0) {
    out.residual = 0.0;
    out.independent = true;
    return out;
  }
  if (s.n < 16 || max_freqs == 0) return out;

  const double natural_bin = 2.0 * kPi / (static_cast<double>(s.n) * s.dt);
  std::vector<double> freqs;
  std::vector<std::vector<double>> residual = s.x;
  LsFit fit;
  double best_residual = 1.0;
  for (std::size_t m = 0; m < max_freqs; ++m) {
    const double omega = spectral_peak(residual, s.dt, freqs);
    if (omega <= 0.0) break;
    freqs.push_back(omega);
    refine(s, freqs, natural_bin);
    fit = least_squares(s, freqs, 1);
    best_residual = std::min(1.0, sup_residual(s, freqs, fit, &residual) / s.scale);
    if (best_residual < opts.threshold) break;
  }
  if (freqs.empty()) return out;

  std::vector<std::size_t> order(freqs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return freqs[a] < freqs[b]; });
  for (std::size_t j : order) {
    out.freqs.push_back(freqs[j]);
    double amp = 0.0;
    for (std::size_t c = 0; c < s.dim; ++c) {
      const double a = fit.coef(static_cast<Eigen::Index>(1 + 2 * j), static_cast<Eigen::Index>(c));
      const double b = fit.coef(static_cast<Eigen::Index>(2 + 2 * j), static_cast<Eigen::Index>(c));
      amp = std::max(amp, std::hypot(a, b));
    }
    out.amplitudes.push_back(amp);
  }
  out.residual = best_residual;
  out.independent = true;
  for (std::size_t i = 0; i < out.freqs.size() && out.independent; ++i) {
    for (std::size_t j = i + 1; j < out.freqs.size(); ++j) {
      if (rationally_dependent(out.freqs[i], out.freqs[j], opts)) {
        out.independent = false;
        out.dependent_pair = std::pair{i, j};
        break;
      }
    }
  }
  return out;
}

}  // namespace plab::recurrence
