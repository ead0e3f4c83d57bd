#include <cmath>
#include <limits>

#include "plab/error.hpp"
#include "plab/systems.hpp"

namespace plab::systems {

double levitan_h(double t) noexcept { return 2.0 + std::cos(t) + std::cos(std::sqrt(2.0) * t); }

void Forcing::eval(double t, std::span<double> out) const {
  const std::size_t dim = out.size();
  for (std::size_t c = 0; c < dim && c < offsets.size(); ++c) out[c] += offsets[c];
  switch (kind) {
    case ForcingKind::trig:
      for (const auto& term : terms)
        if (term.component < dim)
          out[term.component] += term.amplitude * std::sin(term.omega * t + term.phase);
      break;
    case ForcingKind::levitan_h:
      out[component] += scale * levitan_h(t);
      break;
    case ForcingKind::levitan_phi:
      out[component] += scale / levitan_h(t);
      break;
    case ForcingKind::levitan_psi:
      out[component] += scale * std::sin(1.0 / levitan_h(t));
      break;
  }
}

double Forcing::value(double t, std::size_t c, std::size_t dim) const {
  std::vector<double> out(dim, 0.0);
  eval(t, out);
  return out[c];
}

double Forcing::lipschitz_bound(std::size_t dim) const {
  if (kind != ForcingKind::trig) return std::numeric_limits<double>::infinity();
  std::vector<double> per(dim, 0.0);
  for (const auto& term : terms)
    if (term.component < dim) per[term.component] += std::abs(term.amplitude * term.omega);
  double m = 0.0;
  for (double v : per) m = std::max(m, v);
  return m;
}

bool Forcing::is_zero() const noexcept {
  for (double o : offsets)
    if (o != 0.0) return false;
  if (kind == ForcingKind::trig) {
    for (const auto& term : terms)
      if (term.amplitude != 0.0) return false;
    return true;
  }
  return scale == 0.0;
}

Signal Forcing::sample(std::size_t dim, double tau, double t0, double t1, double dt) const {
  return Signal::sample(
      [&](double t, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        eval(t + tau, out);
      },
      t0, t1, dt, dim);
}

}  // namespace plab::systems
