#include <cmath>
#include <sstream>

#include "plab/error.hpp"
#include "plab/systems.hpp"

namespace plab::systems {
namespace {

void require_parabolic(const SystemSpec& sys, std::size_t points) {
  sys.validate();
  if (sys.kind != SystemKind::parabolic_1d)
    fail(ErrorCode::InvalidArgument, "parabolic integration requires parabolic_1d");
  if (points < 8) {
    std::ostringstream msg;
    msg << "space_points = " << points << " < 8";
    fail(ErrorCode::GridTooCoarse, msg.str());
  }
}

}  // namespace

double GridFunction::mean(std::size_t j) const {
  double s = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double w = (i == 0 || i + 1 == points) ? 0.5 : 1.0;
    s += w * value(j, i);
  }
  return s / static_cast<double>(points - 1);
}

GridFunction Field::at(std::size_t time_index) const {
  const auto row = signal[time_index];
  return GridFunction{species, points, length, std::vector<double>(row.begin(), row.end())};
}

GridFunction make_grid_function(const SystemSpec& sys, std::size_t points,
                                const std::function<double(std::size_t, double)>& u0) {
  require_parabolic(sys, points);
  GridFunction g{sys.dim, points, sys.rhs.length, std::vector<double>(sys.dim * points)};
  for (std::size_t j = 0; j < sys.dim; ++j)
    for (std::size_t i = 0; i < points; ++i) g.values[j * points + i] = u0(j, g.x(i));
  return g;
}

RhsFn make_parabolic_rhs(const SystemSpec& sys, std::size_t points) {
  require_parabolic(sys, points);
  const std::size_t n = sys.dim;
  const double L = sys.rhs.length;
  const double dx = L / static_cast<double>(points - 1);
  std::vector<double> coef(n);
  for (std::size_t j = 0; j < n; ++j) coef[j] = sys.rhs.diffusivity[j] / (dx * dx);
  const double pi = std::acos(-1.0);
  std::vector<double> profile(points);
  for (std::size_t i = 0; i < points; ++i)
    profile[i] = sys.rhs.profile_const +
                 sys.rhs.profile_cos * std::cos(pi * static_cast<double>(i) * dx / L);

  return [n, points, coef, profile, A = sys.rhs.coupling, F = sys.rhs.forcing,
          tau = sys.base_shift, neumann = sys.rhs.neumann](
             double t, std::span<const double> u, std::span<double> du) {
    const std::size_t P = points;
    std::vector<double> forcing(n, 0.0);
    F.eval(t + tau, forcing);
    for (std::size_t j = 0; j < n; ++j) {
      const double* uj = u.data() + j * P;
      double* dj = du.data() + j * P;
      for (std::size_t i = 1; i + 1 < P; ++i) dj[i] = coef[j] * (uj[i - 1] - 2.0 * uj[i] + uj[i + 1]);
      // Mirrored ghost nodes u_{-1} = u_1 and u_P = u_{P-2}.
      dj[0] = 2.0 * coef[j] * (uj[1] - uj[0]);
      dj[P - 1] = 2.0 * coef[j] * (uj[P - 2] - uj[P - 1]);
      for (std::size_t i = 0; i < P; ++i) {
        double react = profile[i] * forcing[j];
        if (!A.empty())
          for (std::size_t k = 0; k < n; ++k) react += A(j, k) * u[k * P + i];
        dj[i] += react;
      }
      if (!neumann) dj[0] = dj[P - 1] = 0.0;
    }
  };
}

Field integrate_parabolic(const SystemSpec& sys, const GridFunction& u0, const IntegratorConfig& cfg) {
  cfg.validate();
  require_parabolic(sys, cfg.space_points);
  if (u0.species != sys.dim || u0.points != cfg.space_points ||
      u0.values.size() != sys.dim * cfg.space_points)
    fail(ErrorCode::DimensionMismatch, "initial grid function does not match the system grid");
  const auto records = static_cast<std::size_t>(std::floor(cfg.t_end / cfg.record_dt + 1e-9));
  std::vector<double> times(records);
  for (std::size_t k = 0; k < records; ++k) times[k] = cfg.record_dt * static_cast<double>(k + 1);
  const auto states = integrate_at(make_parabolic_rhs(sys, cfg.space_points), u0.values, 0.0, times,
                                   cfg, blowup_bound_for(sys, cfg));
  std::vector<double> data(u0.values);
  data.reserve((records + 1) * u0.values.size());
  for (const auto& s : states) data.insert(data.end(), s.begin(), s.end());
  return Field{Signal(0.0, cfg.record_dt, u0.values.size(), std::move(data)), sys.dim,
               cfg.space_points, sys.rhs.length};
}

}  // namespace plab::systems
