#include <algorithm>
#include <cmath>

#include "plab/error.hpp"
#include "plab/systems.hpp"

namespace plab::systems {
namespace {

// Tensor grid over the box with at most ~625 points (5 per axis in 1-4 d).
std::vector<State> box_grid(const StateBox& box) {
  const std::size_t n = box.lo.size();
  const auto per = static_cast<std::size_t>(
      std::clamp(std::floor(std::pow(625.0, 1.0 / static_cast<double>(n))), 2.0, 5.0));
  std::size_t total = 1;
  for (std::size_t d = 0; d < n; ++d) total *= per;
  std::vector<State> pts;
  pts.reserve(total);
  for (std::size_t k = 0; k < total; ++k) {
    State p(n);
    std::size_t rem = k;
    for (std::size_t d = 0; d < n; ++d) {
      const double a = static_cast<double>(rem % per) / static_cast<double>(per - 1);
      rem /= per;
      p[d] = box.lo[d] + a * (box.hi[d] - box.lo[d]);
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

QuasimonotoneVerdict quasimonotone_check(const SystemSpec& sys, const StateBox& box,
                                         std::span<const double> t_probe, double h) {
  sys.validate();
  if (box.empty() || box.lo.size() != sys.dim || box.hi.size() != sys.dim)
    fail(ErrorCode::InvalidArgument, "state box must be nonempty with dim entries");
  if (!(h > 0.0)) fail(ErrorCode::InvalidArgument, "finite-difference step must be positive");

  const std::size_t n = sys.dim;
  QuasimonotoneVerdict verdict;
  const auto grid = box_grid(box);
  State up(n), dn(n), fu(n), fd(n), f0(n);

  auto record = [&](double t, const State& u, std::size_t i, std::size_t j, bool delayed,
                    double partial) {
    verdict.pass = false;
    verdict.witness = QuasimonotoneWitness{t, u, i, j, delayed, partial};
  };

  // Pointwise right-hand side families: ODE, or reaction at sampled positions.
  std::vector<RhsFn> fields;
  if (sys.kind == SystemKind::parabolic_1d) {
    for (int q = 0; q <= 4; ++q) fields.push_back(make_reaction_rhs(sys, sys.rhs.length * q / 4.0));
  } else if (sys.kind != SystemKind::dde_single_delay) {
    fields.push_back(make_ode_rhs(sys));
  }

  for (double t : t_probe) {
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const State& u = grid[p];
      if (sys.kind == SystemKind::dde_single_delay) {
        const DelayRhsFn f = make_delay_rhs(sys);
        const State& lag = grid[grid.size() - 1 - p];
        f(t, u, lag, f0);
        const double tol = 1e-7 * std::max(1.0, inf_norm(f0));
        for (std::size_t j = 0; j < n; ++j) {
          up = u;
          dn = u;
          up[j] += h;
          dn[j] -= h;
          f(t, up, lag, fu);
          f(t, dn, lag, fd);
          for (std::size_t i = 0; i < n; ++i) {
            if (i == j) continue;
            const double d = (fu[i] - fd[i]) / (2.0 * h);
            ++verdict.samples;
            if (d < -tol) {
              record(t, u, i, j, false, d);
              return verdict;
            }
          }
          up = lag;
          dn = lag;
          up[j] += h;
          dn[j] -= h;
          f(t, u, up, fu);
          f(t, u, dn, fd);
          for (std::size_t i = 0; i < n; ++i) {
            const double d = (fu[i] - fd[i]) / (2.0 * h);
            ++verdict.samples;
            if (d < -tol) {
              record(t, u, i, j, true, d);
              return verdict;
            }
          }
        }
        continue;
      }
      for (const auto& f : fields) {
        f(t, u, f0);
        const double tol = 1e-7 * std::max(1.0, inf_norm(f0));
        for (std::size_t j = 0; j < n; ++j) {
          up = u;
          dn = u;
          up[j] += h;
          dn[j] -= h;
          f(t, up, fu);
          f(t, dn, fd);
          for (std::size_t i = 0; i < n; ++i) {
            if (i == j) continue;
            const double d = (fu[i] - fd[i]) / (2.0 * h);
            ++verdict.samples;
            if (d < -tol) {
              record(t, u, i, j, false, d);
              return verdict;
            }
          }
        }
      }
    }
  }
  return verdict;
}

OrderVerdict order_check(const Signal& u, const Signal& v, double tol) {
  if (u.dim() != v.dim()) fail(ErrorCode::DimensionMismatch, "order_check: dimensions differ");
  if (u.size() != v.size() || std::abs(u.dt() - v.dt()) > Signal::grid_tol * u.dt() ||
      std::abs(u.t0() - v.t0()) > Signal::grid_tol * u.dt())
    fail(ErrorCode::GridMismatch, "order_check: signals are on different grids");
  for (std::size_t k = 0; k < u.size(); ++k) {
    for (std::size_t c = 0; c < u.dim(); ++c) {
      const double excess = u.at(k, c) - v.at(k, c) - tol;
      if (excess > 0.0) return OrderVerdict{false, u.time(k), c, excess};
    }
  }
  return OrderVerdict{};
}

}  // namespace plab::systems
