#include <algorithm>
#include <cmath>
#include <limits>

#include "plab/error.hpp"
#include "plab/recurrence.hpp"

namespace plab::recurrence {
namespace {

constexpr double kTwoPi = 6.283185307179586;

template <class Fn>
std::pair<double, double> golden_min(Fn&& fn, double a, double b, int iters = 48) {
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
  return f1 <= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

StationaryVerdict stationary(const Signal& f, const Window& w, double rel_tol) {
  const auto r = signals::window_indices(f, w);
  StationaryVerdict v;
  double scale = 1.0;
  for (std::size_t i = r.first; i <= r.last; ++i) {
    for (std::size_t c = 0; c < f.dim(); ++c) {
      v.deviation = std::max(v.deviation, std::abs(f.at(i, c) - f.at(r.first, c)));
      scale = std::max(scale, std::abs(f.at(i, c)));
    }
  }
  v.tolerance = rel_tol * scale;
  v.verdict = v.deviation <= v.tolerance ? Tri::yes : Tri::no;
  return v;
}

double half_range(const Signal& f, const Window& w) {
  const auto r = signals::window_indices(f, w);
  double amp = 0.0;
  for (std::size_t c = 0; c < f.dim(); ++c) {
    double lo = f.at(r.first, c), hi = lo;
    for (std::size_t i = r.first; i <= r.last; ++i) {
      lo = std::min(lo, f.at(i, c));
      hi = std::max(hi, f.at(i, c));
    }
    amp = std::max(amp, 0.5 * (hi - lo));
  }
  return amp;
}

// Walks the dips of D below candidate_level * amplitude after the trivial
// run at tau = 0, refining each dip's minimum until one is within
// periodic_tol * amplitude.
PeriodicVerdict periodic(const Signal& f, const std::vector<double>& D, const TauGrid& grid,
                         const Window& w, const ClassifyConfig& cfg) {
  PeriodicVerdict v;
  const double amp = half_range(f, w);
  const double level = cfg.candidate_level * amp;
  v.tolerance = cfg.periodic_tol * amp;
  std::size_t k = 0;
  const std::size_t n = D.size();
  while (k < n && grid.at(k) <= 1e-9 * grid.step) ++k;
  while (k < n && D[k] < level) ++k;  // trivial run around tau = 0

  auto Dc = [&](double tau) { return signals::shift_discrepancy(f, tau, w); };
  double best = std::numeric_limits<double>::infinity();
  while (k < n) {
    if (D[k] >= level) {
      ++k;
      continue;
    }
    std::size_t arg = k;
    while (k < n && D[k] < level) {
      if (D[k] < D[arg]) arg = k;
      ++k;
    }
    const double tau = grid.at(arg);
    const double lo = std::max({grid.min, tau - grid.step, f.t0() - w.lo() + f.dt()});
    const double hi = std::min({grid.max, tau + grid.step, f.t_end() - w.hi() - f.dt()});
    auto [t_star, d_star] = hi > lo ? golden_min(Dc, lo, hi) : std::pair{tau, D[arg]};
    if (D[arg] <= d_star) {
      t_star = tau;
      d_star = D[arg];
    }
    if (d_star < best) {
      best = d_star;
      v.best_tau = t_star;
      v.best_discrepancy = d_star;
    }
    if (d_star < v.tolerance) {
      v.verdict = Tri::yes;
      v.period = t_star;
      v.discrepancy = d_star;
      return v;
    }
  }
  v.verdict = Tri::no;
  if (!v.best_tau) {
    // No dip at all: report the smallest non-trivial discrepancy seen.
    for (std::size_t j = 0; j < n; ++j) {
      if (grid.at(j) <= 1e-9 * grid.step) continue;
      if (!v.best_tau || D[j] < v.best_discrepancy) {
        v.best_tau = grid.at(j);
        v.best_discrepancy = D[j];
      }
    }
  }
  return v;
}

DensityVerdict density_verdict(std::vector<DensityRow> table) {
  DensityVerdict v;
  v.table = std::move(table);
  v.verdict = Tri::yes;
  for (const auto& row : v.table) {
    if (row.saturated) {
      v.verdict = Tri::no;
      v.witness_epsilon = row.epsilon;
      break;
    }
  }
  if (v.table.empty()) v.verdict = Tri::inconclusive;
  return v;
}

}  // namespace

std::string to_string(Tri t) {
  switch (t) {
    case Tri::yes: return "yes";
    case Tri::no: return "no";
    case Tri::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string RecurrenceReport::primary_class() const {
  if (stationary.verdict == Tri::yes) return "stationary";
  if (periodic.verdict == Tri::yes) return "periodic";
  if (quasi_periodic.verdict == Tri::yes) return "quasi_periodic";
  if (bohr.verdict == Tri::yes) return "bohr_ap";
  if (almost_recurrent.verdict == Tri::yes) return "almost_recurrent";
  if (poisson.verdict == Tri::yes) return "poisson";
  return "none";
}

RecurrenceReport classify(const Signal& f, const Signal* base, const ClassifyConfig& cfg) {
  cfg.grid.validate();
  RecurrenceReport rep;
  rep.window = cfg.window;
  rep.grid = cfg.grid;
  const Window& w = cfg.window;

  rep.stationary = stationary(f, w, cfg.stationary_tol);
  const auto D = discrepancy_profile(f, cfg.grid, w);

  if (rep.stationary.verdict == Tri::yes) {
    rep.periodic.verdict = Tri::yes;
    rep.periodic.period = cfg.grid.step;
    rep.quasi_periodic.verdict = Tri::yes;
    rep.quasi_periodic.from_period = true;
    rep.quasi_periodic.fit.residual = 0.0;
    rep.quasi_periodic.fit.independent = true;
  } else {
    rep.periodic = periodic(f, D, cfg.grid, w, cfg);
    rep.quasi_periodic.fit = quasi_periodic_fit(f, cfg.max_freqs, w, cfg.fit);
    if (rep.periodic.verdict == Tri::yes) {
      rep.quasi_periodic.verdict = Tri::yes;
      rep.quasi_periodic.from_period = true;
      auto& fit = rep.quasi_periodic.fit;
      const double omega = kTwoPi / rep.periodic.period;
      double amp = 0.0;
      for (std::size_t j = 0; j < fit.freqs.size(); ++j)
        if (std::abs(fit.freqs[j] - omega) < 0.05 * omega) amp = fit.amplitudes[j];
      fit.freqs = {omega};
      fit.amplitudes = {amp};
      fit.independent = true;
      fit.dependent_pair.reset();
    } else {
      const auto& fit = rep.quasi_periodic.fit;
      rep.quasi_periodic.verdict =
          (!fit.freqs.empty() && fit.residual < cfg.fit.threshold && fit.independent) ? Tri::yes : Tri::no;
    }
  }

  rep.bohr = density_verdict(density_table_from_profile(D, cfg.bohr_epsilons, cfg.grid, w));
  const auto B = bebutov_profile(f, cfg.grid, w);
  rep.almost_recurrent = density_verdict(density_table_from_profile(B, cfg.bohr_epsilons, cfg.grid, w));
  if (rep.bohr.verdict == Tri::yes && rep.almost_recurrent.verdict != Tri::yes) {
    rep.almost_recurrent.verdict = Tri::yes;
    rep.almost_recurrent.implied = true;
    rep.almost_recurrent.witness_epsilon.reset();
  }

  ReturnSearch search = cfg.returns;
  if (search.t_max <= 0.0) search.t_max = std::min(cfg.grid.max, f.t_end() - w.hi() - f.dt());
  rep.poisson.returns = poisson_returns(f, cfg.return_schedule, w, search);
  const std::size_t found = rep.poisson.returns.size();
  rep.poisson.verdict = found >= cfg.min_returns ? Tri::yes : (found == 0 ? Tri::no : Tri::inconclusive);

  rep.pseudo_recurrent.flag =
      rep.poisson.verdict == Tri::yes && rep.almost_recurrent.verdict == Tri::yes;

  if (base) {
    ComparabilityEvidence ev;
    const auto Dy = discrepancy_profile(*base, cfg.grid, w);
    ev.profile = comparability_from_profiles(f, *base, D, Dy, cfg.compare_epsilons, cfg.grid, w);
    for (double c : cfg.extra_centers) {
      const Window wc(c, w.half_width);
      ev.shifted_centers.push_back(comparability_profile(f, *base, cfg.compare_epsilons, cfg.grid, wc));
    }
    if (ev.profile.verdict == ProfileVerdict::comparable_evidence) {
      const RecurrenceReport base_rep = classify(*base, nullptr, cfg);
      if (base_rep.stationary.verdict == Tri::yes) ev.transferred.push_back("stationary");
      if (base_rep.periodic.verdict == Tri::yes) ev.transferred.push_back("periodic");
      if (base_rep.bohr.verdict == Tri::yes) ev.transferred.push_back("levitan_ap");
      if (base_rep.almost_recurrent.verdict == Tri::yes) ev.transferred.push_back("almost_recurrent");
      if (base_rep.poisson.verdict == Tri::yes) ev.transferred.push_back("poisson");
      ev.levitan_evidence = base_rep.bohr.verdict == Tri::yes;
    }
    rep.comparability = std::move(ev);
  }
  return rep;
}

}  // namespace plab::recurrence
