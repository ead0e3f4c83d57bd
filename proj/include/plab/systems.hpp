#pragma once

// Equation registry and integrators: the cocycle u(t) = phi(t, u0, f^tau) for
// scalar/cooperative ODEs, single-delay DDEs and 1-D parabolic systems with
// Neumann boundary conditions, plus finite-sample monotonicity checks.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plab/signals.hpp"

namespace plab::systems {

using signals::Signal;
using State = std::vector<double>;

/// Row-major dense matrix; small (species count squared).
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, std::vector<double> v);
  static Matrix zeros(std::size_t r, std::size_t c);
  static Matrix diagonal(std::vector<double> d);

  double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  bool empty() const noexcept { return values.empty(); }
};

// ---------------------------------------------------------------------------
// Forcing: closed-form time dependence. The hull H(f) is represented by the
// lazy shift parameter: the forcing g = f^tau is evaluated as f(t + tau).

enum class ForcingKind {
  trig,          // offset_c + sum of amplitude*sin(omega*t + phase) per component
  levitan_h,     // scale * (2 + cos t + cos sqrt(2) t)
  levitan_phi,   // scale / (2 + cos t + cos sqrt(2) t)
  levitan_psi,   // scale * sin(1 / (2 + cos t + cos sqrt(2) t))
};

struct TrigTerm {
  std::size_t component = 0;
  double amplitude = 1.0;
  double omega = 1.0;
  double phase = 0.0;
};

struct Forcing {
  ForcingKind kind = ForcingKind::trig;
  std::vector<double> offsets;   // per component, may be empty (= zeros)
  std::vector<TrigTerm> terms;   // trig only
  double scale = 1.0;            // levitan kinds
  std::size_t component = 0;     // levitan kinds: target component

  void eval(double t, std::span<double> out) const;  // out must be zeroed size dim
  double value(double t, std::size_t c, std::size_t dim) const;
  /// sup_t |d/dt f|_inf bound (closed form for trig; +inf for levitan kinds).
  double lipschitz_bound(std::size_t dim) const;
  bool is_zero() const noexcept;

  /// Samples the forcing shifted by tau: g(t) = f(t + tau) on [t0, t1].
  Signal sample(std::size_t dim, double tau, double t0, double t1, double dt) const;
};

double levitan_h(double t) noexcept;

// ---------------------------------------------------------------------------

enum class SystemKind { scalar_ode, cooperative_ode, dde_single_delay, parabolic_1d };

std::string to_string(SystemKind kind);
SystemKind system_kind_from_string(const std::string& s);

/// Right-hand side description: a registry key plus parameters.
///
/// Registry keys:
///   "linear+trig"   u' = A u + F(t)                 (ODE kinds, trig forcing)
///   "levitan-base"  u' = A u + F(t)                 (ODE kinds, levitan forcing)
///   "delay-linear"  u' = A u(t) + B u(t - r) + F(t) (dde_single_delay)
///   "rd-scalar"     u_t = nu u_xx + A u + (p0 + p1 cos(pi x / L)) F(t)
///                                                   (parabolic_1d, Neumann)
struct RhsSpec {
  std::string key = "linear+trig";
  Matrix coupling;                 // A (dim x dim)
  Matrix delayed;                  // B (dim x dim), delay-linear only
  Forcing forcing;
  double delay = 0.0;              // r
  std::vector<double> diffusivity; // nu_j, one per species
  double length = 1.0;             // L
  bool neumann = true;
  double profile_const = 1.0;      // p0
  double profile_cos = 0.0;        // p1
};

/// Axis-aligned box in which a scenario declares its state lives.
struct StateBox {
  State lo;
  State hi;

  double diameter() const;
  bool contains(std::span<const double> u, double slack = 0.0) const;
  bool empty() const noexcept { return lo.empty(); }
};

struct SystemSpec {
  SystemKind kind = SystemKind::scalar_ode;
  std::size_t dim = 1;  // species count n
  RhsSpec rhs;
  double base_shift = 0.0;  // tau selecting g = f^tau from the hull
  StateBox box;             // per species

  /// Throws ConfigInvalid when the description is inconsistent.
  void validate() const;
  /// Same system over the base point sigma(tau, g).
  SystemSpec shifted(double tau) const;
};

/// du = f(t, u) for the pointwise (non-spatial) part: ODE right-hand side, or
/// the reaction term of a parabolic system at spatial position x.
using RhsFn = std::function<void(double t, std::span<const double> u, std::span<double> du)>;
/// du = f(t, u(t), u(t - r)).
using DelayRhsFn = std::function<void(double t, std::span<const double> now,
                                      std::span<const double> delayed, std::span<double> du)>;

RhsFn make_ode_rhs(const SystemSpec& sys);
DelayRhsFn make_delay_rhs(const SystemSpec& sys);
/// Reaction term at position x (parabolic kinds).
RhsFn make_reaction_rhs(const SystemSpec& sys, double x);

// ---------------------------------------------------------------------------

enum class Method { rk4_fixed, rk45_adaptive };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct IntegratorConfig {
  Method method = Method::rk45_adaptive;
  double dt = 1e-2;        // fixed step, or initial step
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  double t_end = 10.0;
  double record_dt = 1e-2;
  std::size_t space_points = 64;
  double blowup_bound = 0.0;  // 0: 1e6 x box diameter (1e12 without box)
  std::size_t max_steps = 200'000'000;

  void validate() const;
};

/// Integrates u' = f(t, u) from t_start; returns the state at each requested
/// time (strictly increasing, >= t_start). Adaptive steps are clipped to land
/// on every requested time exactly.
std::vector<State> integrate_at(const RhsFn& rhs, const State& u0, double t_start,
                                std::span<const double> times, const IntegratorConfig& cfg,
                                double bound);

/// phi(., u0, g) on [0, t_end] sampled at record_dt.
Signal integrate_ode(const SystemSpec& sys, const State& u0, const IntegratorConfig& cfg);

/// States phi(t_k, u0, g) at the given times (ODE and parabolic kinds).
std::vector<State> integrate_ode_at(const SystemSpec& sys, const State& u0,
                                    std::span<const double> times, const IntegratorConfig& cfg);

/// Method of steps with fixed RK4 whose step divides r; delayed values read by
/// cubic Hermite interpolation of the computed solution. Returns a Signal on
/// [-r, t_end] that coincides with history on [-r, 0].
Signal integrate_dde(const SystemSpec& sys, const Signal& history, const IntegratorConfig& cfg);

/// Constant history u(theta) = c on [-r, 0], sampled on the record grid.
Signal constant_history(const SystemSpec& sys, const State& c, const IntegratorConfig& cfg);

/// n species on a uniform grid of `points` nodes x_i = i L / (points - 1).
/// Values are species-major: value(j, i) = values[j * points + i].
struct GridFunction {
  std::size_t species = 1;
  std::size_t points = 0;
  double length = 1.0;
  std::vector<double> values;

  double x(std::size_t i) const { return length * static_cast<double>(i) / static_cast<double>(points - 1); }
  double value(std::size_t j, std::size_t i) const { return values[j * points + i]; }
  /// Trapezoid-weighted spatial mean of species j (the quantity the
  /// ghost-node Neumann scheme conserves).
  double mean(std::size_t j) const;
};

/// Space-time field: a Signal of dimension species*points in GridFunction
/// layout, one sample per recorded time.
struct Field {
  Signal signal;
  std::size_t species = 1;
  std::size_t points = 0;
  double length = 1.0;

  GridFunction at(std::size_t time_index) const;
};

GridFunction make_grid_function(const SystemSpec& sys, std::size_t points,
                                const std::function<double(std::size_t species, double x)>& u0);

Field integrate_parabolic(const SystemSpec& sys, const GridFunction& u0, const IntegratorConfig& cfg);

/// Stacked method-of-lines right-hand side (second-order central Laplacian,
/// mirrored ghost nodes under Neumann).
RhsFn make_parabolic_rhs(const SystemSpec& sys, std::size_t points);

double blowup_bound_for(const SystemSpec& sys, const IntegratorConfig& cfg);

// ---------------------------------------------------------------------------
// Monotonicity checks.

struct QuasimonotoneWitness {
  double t = 0.0;
  State u;
  std::size_t i = 0;  // 0-based: d f_i / d u_j < -tol
  std::size_t j = 0;
  bool delayed = false;  // DDE: the offending dependence is on u(t - r)
  double partial = 0.0;
};

struct QuasimonotoneVerdict {
  bool pass = true;
  std::optional<QuasimonotoneWitness> witness;
  std::size_t samples = 0;
};

/// Central-difference test of d f_i / d u_j >= -tol (i != j) on a grid of
/// the box times t_probe. For DDEs the test covers the dependence on u(t)
/// (i != j) and on u(t - r) (all i, j), which is the sampled form of
/// "phi <= psi, phi_i(0) = psi_i(0) implies f_i(t, phi) <= f_i(t, psi)".
/// For parabolic systems the reaction term is tested at sampled positions.
QuasimonotoneVerdict quasimonotone_check(const SystemSpec& sys, const StateBox& box,
                                         std::span<const double> t_probe, double h);

struct OrderVerdict {
  bool ordered = true;
  double t = 0.0;
  std::size_t component = 0;
  double excess = 0.0;  // u - v - tol at the violation
};

/// ordered iff u(t) <= v(t) + tol componentwise at every sample.
OrderVerdict order_check(const Signal& u, const Signal& v, double tol);

}  // namespace plab::systems
