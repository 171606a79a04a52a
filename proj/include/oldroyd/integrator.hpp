#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "oldroyd/spectral/transform.hpp"

namespace oldroyd {

struct IntegratorConfig {
  double dt = 0.005;
  double t_end = 50.0;
  double cfl_limit = 0.5;
  int diag_interval = 10;

  void validate() const {
    if (!(dt > 0.0)) throw OutOfRange("time.dt", "must be > 0");
    if (!(t_end > 0.0)) throw OutOfRange("time.t_end", "must be > 0");
    if (!(cfl_limit > 0.0)) throw OutOfRange("time.cfl_limit", "must be > 0");
    if (diag_interval < 1) throw OutOfRange("time.diag_interval", "must be >= 1");
  }

  long steps() const { return std::lround(t_end / dt); }
};

/// A system split as d/dt x = viscosity * lap(u) + explicit_rhs(x), where
/// the state exposes fields() as a tuple whose first entry is the velocity.
template <class S>
concept SplitSystem = requires(const S& s, const typename S::State& x) {
  { s.explicit_rhs(x) } -> std::same_as<typename S::State>;
  { s.viscosity() } -> std::convertible_to<double>;
};

/// max |u| over the base-grid samples.
inline double max_speed(const VectorField& u) {
  const PhysicalField<3> p = transform_inverse(u);
  double vmax = 0.0;
  for (std::size_t i = 0; i < p.comp[0].size(); ++i) {
    const double s = p.comp[0][i] * p.comp[0][i] + p.comp[1][i] * p.comp[1][i] +
                     p.comp[2][i] * p.comp[2][i];
    vmax = std::max(vmax, s);
  }
  return std::sqrt(vmax);
}

inline double cfl_number(const VectorField& u, double dt) {
  return dt * max_speed(u) / u.grid().spacing();
}

namespace detail {

template <class State, class Fn>
void zip_fields(State& a, const State& b, Fn&& fn) {
  auto ta = a.fields();
  auto tb = b.fields();
  constexpr std::size_t kN = std::tuple_size_v<decltype(ta)>;
  [&]<std::size_t... I>(std::index_sequence<I...>) {
    (fn(std::get<I>(ta), std::get<I>(tb)), ...);
  }(std::make_index_sequence<kN>{});
}

/// y += s * x
template <class State>
void axpy(State& y, double s, const State& x) {
  zip_fields(y, x, [s](auto& fy, const auto& fx) { fy.add_scaled(s, fx); });
}

template <class State>
void damp_velocity(State& x, const std::vector<double>& factor) {
  auto& u = std::get<0>(x.fields());
  for (std::size_t c = 0; c < 3; ++c) {
    auto& a = u[c];
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= factor[i];
  }
}

template <class State>
bool state_finite(const State& x) {
  bool ok = true;
  std::apply([&ok](const auto&... f) { ok = (f.all_finite() && ...); }, x.fields());
  return ok;
}

}  // namespace detail

/// Per-mode viscous factors exp(-mu |k|^2 dt/2) and exp(-mu |k|^2 dt).
struct ViscousFactors {
  std::vector<double> half;
  std::vector<double> full;

  ViscousFactors(const Grid& g, double mu, double dt)
      : half(g.spectral_size()), full(g.spectral_size()) {
    for (std::size_t i = 0; i < half.size(); ++i) {
      half[i] = std::exp(-0.5 * mu * g.k2(i) * dt);
      full[i] = std::exp(-mu * g.k2(i) * dt);
    }
  }
};

/// One integrating-factor RK4 (Lawson) step. The viscous term is propagated
/// exactly per mode; every other term is evaluated explicitly at the stages.
template <SplitSystem S>
typename S::State if_rk4_step(const S& sys, const typename S::State& x, double dt,
                              const ViscousFactors& ef) {
  using State = typename S::State;

  const State k1 = sys.explicit_rhs(x);

  State a = x;
  detail::axpy(a, 0.5 * dt, k1);
  detail::damp_velocity(a, ef.half);
  const State k2 = sys.explicit_rhs(a);

  State b = x;
  detail::damp_velocity(b, ef.half);
  detail::axpy(b, 0.5 * dt, k2);
  const State k3 = sys.explicit_rhs(b);

  State c = x;
  detail::damp_velocity(c, ef.full);
  State k3h = k3;
  detail::damp_velocity(k3h, ef.half);
  detail::axpy(c, dt, k3h);
  const State k4 = sys.explicit_rhs(c);

  State acc = k1;
  detail::damp_velocity(acc, ef.full);
  State mid = k2;
  detail::axpy(mid, 1.0, k3);
  detail::damp_velocity(mid, ef.half);
  detail::axpy(acc, 2.0, mid);
  detail::axpy(acc, 1.0, k4);

  State out = x;
  detail::damp_velocity(out, ef.full);
  detail::axpy(out, dt / 6.0, acc);
  return out;
}

/// Checked step: aborts with CflViolation before stepping when
/// dt max|u| / h exceeds cfl_limit, and with NonFinite after it.
template <SplitSystem S>
typename S::State step(const S& sys, const typename S::State& x, double dt,
                       double cfl_limit = 0.5) {
  const auto& u = std::get<0>(x.fields());
  const double cfl = cfl_number(u, dt);
  if (cfl > cfl_limit) throw CflViolation(cfl, cfl_limit);
  const ViscousFactors ef(u.grid(), sys.viscosity(), dt);
  auto out = if_rk4_step(sys, x, dt, ef);
  if (!detail::state_finite(out)) throw NonFinite("state has NaN/Inf coefficients after step");
  return out;
}

/// Advances from t = 0 to cfg.t_end, calling observe(step, t, state, cfl)
/// at step 0, every diag_interval steps, and at the final step.
template <SplitSystem S, class Observer>
typename S::State integrate(const S& sys, typename S::State x, const IntegratorConfig& cfg,
                            Observer&& observe) {
  cfg.validate();
  const auto& u0 = std::get<0>(x.fields());
  const ViscousFactors ef(u0.grid(), sys.viscosity(), cfg.dt);
  const long n = cfg.steps();
  double cfl = cfl_number(u0, cfg.dt);
  observe(0L, 0.0, x, cfl);
  for (long s = 1; s <= n; ++s) {
    if (cfl > cfg.cfl_limit) throw CflViolation(cfl, cfg.cfl_limit);
    x = if_rk4_step(sys, x, cfg.dt, ef);
    if (!detail::state_finite(x)) {
      throw NonFinite("state has NaN/Inf coefficients at step " + std::to_string(s));
    }
    cfl = cfl_number(std::get<0>(x.fields()), cfg.dt);
    if (s % cfg.diag_interval == 0 || s == n) observe(s, s * cfg.dt, x, cfl);
  }
  return x;
}

template <SplitSystem S>
typename S::State integrate(const S& sys, typename S::State x, const IntegratorConfig& cfg) {
  return integrate(sys, std::move(x), cfg, [](long, double, const auto&, double) {});
}

struct OrderEstimate {
  double order;
  /// Some error fell to the round-off floor, so the slope is meaningless.
  bool floor_reached;
};

/// Least-squares slope of log(error) against log(dt).
inline OrderEstimate observed_order(std::span<const double> dts, std::span<const double> errors,
                                    double floor = 1e-13) {
  if (dts.size() != errors.size() || dts.size() < 2) {
    throw SizeMismatch("observed_order needs >= 2 matching (dt, error) pairs");
  }
  for (double e : errors) {
    if (!(e > floor)) return {std::numeric_limits<double>::quiet_NaN(), true};
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(dts.size());
  for (std::size_t i = 0; i < dts.size(); ++i) {
    const double x = std::log(dts[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return {(n * sxy - sx * sy) / (n * sxx - sx * sx), false};
}

/// Runs error_of(dt) for each dt and fits the observed order.
template <class ErrorFn>
OrderEstimate convergence_order(ErrorFn&& error_of, std::span<const double> dts,
                                double floor = 1e-13) {
  std::vector<double> errors;
  errors.reserve(dts.size());
  for (double dt : dts) errors.push_back(error_of(dt));
  return observed_order(dts, errors, floor);
}

/// Self-convergence order from three solutions at dt, dt/r, dt/r^2:
/// p = log(|x_dt - x_dt/r| / |x_dt/r - x_dt/r^2|) / log r.
inline double richardson_order(double diff_coarse, double diff_fine, double ratio = 2.0) {
  return std::log(diff_coarse / diff_fine) / std::log(ratio);
}

}  // namespace oldroyd
