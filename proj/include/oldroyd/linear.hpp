#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <set>
#include <span>
#include <vector>

#include "oldroyd/model.hpp"

namespace oldroyd {

/// One Fourier mode of the linearized system
///   u_t = mu lap u + mu1 P div tau,  tau_t = mu2 D(u),
/// reduced through v = P div tau, so that per mode
///   u' = -mu |k|^2 u + mu1 v,   v' = -(mu2/2) |k|^2 u.
struct ModeState {
  Wavenumber k{};
  std::array<Complex, 3> u_hat{};
  std::array<Complex, 3> v_hat{};
  ModelParams params{};
};

using Mat2 = std::array<std::array<double, 2>, 2>;

inline double squared_norm(const Wavenumber& k) {
  return static_cast<double>(k[0]) * k[0] + static_cast<double>(k[1]) * k[1] +
         static_cast<double>(k[2]) * k[2];
}

/// Generator [[-mu k2, mu1], [-mu2 k2 / 2, 0]] acting on (u, v) per component.
inline Mat2 mode_matrix(double k2, const ModelParams& p) {
  if (!(k2 > 0.0)) throw ZeroMode();
  return {{{-p.mu * k2, p.mu1}, {-0.5 * p.mu2 * k2, 0.0}}};
}

inline Mat2 mode_matrix(const Wavenumber& k, const ModelParams& p) {
  return mode_matrix(squared_norm(k), p);
}

struct ModeEigenvalues {
  Complex plus;
  Complex minus;
  bool degenerate;
};

namespace detail {

inline constexpr double kConfluenceTolerance = 1e-12;

/// Discriminant of lambda^2 + mu k2 lambda + mu1 mu2 k2 / 2, and whether it
/// counts as zero.
inline std::pair<double, bool> mode_discriminant(double k2, const ModelParams& p) {
  const double trace = p.mu * k2;
  const double disc = trace * trace - 2.0 * p.mu1 * p.mu2 * k2;
  const bool confluent =
      disc == 0.0 || std::abs(disc) <= kConfluenceTolerance * std::max(trace * trace, 1e-300);
  return {disc, confluent};
}

}  // namespace detail

/// Roots of lambda^2 + mu k2 lambda + (mu1 mu2 / 2) k2 = 0, the per-mode
/// symbol of W_tt - mu lap W_t - (mu1 mu2 / 2) lap W = 0. Ordered by real
/// part descending (positive imaginary part first when they tie).
inline ModeEigenvalues mode_eigenvalues(double k2, const ModelParams& p) {
  if (!(k2 > 0.0)) throw ZeroMode();
  const auto [disc, confluent] = detail::mode_discriminant(k2, p);
  const double half_trace = -0.5 * p.mu * k2;
  if (confluent) return {Complex(half_trace, 0.0), Complex(half_trace, 0.0), true};
  if (disc > 0.0) {
    const double r = 0.5 * std::sqrt(disc);
    return {Complex(half_trace + r, 0.0), Complex(half_trace - r, 0.0), false};
  }
  const double w = 0.5 * std::sqrt(-disc);
  return {Complex(half_trace, w), Complex(half_trace, -w), false};
}

inline ModeEigenvalues mode_eigenvalues(const Wavenumber& k, const ModelParams& p) {
  return mode_eigenvalues(squared_norm(k), p);
}

/// exp(A t) for the mode generator A, written as
///   e^{m t} [ cosh(d t) I + sinh(d t)/d (A - m I) ],  m = tr A / 2, d^2 = disc / 4,
/// which reduces to the confluent form e^{m t} (I + t (A - m I)) at d = 0.
inline Mat2 mode_propagator(double k2, const ModelParams& p, double t) {
  const Mat2 a = mode_matrix(k2, p);
  const auto [disc, confluent] = detail::mode_discriminant(k2, p);
  const double m = -0.5 * p.mu * k2;
  double c = 0.0;  // e^{mt} cosh(dt)
  double s = 0.0;  // e^{mt} sinh(dt)/d
  if (confluent) {
    const double e = std::exp(m * t);
    c = e;
    s = e * t;
  } else if (disc > 0.0) {
    const double d = 0.5 * std::sqrt(disc);
    const double ep = std::exp((m + d) * t);
    const double em = std::exp((m - d) * t);
    c = 0.5 * (ep + em);
    s = d * t < 1.0 ? em * std::expm1(2.0 * d * t) / (2.0 * d) : (ep - em) / (2.0 * d);
  } else {
    const double w = 0.5 * std::sqrt(-disc);
    const double e = std::exp(m * t);
    c = e * std::cos(w * t);
    s = e * std::sin(w * t) / w;
  }
  return {{{c + s * (a[0][0] - m), s * a[0][1]}, {s * a[1][0], c + s * (a[1][1] - m)}}};
}

/// Exact solution of the per-mode linear system at time t.
inline ModeState propagate_mode(const ModeState& s, double t) {
  const double k2 = squared_norm(s.k);
  if (!(k2 > 0.0)) throw ZeroMode();
  if (!(t >= 0.0)) throw OutOfRange("t", "propagation time must be >= 0");
  const Mat2 e = mode_propagator(k2, s.params, t);
  ModeState out = s;
  for (std::size_t d = 0; d < 3; ++d) {
    out.u_hat[d] = e[0][0] * s.u_hat[d] + e[0][1] * s.v_hat[d];
    out.v_hat[d] = e[1][0] * s.u_hat[d] + e[1][1] * s.v_hat[d];
  }
  return out;
}

/// Scalar second-order form W'' + mu k2 W' + (mu1 mu2 / 2) k2 W = 0 solved
/// through its characteristic roots; returns W(t) for W(0) = w0, W'(0) = dw0.
inline Complex damped_wave_evolve(double k2, const ModelParams& p, Complex w0, Complex dw0,
                                  double t) {
  const ModeEigenvalues ev = mode_eigenvalues(k2, p);
  if (ev.degenerate) {
    const Complex l = ev.plus;
    return std::exp(l * t) * (w0 + (dw0 - l * w0) * t);
  }
  const Complex lp = ev.plus, lm = ev.minus;
  const Complex cp = (dw0 - lm * w0) / (lp - lm);
  const Complex cm = (lp * w0 - dw0) / (lp - lm);
  return cp * std::exp(lp * t) + cm * std::exp(lm * t);
}

/// Slowest decay rate max Re lambda_+ over the given |k|^2 values.
inline double decay_prediction(std::span<const double> k2_support, const ModelParams& p) {
  if (k2_support.empty()) throw EmptySupport();
  double rate = -std::numeric_limits<double>::infinity();
  for (double k2 : k2_support) rate = std::max(rate, mode_eigenvalues(k2, p).plus.real());
  return rate;
}

/// Reads mode k of (u, P div tau) out of a full-field state.
inline ModeState extract_mode(const OldroydState& s, const Wavenumber& k, const ModelParams& p) {
  const Grid& g = s.u.grid();
  const auto loc = g.locate(k);
  const VectorField v = projected_stress_div(s.tau);
  ModeState m;
  m.k = k;
  m.params = p;
  for (std::size_t d = 0; d < 3; ++d) {
    m.u_hat[d] = loc.conjugate ? std::conj(s.u[d][loc.index]) : s.u[d][loc.index];
    m.v_hat[d] = loc.conjugate ? std::conj(v[d][loc.index]) : v[d][loc.index];
  }
  return m;
}

struct EigenvalueRow {
  int k2;
  ModeEigenvalues eig;
};

/// Distinct |k|^2 realised by integer wavevectors with 0 < |k| <= kmax.
inline std::vector<int> shell_squares(int kmax) {
  std::set<int> shells;
  for (int a = -kmax; a <= kmax; ++a) {
    for (int b = -kmax; b <= kmax; ++b) {
      for (int c = -kmax; c <= kmax; ++c) {
        const int k2 = a * a + b * b + c * c;
        if (k2 > 0 && k2 <= kmax * kmax) shells.insert(k2);
      }
    }
  }
  return {shells.begin(), shells.end()};
}

inline std::vector<EigenvalueRow> eigenvalue_table(int kmax, const ModelParams& p) {
  std::vector<EigenvalueRow> rows;
  for (int k2 : shell_squares(kmax)) rows.push_back({k2, mode_eigenvalues(k2, p)});
  return rows;
}

}  // namespace oldroyd
