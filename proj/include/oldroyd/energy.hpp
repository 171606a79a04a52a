#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "oldroyd/model.hpp"

namespace oldroyd {

/// H^s norm of |grad|^prefix f via Parseval:
///   inhomogeneous: sum_k |k|^{2 prefix} (sum_{j=0..s} |k|^{2j}) |f_k|^2
///   homogeneous:   sum_k |k|^{2 prefix} |k|^{2s} |f_k|^2
/// times the box volume, square-rooted. grad^j f is the full tensor of
/// j-th derivatives, so prefix = j gives ||grad^j f||_{H^s}. When the total
/// order is negative the k = 0 mode is skipped (its value is reported
/// separately as the field mean).
template <std::size_t C>
double sobolev_norm(const Field<C>& f, int s, int prefix = 0, bool homogeneous = false) {
  if (!homogeneous && s < 0) throw OutOfRange("s", "inhomogeneous norms need s >= 0");
  const Grid& g = f.grid();
  const auto w = frobenius_weights<C>();
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double k2 = g.k2(i);
    double weight = 0.0;
    if (k2 == 0.0) {
      // only |k|^0 survives at k = 0
      if (prefix != 0 || (homogeneous && s != 0)) continue;
      weight = 1.0;
    } else {
      const double pre = std::pow(k2, prefix);
      if (homogeneous) {
        weight = pre * std::pow(k2, s);
      } else {
        double sum = 0.0, kp = 1.0;
        for (int j = 0; j <= s; ++j, kp *= k2) sum += kp;
        weight = pre * sum;
      }
    }
    double amp = 0.0;
    for (std::size_t c = 0; c < C; ++c) amp += w[c] * std::norm(f[c][i]);
    total += g.hermitian_weight(i) * weight * amp;
  }
  return std::sqrt(g.volume() * total);
}

/// ||f||^2_{H^s dot} / (||f||_{H^{s-1} dot} ||f||_{H^{s+1} dot}); Cauchy-Schwarz
/// in mode space bounds it by 1.
template <std::size_t C>
double interpolation_check(const Field<C>& f, int s) {
  detail::require_mean_zero(f, "interpolation_check");
  const double mid = sobolev_norm(f, s, 0, true);
  const double lo = sobolev_norm(f, s - 1, 0, true);
  const double hi = sobolev_norm(f, s + 1, 0, true);
  if (lo == 0.0 || hi == 0.0) return 0.0;
  return mid * mid / (lo * hi);
}

/// Instantaneous norms entering the energies, in CSV column order.
enum class Norm : std::size_t {
  InvU_H3,         // || |grad|^{-1} u ||_{H^3}
  InvTau_H3,       // || |grad|^{-1} tau ||_{H^3}
  U_H3,            // || u ||_{H^3}
  U_H2,            // || u ||_{H^2}
  GradU_H2,        // || grad u ||_{H^2}
  GradU_H1,        // || grad u ||_{H^1}
  Grad2U_H1,       // || grad^2 u ||_{H^1}
  InvPdivTau_H2,   // || |grad|^{-1} P div tau ||_{H^2}
  PdivTau_H1,      // || P div tau ||_{H^1}
  GradPdivTau_L2,  // || grad P div tau ||_{L^2}
};
inline constexpr std::size_t kNormCount = 10;

inline constexpr std::array<std::string_view, kNormCount> kNormNames = {
    "inv_u_h3",  "inv_tau_h3",  "u_h3",         "u_h2",        "grad_u_h2",
    "grad_u_h1", "grad2_u_h1",  "inv_pdivtau_h2", "pdivtau_h1", "grad_pdivtau_l2"};

struct EnergyRecord {
  double t = 0.0;
  std::array<double, kNormCount> norms{};
  /// Frobenius norm of the k = 0 mode of tau.
  double tau_mean = 0.0;
  /// Trapezoid time integrals of the E0, E1, E2 integrands up to t.
  std::array<double, 3> integrals{};
  double e0 = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;

  double operator[](Norm n) const { return norms[static_cast<std::size_t>(n)]; }
};

inline EnergyRecord measure(const VectorField& u, const SymTensorField& tau, double t) {
  EnergyRecord r;
  r.t = t;
  const VectorField v = projected_stress_div(tau);
  auto set = [&r](Norm n, double value) { r.norms[static_cast<std::size_t>(n)] = value; };
  set(Norm::InvU_H3, sobolev_norm(u, 3, -1));
  set(Norm::InvTau_H3, sobolev_norm(tau, 3, -1));
  set(Norm::U_H3, sobolev_norm(u, 3));
  set(Norm::U_H2, sobolev_norm(u, 2));
  set(Norm::GradU_H2, sobolev_norm(u, 2, 1));
  set(Norm::GradU_H1, sobolev_norm(u, 1, 1));
  set(Norm::Grad2U_H1, sobolev_norm(u, 1, 2));
  set(Norm::InvPdivTau_H2, sobolev_norm(v, 2, -1));
  set(Norm::PdivTau_H1, sobolev_norm(v, 1));
  set(Norm::GradPdivTau_L2, sobolev_norm(v, 0, 1));
  const auto w = frobenius_weights<6>();
  double m2 = 0.0;
  for (std::size_t c = 0; c < 6; ++c) m2 += w[c] * std::norm(tau.mean(c));
  r.tau_mean = std::sqrt(m2);
  return r;
}

inline double sq(double x) { return x * x; }

/// Quantities under the running sup in E0, E1, E2.
inline std::array<double, 3> sup_terms(const EnergyRecord& r) {
  const double w1 = 1.0 + r.t;
  return {sq(r[Norm::InvU_H3]) + sq(r[Norm::InvTau_H3]),
          w1 * (sq(r[Norm::U_H2]) + 2.0 * sq(r[Norm::InvPdivTau_H2])),
          w1 * w1 * (sq(r[Norm::GradU_H1]) + 2.0 * sq(r[Norm::PdivTau_H1]))};
}

/// Integrands of the time integrals in E0, E1, E2.
inline std::array<double, 3> integrands(const EnergyRecord& r) {
  const double w1 = 1.0 + r.t;
  return {sq(r[Norm::U_H3]) + sq(r[Norm::InvPdivTau_H2]),
          w1 * (sq(r[Norm::GradU_H2]) + sq(r[Norm::PdivTau_H1])),
          w1 * w1 * (sq(r[Norm::Grad2U_H1]) + sq(r[Norm::GradPdivTau_L2]))};
}

/// Streams records in time order, maintaining running maxima and trapezoid
/// integrals, and stamps e0, e1, e2 into each record.
class EnergyAccumulator {
 public:
  void push(EnergyRecord& r) {
    if (count_ > 0 && !(r.t > last_t_)) throw Error("energy records must be strictly increasing in t");
    const auto sup = sup_terms(r);
    const auto f = integrands(r);
    for (std::size_t i = 0; i < 3; ++i) {
      if (count_ == 0) {
        max_[i] = sup[i];
        integral_[i] = 0.0;
      } else {
        max_[i] = std::max(max_[i], sup[i]);
        integral_[i] += 0.5 * (r.t - last_t_) * (f[i] + last_f_[i]);
      }
    }
    r.integrals = integral_;
    r.e0 = max_[0] + integral_[0];
    r.e1 = max_[1] + integral_[1];
    r.e2 = max_[2] + integral_[2];
    last_f_ = f;
    last_t_ = r.t;
    ++count_;
  }

 private:
  std::size_t count_ = 0;
  double last_t_ = 0.0;
  std::array<double, 3> max_{};
  std::array<double, 3> integral_{};
  std::array<double, 3> last_f_{};
};

struct EnergyTriple {
  double t, e0, e1, e2;
};

/// Recomputes (e0, e1, e2) for a time-sorted history of norm records.
inline std::vector<EnergyTriple> assemble_energies(std::span<const EnergyRecord> history) {
  EnergyAccumulator acc;
  std::vector<EnergyTriple> out;
  out.reserve(history.size());
  for (EnergyRecord r : history) {
    acc.push(r);
    out.push_back({r.t, r.e0, r.e1, r.e2});
  }
  return out;
}

/// Ratios E0(t) / (E0(0) + E0^{3/2} + E2^{3/2}) and E2(t) / (E0 + E0^{3/2} + E2^{3/2}),
/// whose boundedness the a priori estimates assert with unspecified constants.
inline std::pair<double, double> lemma_ratios(double e0_initial, double e0, double e2) {
  const double cubic = std::pow(e0, 1.5) + std::pow(e2, 1.5);
  const double d0 = e0_initial + cubic;
  const double d2 = e0 + cubic;
  return {d0 > 0.0 ? e0 / d0 : 0.0, d2 > 0.0 ? e2 / d2 : 0.0};
}

struct FitResult {
  double exponent;
  double r_squared;
};

namespace detail {

template <class XFn>
FitResult log_fit(std::span<const std::pair<double, double>> series, double t_lo, double t_hi,
                  XFn&& x_of) {
  std::vector<double> xs, ys;
  for (const auto& [t, v] : series) {
    if (t < t_lo || t > t_hi) continue;
    if (!(v > 0.0)) {
      throw NonPositiveSeries("value " + std::to_string(v) + " at t = " + std::to_string(t));
    }
    xs.push_back(x_of(t));
    ys.push_back(std::log(v));
  }
  if (xs.size() < 10) {
    throw OutOfRange("window", "needs >= 10 samples, has " + std::to_string(xs.size()));
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  const double r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return {slope, r2};
}

}  // namespace detail

/// Least-squares slope of log(value) against log(1 + t) over [t_lo, t_hi].
inline FitResult decay_fit(std::span<const std::pair<double, double>> series, double t_lo,
                           double t_hi) {
  return detail::log_fit(series, t_lo, t_hi, [](double t) { return std::log1p(t); });
}

/// Least-squares slope of log(value) against t: the exponential rate.
inline FitResult exponential_rate_fit(std::span<const std::pair<double, double>> series,
                                      double t_lo, double t_hi) {
  return detail::log_fit(series, t_lo, t_hi, [](double t) { return t; });
}

}  // namespace oldroyd
