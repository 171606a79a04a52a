#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oldroyd/hookean.hpp"
#include "oldroyd/model.hpp"
#include "oldroyd/random.hpp"

namespace oldroyd {

enum class CheckKind {
  /// Residual must stay at or below tolerance in every trial.
  Identity,
  /// Negative control: residual must exceed tolerance in every trial, which
  /// shows the corresponding identity check can fail.
  Control,
};

struct IdentityReport {
  std::string name;
  CheckKind kind = CheckKind::Identity;
  /// Worst trial: the largest residual for identities, the smallest for controls.
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  int trials = 0;
  std::uint64_t seed = 0;
};

inline nlohmann::json to_json(const IdentityReport& r) {
  return {{"name", r.name},
          {"kind", r.kind == CheckKind::Identity ? "identity" : "control"},
          {"residual", r.residual},
          {"tolerance", r.tolerance},
          {"pass", r.pass},
          {"trials", r.trials},
          {"seed", r.seed}};
}

/// <grad^j |grad|^{-1} a, grad^j |grad|^{-1} b> style pairing:
/// vol * sum_k |k|^{2p} Re(a_k conj b_k). The k = 0 mode only enters for p = 0.
template <std::size_t C>
double graded_inner(const Field<C>& a, const Field<C>& b, int p) {
  const Grid& g = a.grid();
  const auto w = frobenius_weights<C>();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double k2 = g.k2(i);
    if (k2 == 0.0 && p != 0) continue;
    double part = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
      part += w[c] * (a[c][i].real() * b[c][i].real() + a[c][i].imag() * b[c][i].imag());
    }
    sum += g.hermitian_weight(i) * std::pow(k2, p) * part;
  }
  return g.volume() * sum;
}

namespace detail {

inline double relative(double residual, double scale) { return residual / std::max(1.0, scale); }

/// [grad u . grad tau]_i = sum_j d_j u . grad tau_ij
inline VectorField grad_u_dot_grad_tau(const TensorField& gu, const Field<18>& gtau) {
  auto r = padded_map<3>(gu.grid(), components_of(gu, gtau), [](const auto& in, auto& out) {
    for (std::size_t i = 0; i < 3; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < 3; ++j) {
        for (std::size_t l = 0; l < 3; ++l) acc += in[3 * l + j] * in[9 + 3 * sym_index(i, j) + l];
      }
      out[i] = acc;
    }
  });
  return take_field<3>(gu.grid_ptr(), r);
}

/// [grad u . grad phi]_i = d_i u . grad phi
inline VectorField grad_u_dot_grad_scalar(const TensorField& gu, const VectorField& gphi) {
  auto r = padded_map<3>(gu.grid(), components_of(gu, gphi), [](const auto& in, auto& out) {
    for (std::size_t i = 0; i < 3; ++i) {
      out[i] = in[i] * in[9] + in[3 + i] * in[10] + in[6 + i] * in[11];
    }
  });
  return take_field<3>(gu.grid_ptr(), r);
}

}  // namespace detail

/// Commutator identity
///   P div(u.grad tau) = P(u.grad P div tau) + P(grad u . grad tau)
///                       - P(grad u . grad lap^{-1} div div tau).
/// With `with_correction = false` the last term is dropped (negative control).
inline double commutator_residual(const VectorField& u, const SymTensorField& tau,
                                  bool with_correction = true) {
  const VectorField lhs = leray_project(tensor_divergence(advect(u, tau)));
  const TensorField gu = velocity_gradient(u);
  VectorField rhs = leray_project(advect(u, projected_stress_div(tau)));
  rhs += leray_project(detail::grad_u_dot_grad_tau(gu, gradient(tau)));
  if (with_correction) {
    const ScalarField phi = inv_laplacian(remove_mean(double_divergence(tau)));
    rhs -= leray_project(detail::grad_u_dot_grad_scalar(gu, gradient(phi)));
  }
  return detail::relative(l2_norm(lhs - rhs), l2_norm(lhs));
}

/// N1 = sum_{k=0..3} <grad^k |grad|^{-1} div tau, grad^k |grad|^{-1} u>
///                 + <grad^k |grad|^{-1} D(u), grad^k |grad|^{-1} tau>,
/// relative to the first group. tau is a full tensor so that a non-symmetric
/// stress can be fed as a negative control.
inline double n1_residual(const VectorField& u, const TensorField& tau) {
  const VectorField div_tau = tensor_divergence(tau);
  const TensorField d = to_full(sym_grad(u));
  double first = 0.0, second = 0.0;
  for (int k = 0; k <= 3; ++k) {
    first += graded_inner(div_tau, u, k - 1);
    second += graded_inner(d, tau, k - 1);
  }
  return detail::relative(std::abs(first + second), std::abs(first));
}

inline double n1_residual(const VectorField& u, const SymTensorField& tau) {
  return n1_residual(u, to_full(tau));
}

/// M1 = sum_{k=0,1} <grad^{k+1} div tau, grad^{k+1} u> + <grad^k lap u, grad^k P div tau>,
/// relative to the first group.
inline double m1_residual(const VectorField& u, const SymTensorField& tau) {
  const VectorField div_tau = tensor_divergence(tau);
  const VectorField pdiv = leray_project(div_tau);
  const VectorField lap_u = laplacian(u);
  double first = 0.0, second = 0.0;
  for (int k = 0; k <= 1; ++k) {
    first += graded_inner(div_tau, u, k + 1);
    second += graded_inner(lap_u, pdiv, k);
  }
  return detail::relative(std::abs(first + second), std::abs(first));
}

/// P div D(u) = lap u / 2.
inline double projection_fact_residual(const VectorField& u) {
  const VectorField lhs = leray_project(tensor_divergence(sym_grad(u)));
  const VectorField rhs = 0.5 * laplacian(u);
  return detail::relative(l2_norm(lhs - rhs), l2_norm(rhs));
}

/// div tau_t + div(u.grad tau) + div Q + a div tau = (mu2 / 2) lap u, with
/// tau_t taken from the model right-hand side. At a = 0, mu2 = 1 this is the
/// divergence identity used to trade tau_t for u.
inline double eqq_residual(const VectorField& u, const SymTensorField& tau,
                           const ModelParams& params) {
  const OldroydRhs rhs = oldroyd_rhs(OldroydState(u, tau), params);
  VectorField lhs = tensor_divergence(rhs.dtau_dt);
  lhs += tensor_divergence(advect(u, tau));
  lhs += tensor_divergence(bilinear_Q(tau, velocity_gradient(u), params.b));
  lhs.add_scaled(params.a, tensor_divergence(tau));
  const VectorField target = (0.5 * params.mu2) * laplacian(u);
  return detail::relative(l2_norm(lhs - target), l2_norm(target));
}

namespace detail {

inline IdentityReport single(std::string name, double residual, double tolerance) {
  return {std::move(name), CheckKind::Identity, residual, tolerance, residual <= tolerance, 1, 0};
}

}  // namespace detail

inline constexpr double kCommutatorTolerance = 1e-10;
inline constexpr double kN1Tolerance = 1e-12;
inline constexpr double kM1Tolerance = 1e-12;
inline constexpr double kProjectionTolerance = 1e-12;
inline constexpr double kEqqTolerance = 1e-11;
inline constexpr double kGClosureTolerance = 1e-11;
/// Controls must exceed this in every trial.
inline constexpr double kControlThreshold = 1e-6;

inline IdentityReport verify_commutator(const VectorField& u, const SymTensorField& tau) {
  return detail::single("commutator", commutator_residual(u, tau), kCommutatorTolerance);
}
inline IdentityReport verify_n1(const VectorField& u, const SymTensorField& tau) {
  return detail::single("n1", n1_residual(u, tau), kN1Tolerance);
}
inline IdentityReport verify_m1(const VectorField& u, const SymTensorField& tau) {
  return detail::single("m1", m1_residual(u, tau), kM1Tolerance);
}
inline IdentityReport verify_projection_fact(const VectorField& u) {
  return detail::single("projection_fact", projection_fact_residual(u), kProjectionTolerance);
}
inline IdentityReport verify_eqq(const VectorField& u, const SymTensorField& tau,
                                 const ModelParams& params = {}) {
  return detail::single("eqq", eqq_residual(u, tau, params), kEqqTolerance);
}

/// Runs one check over `trials` random draws from a sampler seeded with `seed`.
inline IdentityReport run_trials(std::string name, CheckKind kind, double tolerance, int trials,
                                 std::uint64_t seed,
                                 const std::function<double(FieldSampler&)>& trial,
                                 const GridPtr& grid) {
  IdentityReport r{std::move(name), kind, 0.0, tolerance, true, trials, seed};
  FieldSampler sampler(grid, seed);
  r.residual = kind == CheckKind::Identity ? 0.0 : std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const double res = trial(sampler);
    if (kind == CheckKind::Identity) {
      r.residual = std::max(r.residual, res);
      if (!(res <= tolerance)) r.pass = false;
    } else {
      r.residual = std::min(r.residual, res);
      if (!(res > tolerance)) r.pass = false;
    }
  }
  return r;
}

/// Band limit for quadratic identities: any band free of Nyquist modes is
/// exact under 3/2 padding; n/3 leaves a margin.
inline double quadratic_band(int n) { return std::floor(n / 3.0); }

/// Band limit for the G-closure check, whose chain-rule side contains the
/// intermediate product U U^T: its band 2 kmax must stay below n/2.
inline double cubic_band(int n) { return std::floor((n - 2) / 4.0); }

/// Every identity and every negative control, `trials` random draws each, at
/// resolution n. Empty when trials = 0.
inline std::vector<IdentityReport> run_suite(std::uint64_t seed, int n, int trials) {
  if (n < 16) throw OutOfRange("n", "identity suite needs n >= 16");
  if (trials < 0) throw OutOfRange("trials", "must be >= 0");
  std::vector<IdentityReport> out;
  if (trials == 0) return out;
  const GridPtr g = Grid::make(n);
  const double kq = quadratic_band(n);
  const double kc = cubic_band(n);
  using Kind = CheckKind;

  out.push_back(run_trials("commutator", Kind::Identity, kCommutatorTolerance, trials, seed,
                           [kq](FieldSampler& s) {
                             const VectorField u = s.solenoidal(kq);
                             return commutator_residual(u, s.symmetric(kq));
                           }, g));
  out.push_back(run_trials("n1", Kind::Identity, kN1Tolerance, trials, seed,
                           [kq](FieldSampler& s) {
                             const VectorField u = s.solenoidal(kq);
                             return n1_residual(u, s.symmetric(kq));
                           }, g));
  out.push_back(run_trials("m1", Kind::Identity, kM1Tolerance, trials, seed,
                           [kq](FieldSampler& s) {
                             const VectorField u = s.solenoidal(kq);
                             return m1_residual(u, s.symmetric(kq));
                           }, g));
  out.push_back(run_trials("projection_fact", Kind::Identity, kProjectionTolerance, trials, seed,
                           [kq](FieldSampler& s) {
                             return projection_fact_residual(s.solenoidal(kq));
                           }, g));
  out.push_back(run_trials("eqq", Kind::Identity, kEqqTolerance, trials, seed,
                           [kq](FieldSampler& s) {
                             ModelParams p;
                             p.b = std::uniform_real_distribution<double>(-1.0, 1.0)(s.engine());
                             const VectorField u = s.solenoidal(kq);
                             return eqq_residual(u, s.symmetric(kq), p);
                           }, g));
  out.push_back(run_trials("g_closure", Kind::Identity, kGClosureTolerance, trials, seed,
                           [kc](FieldSampler& s) {
                             VectorField u = s.solenoidal(kc);
                             TensorField U = s.tensor(kc);
                             U *= 0.5;
                             return verify_g_closure(HookeanState(std::move(u), std::move(U)));
                           }, g));

  out.push_back(run_trials("commutator_without_correction", Kind::Control, kControlThreshold,
                           trials, seed, [kq](FieldSampler& s) {
                             const VectorField u = s.solenoidal(kq);
                             return commutator_residual(u, s.symmetric(kq), false);
                           }, g));
  out.push_back(run_trials("n1_nonsymmetric_tau", Kind::Control, kControlThreshold, trials, seed,
                           [kq](FieldSampler& s) {
                             const VectorField u = s.solenoidal(kq);
                             return n1_residual(u, s.tensor(kq));
                           }, g));
  out.push_back(run_trials("m1_compressible_u", Kind::Control, kControlThreshold, trials, seed,
                           [kq](FieldSampler& s) {
                             const VectorField u = s.compressible(kq);
                             return m1_residual(u, s.symmetric(kq));
                           }, g));
  out.push_back(run_trials("projection_fact_compressible_u", Kind::Control, kControlThreshold,
                           trials, seed, [kq](FieldSampler& s) {
                             return projection_fact_residual(s.compressible(kq));
                           }, g));
  out.push_back(run_trials("eqq_compressible_u", Kind::Control, kControlThreshold, trials, seed,
                           [kq](FieldSampler& s) {
                             const VectorField u = s.compressible(kq);
                             return eqq_residual(u, s.symmetric(kq), ModelParams{});
                           }, g));
  out.push_back(run_trials("g_closure_slip_plus_one", Kind::Control, kControlThreshold, trials,
                           seed, [kc](FieldSampler& s) {
                             VectorField u = s.solenoidal(kc);
                             TensorField U = s.tensor(kc);
                             U *= 0.5;
                             return verify_g_closure(HookeanState(std::move(u), std::move(U)), 1.0);
                           }, g));
  return out;
}

inline bool all_pass(const std::vector<IdentityReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
}

}  // namespace oldroyd
