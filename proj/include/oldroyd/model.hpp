#pragma once

#include <array>
#include <string>
#include <tuple>

#include "oldroyd/spectral/operators.hpp"
#include "oldroyd/spectral/product.hpp"

namespace oldroyd {

/// Coefficients of
///   u_t + u.grad u - mu lap u + grad p = mu1 div tau,
///   tau_t + u.grad tau + a tau + Q(tau, grad u) = mu2 D(u).
struct ModelParams {
  double mu = 1.0;
  double mu1 = 1.0;
  double mu2 = 1.0;
  double a = 0.0;
  double b = 0.0;

  void validate() const {
    if (!(mu >= 0.0)) throw OutOfRange("params.mu", "must be >= 0");
    if (!(mu1 >= 0.0)) throw OutOfRange("params.mu1", "must be >= 0");
    if (!(mu2 >= 0.0)) throw OutOfRange("params.mu2", "must be >= 0");
    if (!(a >= 0.0)) throw OutOfRange("params.a", "must be >= 0");
    if (!(b >= -1.0 && b <= 1.0)) throw OutOfRange("params.b", "must lie in [-1, 1]");
  }
};

struct OldroydState {
  VectorField u;
  SymTensorField tau;

  explicit OldroydState(const GridPtr& g) : u(g), tau(g) {}
  OldroydState(VectorField u_, SymTensorField tau_) : u(std::move(u_)), tau(std::move(tau_)) {}

  auto fields() { return std::tie(u, tau); }
  auto fields() const { return std::tie(u, tau); }
};

struct OldroydRhs {
  VectorField du_dt;
  SymTensorField dtau_dt;
};

inline TensorField velocity_gradient(const VectorField& u) { return gradient(u); }

/// D(u) = (grad u + grad u^T) / 2.
inline SymTensorField sym_grad(const VectorField& u) {
  return symmetric_part(velocity_gradient(u));
}

/// Omega(u) = (grad u - grad u^T) / 2, full storage.
inline TensorField skew_grad(const VectorField& u) {
  const TensorField g = velocity_gradient(u);
  TensorField w(u.grid_ptr());
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      auto& out = w[3 * i + j];
      const auto& a = g[3 * i + j];
      const auto& b = g[3 * j + i];
      for (std::size_t m = 0; m < out.size(); ++m) out[m] = 0.5 * (a[m] - b[m]);
    }
  }
  return w;
}

namespace detail {

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Q = tau W - W tau + b (D tau + tau D), written into sym slots.
/// `grad` is [grad u]_ij = d_j u_i. For symmetric tau, with A = tau (W + b D),
/// tau W - W tau = A_W + A_W^T and D tau + tau D = A_D + A_D^T, so Q = A + A^T.
inline void q_pointwise(const Mat3& tau, const Mat3& grad, double b, std::array<double, 6>& q) {
  const double hp = 0.5 * (b + 1.0);  // weight of grad[l][j] in (W + b D)_lj
  const double hm = 0.5 * (b - 1.0);  // weight of grad[j][l]
  Mat3 m{};
  for (int l = 0; l < 3; ++l) {
    for (int j = 0; j < 3; ++j) m[l][j] = hp * grad[l][j] + hm * grad[j][l];
  }
  Mat3 a{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) a[i][j] = tau[i][0] * m[0][j] + tau[i][1] * m[1][j] + tau[i][2] * m[2][j];
  }
  q[0] = 2.0 * a[0][0];
  q[1] = 2.0 * a[1][1];
  q[2] = 2.0 * a[2][2];
  q[3] = a[0][1] + a[1][0];
  q[4] = a[0][2] + a[2][0];
  q[5] = a[1][2] + a[2][1];
}

template <class In>
Mat3 sym_from(const In& in, std::size_t offset) {
  Mat3 m{};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) m[i][j] = in[offset + sym_index(i, j)];
  }
  return m;
}

template <class In>
Mat3 full_from(const In& in, std::size_t offset) {
  Mat3 m{};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) m[i][j] = in[offset + 3 * i + j];
  }
  return m;
}

}  // namespace detail

/// Q(tau, grad u) = tau Omega - Omega tau + b (D tau + tau D), evaluated
/// alias-free and symmetrized.
inline SymTensorField bilinear_Q(const SymTensorField& tau, const TensorField& grad_u, double b) {
  auto r = padded_map<6>(tau.grid(), components_of(tau, grad_u),
                         [b](const auto& in, auto& out) {
                           detail::q_pointwise(detail::sym_from(in, 0), detail::full_from(in, 6),
                                               b, out);
                         });
  return take_field<6>(tau.grid_ptr(), r);
}

/// P div tau: the part of the stress that the coupling dissipates.
inline VectorField projected_stress_div(const SymTensorField& tau) {
  return leray_project(tensor_divergence(tau));
}

/// Right-hand side of the Oldroyd-B system with the pressure eliminated by
/// projection, split so that the integrator can treat mu lap u exactly.
struct OldroydSystem {
  using State = OldroydState;

  ModelParams params;
  bool nonlinear = true;
  /// Zero the k = 0 mode of the stress tendency (mean of tau frozen).
  bool project_tau_mean = false;

  double viscosity() const noexcept { return params.mu; }

  /// Every term except mu lap u.
  State explicit_rhs(const State& s) const {
    const GridPtr& g = s.u.grid_ptr();
    VectorField du = params.mu1 * projected_stress_div(s.tau);
    SymTensorField dtau = params.mu2 * sym_grad(s.u);
    if (params.a != 0.0) dtau.add_scaled(-params.a, s.tau);

    if (nonlinear) {
      const TensorField gu = velocity_gradient(s.u);
      const Field<18> gtau = gradient(s.tau);
      const double b = params.b;
      auto r = padded_map<9>(*g, components_of(s.u, gu, s.tau, gtau),
                             [b](const auto& in, auto& out) {
                               // in: u[0..3) grad u[3..12) tau[12..18) grad tau[18..36)
                               for (std::size_t i = 0; i < 3; ++i) {
                                 out[i] = in[0] * in[3 + 3 * i] + in[1] * in[4 + 3 * i] +
                                          in[2] * in[5 + 3 * i];
                               }
                               std::array<double, 6> q{};
                               detail::q_pointwise(detail::sym_from(in, 12),
                                                   detail::full_from(in, 3), b, q);
                               for (std::size_t c = 0; c < 6; ++c) {
                                 const double adv = in[0] * in[18 + 3 * c] +
                                                    in[1] * in[19 + 3 * c] +
                                                    in[2] * in[20 + 3 * c];
                                 out[3 + c] = -adv - q[c];
                               }
                             });
      du -= leray_project(take_field<3>(g, r, 0));
      dtau += take_field<6>(g, r, 3);
    }
    for (std::size_t c = 0; c < 3; ++c) du[c][0] = Complex{};
    if (project_tau_mean) {
      for (std::size_t c = 0; c < 6; ++c) dtau[c][0] = Complex{};
    }
    return State(std::move(du), std::move(dtau));
  }

  /// Full tendency including mu lap u.
  OldroydRhs rhs(const State& s) const {
    State e = explicit_rhs(s);
    e.u.add_scaled(params.mu, laplacian(s.u));
    return {std::move(e.u), std::move(e.tau)};
  }
};

/// du/dt = -P(u.grad u) + mu lap u + mu1 P div tau,
/// dtau/dt = -u.grad tau - a tau - Q(tau, grad u) + mu2 D(u).
inline OldroydRhs oldroyd_rhs(const OldroydState& state, const ModelParams& params) {
  return OldroydSystem{params}.rhs(state);
}

}  // namespace oldroyd
