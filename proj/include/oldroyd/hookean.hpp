#pragma once

#include <algorithm>
#include <tuple>

#include "oldroyd/model.hpp"

namespace oldroyd {

/// Incompressible viscoelastic flow with Hookean elasticity,
///   u_t + u.grad u - lap u + grad p = div(F F^T),
///   F_t + u.grad F = grad u F,
/// stored through the deviation U = F - I (no symmetry or div-curl structure).
struct HookeanState {
  VectorField u;
  TensorField F_minus_I;

  explicit HookeanState(const GridPtr& g) : u(g), F_minus_I(g) {}
  HookeanState(VectorField u_, TensorField f_) : u(std::move(u_)), F_minus_I(std::move(f_)) {}

  auto fields() { return std::tie(u, F_minus_I); }
  auto fields() const { return std::tie(u, F_minus_I); }
};

struct HookeanRhs {
  VectorField du_dt;
  TensorField dF_dt;
};

/// G = F F^T - I = U + U^T + U U^T.
inline SymTensorField to_conformation(const TensorField& U) {
  auto r = padded_map<6>(U.grid(), components_of(U), [](const auto& in, auto& out) {
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = i; j < 3; ++j) {
        double uut = 0.0;
        for (std::size_t l = 0; l < 3; ++l) uut += in[3 * i + l] * in[3 * j + l];
        out[sym_index(i, j)] = uut;
      }
    }
  });
  SymTensorField g = take_field<6>(U.grid_ptr(), r);
  g.add_scaled(2.0, symmetric_part(U));
  return g;
}

struct HookeanSystem {
  using State = HookeanState;

  double viscosity() const noexcept { return 1.0; }

  /// Every term except lap u.
  State explicit_rhs(const State& s) const {
    const GridPtr& g = s.u.grid_ptr();
    const TensorField gu = velocity_gradient(s.u);
    const Field<27> gU = gradient(s.F_minus_I);
    auto r = padded_map<18>(*g, components_of(s.u, gu, s.F_minus_I, gU),
                            [](const auto& in, auto& out) {
                              // in: u[0..3) grad u[3..12) U[12..21) grad U[21..48)
                              for (std::size_t i = 0; i < 3; ++i) {
                                out[i] = in[0] * in[3 + 3 * i] + in[1] * in[4 + 3 * i] +
                                         in[2] * in[5 + 3 * i];
                              }
                              for (std::size_t i = 0; i < 3; ++i) {
                                for (std::size_t j = 0; j < 3; ++j) {
                                  const std::size_t c = 3 * i + j;
                                  double v = -(in[0] * in[21 + 3 * c] + in[1] * in[22 + 3 * c] +
                                               in[2] * in[23 + 3 * c]);
                                  for (std::size_t l = 0; l < 3; ++l) {
                                    v += in[3 + 3 * i + l] * in[12 + 3 * l + j];
                                  }
                                  out[3 + c] = v;
                                }
                              }
                              for (std::size_t i = 0; i < 3; ++i) {
                                for (std::size_t j = i; j < 3; ++j) {
                                  double uut = 0.0;
                                  for (std::size_t l = 0; l < 3; ++l) {
                                    uut += in[12 + 3 * i + l] * in[12 + 3 * j + l];
                                  }
                                  out[12 + sym_index(i, j)] = uut;
                                }
                              }
                            });
    SymTensorField G = take_field<6>(g, r, 12);
    G.add_scaled(2.0, symmetric_part(s.F_minus_I));
    VectorField du = leray_project(tensor_divergence(G)) - leray_project(take_field<3>(g, r, 0));
    for (std::size_t c = 0; c < 3; ++c) du[c][0] = Complex{};
    TensorField dF = take_field<9>(g, r, 3);
    dF += gu;
    return State(std::move(du), std::move(dF));
  }

  HookeanRhs rhs(const State& s) const {
    State e = explicit_rhs(s);
    e.u += laplacian(s.u);
    return {std::move(e.u), std::move(e.F_minus_I)};
  }
};

/// du/dt = -P(u.grad u) + lap u + P div(F F^T - I), dF/dt = -u.grad F + grad u F.
inline HookeanRhs hookean_rhs(const HookeanState& state) { return HookeanSystem{}.rhs(state); }

/// Slip parameter under which G = F F^T - I obeys the Oldroyd-B stress
/// equation with mu2 = 2, a = 0.
inline constexpr double kHookeanSlip = -1.0;

/// Relative mismatch between d/dt(F F^T - I), obtained by the chain rule from
/// the Hookean tendency, and the Oldroyd-B stress tendency of G with slip b:
///   || dG_chain - [-u.grad G - Q(G, grad u; b) + 2 D(u)] || / max(1, ||G||).
inline double verify_g_closure(const HookeanState& state, double b = kHookeanSlip) {
  const GridPtr& g = state.u.grid_ptr();
  const TensorField& U = state.F_minus_I;
  const HookeanRhs r = hookean_rhs(state);

  // dG = dU + dU^T + dU U^T + U dU^T
  auto prod = padded_map<6>(*g, components_of(r.dF_dt, U), [](const auto& in, auto& out) {
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = i; j < 3; ++j) {
        double v = 0.0;
        for (std::size_t l = 0; l < 3; ++l) {
          v += in[3 * i + l] * in[9 + 3 * j + l] + in[9 + 3 * i + l] * in[3 * j + l];
        }
        out[sym_index(i, j)] = v;
      }
    }
  });
  SymTensorField chain = take_field<6>(g, prod);
  chain.add_scaled(2.0, symmetric_part(r.dF_dt));

  const SymTensorField G = to_conformation(U);
  const TensorField gu = velocity_gradient(state.u);
  const Field<18> gG = gradient(G);
  auto rr = padded_map<6>(*g, components_of(state.u, gu, G, gG), [b](const auto& in, auto& out) {
    std::array<double, 6> q{};
    detail::q_pointwise(detail::sym_from(in, 12), detail::full_from(in, 3), b, q);
    for (std::size_t c = 0; c < 6; ++c) {
      const double adv =
          in[0] * in[18 + 3 * c] + in[1] * in[19 + 3 * c] + in[2] * in[20 + 3 * c];
      out[c] = -adv - q[c];
    }
  });
  SymTensorField oldroyd = take_field<6>(g, rr);
  oldroyd.add_scaled(2.0, sym_grad(state.u));

  return l2_norm(chain - oldroyd) / std::max(1.0, l2_norm(G));
}

}  // namespace oldroyd
