#pragma once

#include <cmath>
#include <variant>

#include "oldroyd/energy.hpp"
#include "oldroyd/harness/config.hpp"
#include "oldroyd/hookean.hpp"
#include "oldroyd/random.hpp"

namespace oldroyd::harness {

/// || |grad|^{-1} u ||_{H^3} + || |grad|^{-1} tau ||_{H^3}
inline double data_norm(const OldroydState& s) {
  return sobolev_norm(s.u, 3, -1) + sobolev_norm(s.tau, 3, -1);
}

/// || |grad|^{-1} u ||_{H^3} + || |grad|^{-1} (F - I) ||_{H^3}
inline double data_norm(const HookeanState& s) {
  return sobolev_norm(s.u, 3, -1) + sobolev_norm(s.F_minus_I, 3, -1);
}

inline VectorField taylor_green(const GridPtr& g, double amplitude) {
  return sample_field<3>(g, [amplitude](double x, double y, double z) {
    return std::array<double, 3>{amplitude * std::sin(x) * std::cos(y) * std::cos(z),
                                 -amplitude * std::cos(x) * std::sin(y) * std::cos(z), 0.0};
  });
}

namespace detail {

template <class State>
State rescaled(State s, double amplitude) {
  const double norm = data_norm(s);
  const double f = norm > 0.0 ? amplitude / norm : 0.0;
  auto fs = s.fields();
  std::get<0>(fs) *= f;
  std::get<1>(fs) *= f;
  return s;
}

inline void require_alias_free(const GridPtr& g, double kmax) {
  if (kmax > g->n() / 3.0) throw OutOfRange("init.kmax", "must be <= n/3 to stay alias-free");
}

}  // namespace detail

inline OldroydState make_oldroyd_initial(Preset preset, double amplitude, double kmax,
                                         std::uint64_t seed, const GridPtr& g) {
  detail::require_alias_free(g, kmax);
  switch (preset) {
    case Preset::TaylorGreen:
      return OldroydState(taylor_green(g, amplitude), SymTensorField(g));
    case Preset::RandomBand: {
      FieldSampler s(g, seed);
      VectorField u = s.solenoidal(kmax);
      SymTensorField tau = s.symmetric(kmax);
      return detail::rescaled(OldroydState(std::move(u), std::move(tau)), amplitude);
    }
    case Preset::HookeanGeneric:
      break;
  }
  throw BadPreset(std::string(to_string(preset)) + " (not an Oldroyd-B preset)");
}

/// hookean-generic draws every entry of U = F - I independently, so both
/// div U and the row curls are nonzero for any realisation worth running.
inline HookeanState make_hookean_initial(Preset preset, double amplitude, double kmax,
                                         std::uint64_t seed, const GridPtr& g) {
  detail::require_alias_free(g, kmax);
  switch (preset) {
    case Preset::TaylorGreen:
      return HookeanState(taylor_green(g, amplitude), TensorField(g));
    case Preset::HookeanGeneric: {
      FieldSampler s(g, seed);
      VectorField u = s.solenoidal(kmax);
      TensorField U = s.tensor(kmax);
      return detail::rescaled(HookeanState(std::move(u), std::move(U)), amplitude);
    }
    case Preset::RandomBand:
      break;
  }
  throw BadPreset(std::string(to_string(preset)) + " (not a Hookean preset)");
}

using InitialState = std::variant<OldroydState, HookeanState>;

inline InitialState make_initial(Preset preset, double amplitude, double kmax,
                                 std::uint64_t seed, const GridPtr& g) {
  if (preset == Preset::HookeanGeneric) {
    return make_hookean_initial(preset, amplitude, kmax, seed, g);
  }
  return make_oldroyd_initial(preset, amplitude, kmax, seed, g);
}

/// Oldroyd-B state carrying the same flow: tau = G(F) = F F^T - I.
inline OldroydState consistent_oldroyd_state(const HookeanState& h) {
  return OldroydState(h.u, to_conformation(h.F_minus_I));
}

/// Parameters under which G = F F^T - I follows the Oldroyd-B stress law.
inline ModelParams hookean_equivalent_params() {
  ModelParams p;
  p.mu = 1.0;
  p.mu1 = 1.0;
  p.mu2 = 2.0;
  p.a = 0.0;
  p.b = kHookeanSlip;
  return p;
}

}  // namespace oldroyd::harness
