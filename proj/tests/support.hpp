#pragma once

#include <cmath>
#include <complex>
#include <random>

#include "oldroyd/spectral/transform.hpp"

namespace oldroyd::testing {

/// Physical-space L2 norm squared by the rectangle rule, which is exact for
/// trigonometric polynomials resolved by the grid.
template <std::size_t C>
double quadrature_norm2(const PhysicalField<C>& p) {
  const double cell = std::pow(p.grid->spacing(), 3);
  double s = 0.0;
  for (const auto& comp : p.comp) {
    for (double v : comp) s += v * v;
  }
  return s * cell;
}

inline double max_abs(const PhysicalArray& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

template <std::size_t C>
double max_abs_diff(const PhysicalField<C>& a, const PhysicalField<C>& b) {
  double m = 0.0;
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t i = 0; i < a.comp[c].size(); ++i) {
      m = std::max(m, std::abs(a.comp[c][i] - b.comp[c][i]));
    }
  }
  return m;
}

template <std::size_t C>
double max_coeff_diff(const Field<C>& a, const Field<C>& b) {
  double m = 0.0;
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[c][i] - b[c][i]));
  }
  return m;
}

template <std::size_t C>
double max_coeff(const Field<C>& a) {
  double m = 0.0;
  for (std::size_t c = 0; c < C; ++c) {
    for (const auto& v : a[c]) m = std::max(m, std::abs(v));
  }
  return m;
}

/// Coefficient of e^{i k.x} in component c, reading the conjugate partner when
/// k lies in the unstored half.
template <std::size_t C>
Complex coeff(const Field<C>& f, std::size_t c, const Wavenumber& k) {
  const auto loc = f.grid().locate(k);
  return loc.conjugate ? std::conj(f[c][loc.index]) : f[c][loc.index];
}

/// Sets the coefficient of mode k (and its conjugate partner) in component c.
template <std::size_t C>
void set_mode(Field<C>& f, std::size_t c, const Wavenumber& k, Complex v) {
  const auto loc = f.grid().locate(k);
  f[c][loc.index] = loc.conjugate ? std::conj(v) : v;
  if (k[0] == 0) {
    const auto partner = f.grid().locate({0, -k[1], -k[2]});
    f[c][partner.index] = std::conj(v);
  }
}

}  // namespace oldroyd::testing
