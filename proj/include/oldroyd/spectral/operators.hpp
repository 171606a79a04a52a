#pragma once

#include <cmath>

#include "oldroyd/spectral/field.hpp"

namespace oldroyd {

namespace detail {

inline constexpr double kMeanTolerance = 1e-13;

template <std::size_t C>
void require_mean_zero(const Field<C>& f, const char* op) {
  double scale = 1.0;
  for (std::size_t c = 0; c < C; ++c) {
    for (const auto& v : f[c]) scale = std::max(scale, std::abs(v));
  }
  for (std::size_t c = 0; c < C; ++c) {
    if (std::abs(f.mean(c)) > kMeanTolerance * scale) {
      throw MeanNotZero(std::string(op) + ": component " + std::to_string(c) +
                        " has nonzero mean");
    }
  }
}

}  // namespace detail

/// Zeroes the k = 0 coefficient of every component.
template <std::size_t C>
Field<C> remove_mean(Field<C> f) {
  for (std::size_t c = 0; c < C; ++c) f[c][0] = Complex{};
  return f;
}

/// Zeroes every coefficient that sits on a Nyquist plane.
template <std::size_t C>
Field<C> drop_nyquist(Field<C> f) {
  const Grid& g = f.grid();
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (g.is_nyquist(i)) f[c][i] = Complex{};
    }
  }
  return f;
}

/// Fourier multiplier |grad|^s. Modes with |k| = 0 go to zero for s != 0;
/// s < 0 requires a mean-zero input.
template <std::size_t C>
Field<C> multiplier(const Field<C>& f, double s) {
  if (s == 0.0) return f;
  if (s < 0.0) detail::require_mean_zero(f, "multiplier");
  const Grid& g = f.grid();
  Field<C> out(f.grid_ptr());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double k2 = g.k2(i);
    const double m = k2 > 0.0 ? std::pow(k2, 0.5 * s) : 0.0;
    for (std::size_t c = 0; c < C; ++c) out[c][i] = m * f[c][i];
  }
  return out;
}

/// Component-wise gradient: slot 3*c + d holds d_d f_c.
template <std::size_t C>
Field<3 * C> gradient(const Field<C>& f) {
  const Grid& g = f.grid();
  Field<3 * C> out(f.grid_ptr());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto& k = g.effective_k(i);
    for (std::size_t c = 0; c < C; ++c) {
      const Complex v = f[c][i];
      for (std::size_t d = 0; d < 3; ++d) out[3 * c + d][i] = Complex(0.0, k[d]) * v;
    }
  }
  return out;
}

/// d_d f for a single direction d.
template <std::size_t C>
Field<C> partial(const Field<C>& f, std::size_t d) {
  const Grid& g = f.grid();
  Field<C> out(f.grid_ptr());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Complex ik(0.0, g.effective_k(i)[d]);
    for (std::size_t c = 0; c < C; ++c) out[c][i] = ik * f[c][i];
  }
  return out;
}

inline ScalarField divergence(const VectorField& v) {
  const Grid& g = v.grid();
  ScalarField out(v.grid_ptr());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& k = g.effective_k(i);
    out[0][i] = Complex(0.0, 1.0) * (k[0] * v[0][i] + k[1] * v[1][i] + k[2] * v[2][i]);
  }
  return out;
}

/// [div T]_i = sum_j d_j T_ij.
inline VectorField tensor_divergence(const SymTensorField& t) {
  const Grid& g = t.grid();
  VectorField out(t.grid_ptr());
  for (std::size_t m = 0; m < t.size(); ++m) {
    const auto& k = g.effective_k(m);
    for (std::size_t i = 0; i < 3; ++i) {
      Complex acc{};
      for (std::size_t j = 0; j < 3; ++j) acc += k[j] * t[sym_index(i, j)][m];
      out[i][m] = Complex(0.0, 1.0) * acc;
    }
  }
  return out;
}

/// [div F]_i = sum_j d_j F_ij for a full (non-symmetric) tensor.
inline VectorField tensor_divergence(const TensorField& t) {
  const Grid& g = t.grid();
  VectorField out(t.grid_ptr());
  for (std::size_t m = 0; m < t.size(); ++m) {
    const auto& k = g.effective_k(m);
    for (std::size_t i = 0; i < 3; ++i) {
      Complex acc{};
      for (std::size_t j = 0; j < 3; ++j) acc += k[j] * t[3 * i + j][m];
      out[i][m] = Complex(0.0, 1.0) * acc;
    }
  }
  return out;
}

/// sum_ij d_i d_j T_ij.
inline ScalarField double_divergence(const SymTensorField& t) {
  return divergence(tensor_divergence(t));
}

template <std::size_t C>
Field<C> laplacian(const Field<C>& f) {
  const Grid& g = f.grid();
  Field<C> out(f.grid_ptr());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double k2 = g.k2(i);
    for (std::size_t c = 0; c < C; ++c) out[c][i] = -k2 * f[c][i];
  }
  return out;
}

/// Inverse Laplacian on mean-zero fields; the k = 0 mode maps to zero.
template <std::size_t C>
Field<C> inv_laplacian(const Field<C>& f) {
  detail::require_mean_zero(f, "inv_laplacian");
  const Grid& g = f.grid();
  Field<C> out(f.grid_ptr());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double k2 = g.k2(i);
    const double m = k2 > 0.0 ? -1.0 / k2 : 0.0;
    for (std::size_t c = 0; c < C; ++c) out[c][i] = m * f[c][i];
  }
  return out;
}

/// Leray projection I - k k^T / |k|^2 per mode; k = 0 left unchanged.
inline VectorField leray_project(const VectorField& v) {
  const Grid& g = v.grid();
  VectorField out = v;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double k2 = g.k2(i);
    if (k2 == 0.0) continue;
    const auto& k = g.effective_k(i);
    const Complex kv = (k[0] * v[0][i] + k[1] * v[1][i] + k[2] * v[2][i]) / k2;
    for (std::size_t d = 0; d < 3; ++d) out[d][i] -= k[d] * kv;
  }
  return out;
}

/// Curl applied row-wise to a full tensor: [curl F]_{i,:} = curl(F_{i,:}).
inline TensorField row_curl(const TensorField& t) {
  const Grid& g = t.grid();
  TensorField out(t.grid_ptr());
  for (std::size_t m = 0; m < t.size(); ++m) {
    const auto& k = g.effective_k(m);
    const Complex I(0.0, 1.0);
    for (std::size_t r = 0; r < 3; ++r) {
      const Complex a = t[3 * r + 0][m], b = t[3 * r + 1][m], c = t[3 * r + 2][m];
      out[3 * r + 0][m] = I * (k[1] * c - k[2] * b);
      out[3 * r + 1][m] = I * (k[2] * a - k[0] * c);
      out[3 * r + 2][m] = I * (k[0] * b - k[1] * a);
    }
  }
  return out;
}

}  // namespace oldroyd
