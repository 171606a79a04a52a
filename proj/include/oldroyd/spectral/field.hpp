#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <utility>

#include "oldroyd/spectral/grid.hpp"

namespace oldroyd {

/// Fourier coefficients of a real C-component field on a periodic grid.
///
/// Layout of multi-component fields:
///  - vector: component i
///  - symmetric tensor: (11, 22, 33, 12, 13, 23), see sym_index()
///  - full 3x3 tensor: 3*i + j
///  - gradient of a C-field: 3*c + d holds d_d f_c, so for a vector u the
///    gradient is [grad u]_ij = d_j u_i.
template <std::size_t C>
class Field {
 public:
  static constexpr std::size_t kComponents = C;

  explicit Field(GridPtr grid) : grid_(std::move(grid)) {
    for (auto& c : comp_) c.assign(grid_->spectral_size(), Complex{});
  }

  Field(GridPtr grid, std::array<SpectralArray, C> components)
      : grid_(std::move(grid)), comp_(std::move(components)) {
    for (const auto& c : comp_) {
      if (c.size() != grid_->spectral_size()) throw SizeMismatch("component size mismatch");
    }
  }

  const Grid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }

  SpectralArray& operator[](std::size_t c) noexcept { return comp_[c]; }
  const SpectralArray& operator[](std::size_t c) const noexcept { return comp_[c]; }

  std::size_t size() const noexcept { return grid_->spectral_size(); }

  /// k = 0 coefficient of component c.
  Complex mean(std::size_t c) const noexcept { return comp_[c][0]; }

  Field& operator+=(const Field& other) {
    for (std::size_t c = 0; c < C; ++c) {
      auto& a = comp_[c];
      const auto& b = other.comp_[c];
      for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    }
    return *this;
  }
  Field& operator-=(const Field& other) {
    for (std::size_t c = 0; c < C; ++c) {
      auto& a = comp_[c];
      const auto& b = other.comp_[c];
      for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    }
    return *this;
  }
  Field& operator*=(double s) {
    for (auto& a : comp_) {
      for (auto& v : a) v *= s;
    }
    return *this;
  }

  /// this += s * other
  Field& add_scaled(double s, const Field& other) {
    for (std::size_t c = 0; c < C; ++c) {
      auto& a = comp_[c];
      const auto& b = other.comp_[c];
      for (std::size_t i = 0; i < a.size(); ++i) a[i] += s * b[i];
    }
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }
  friend Field operator-(Field a) { return a *= -1.0; }

  bool all_finite() const noexcept {
    for (const auto& a : comp_) {
      for (const auto& v : a) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
      }
    }
    return true;
  }

 private:
  GridPtr grid_;
  std::array<SpectralArray, C> comp_;
};

using ScalarField = Field<1>;
using VectorField = Field<3>;
using SymTensorField = Field<6>;
using TensorField = Field<9>;

/// Storage slot of (i, j) in a symmetric tensor.
constexpr std::size_t sym_index(std::size_t i, std::size_t j) noexcept {
  constexpr std::size_t table[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};
  return table[i][j];
}

/// Multiplicity of each stored component in the Frobenius pairing.
template <std::size_t C>
constexpr std::array<double, C> frobenius_weights() noexcept {
  std::array<double, C> w{};
  w.fill(1.0);
  if constexpr (C == 6) {
    w[3] = w[4] = w[5] = 2.0;
  }
  return w;
}

/// Discrete L2 inner product (Parseval): vol * sum_k Re(a_k conj(b_k)),
/// summed over components with Frobenius multiplicities.
template <std::size_t C>
double inner(const Field<C>& a, const Field<C>& b) {
  const Grid& g = a.grid();
  const auto w = frobenius_weights<C>();
  double sum = 0.0;
  for (std::size_t c = 0; c < C; ++c) {
    const auto& ac = a[c];
    const auto& bc = b[c];
    double part = 0.0;
    for (std::size_t i = 0; i < ac.size(); ++i) {
      part += g.hermitian_weight(i) * (ac[i].real() * bc[i].real() + ac[i].imag() * bc[i].imag());
    }
    sum += w[c] * part;
  }
  return g.volume() * sum;
}

template <std::size_t C>
double l2_norm(const Field<C>& a) {
  return std::sqrt(std::max(0.0, inner(a, a)));
}

/// Expand a symmetric tensor into full 3x3 storage.
inline TensorField to_full(const SymTensorField& s) {
  TensorField t(s.grid_ptr());
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) t[3 * i + j] = s[sym_index(i, j)];
  }
  return t;
}

/// Symmetric part (T + T^T)/2 of a full tensor.
inline SymTensorField symmetric_part(const TensorField& t) {
  SymTensorField s(t.grid_ptr());
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i; j < 3; ++j) {
      auto& out = s[sym_index(i, j)];
      const auto& a = t[3 * i + j];
      const auto& b = t[3 * j + i];
      for (std::size_t m = 0; m < out.size(); ++m) out[m] = 0.5 * (a[m] + b[m]);
    }
  }
  return s;
}

/// Full transpose of a 3x3 tensor field.
inline TensorField transpose(const TensorField& t) {
  TensorField r(t.grid_ptr());
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) r[3 * i + j] = t[3 * j + i];
  }
  return r;
}

}  // namespace oldroyd
