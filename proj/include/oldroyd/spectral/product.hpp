#pragma once

#include <array>
#include <utility>
#include <vector>

#include "oldroyd/spectral/field.hpp"
#include "oldroyd/spectral/operators.hpp"

namespace oldroyd {

namespace detail {

/// Per-thread scratch for padded products. Reusing it avoids zeroing and
/// faulting in tens of megabytes of fresh memory on every product.
struct PaddedWorkspace {
  std::vector<PhysicalArray> phys;
  SpectralArray spec;

  void reserve(std::size_t count, std::size_t physical, std::size_t spectral) {
    if (phys.size() < count) phys.resize(count);
    for (std::size_t c = 0; c < count; ++c) {
      if (phys[c].size() != physical) phys[c].resize(physical);
    }
    if (spec.size() != spectral) spec.resize(spectral);
  }
};

inline PaddedWorkspace& padded_workspace() {
  thread_local PaddedWorkspace ws;
  return ws;
}

}  // namespace detail

/// Evaluates a pointwise map on the 3/2-padded grid.
///
/// Each input coefficient array is zero-padded, brought to physical space
/// on the padded grid, and `fn(in, out)` is applied at every sample with
/// `in` a std::array<double, NIn> and `out` a std::array<double, NOut>&.
/// The outputs are transformed back and truncated to the base band with
/// Nyquist modes zeroed. For a map that is at most quadratic in inputs
/// with no Nyquist content, the retained coefficients are exact.
template <std::size_t NOut, std::size_t NIn, class Fn>
std::array<SpectralArray, NOut> padded_map(const Grid& g,
                                           const std::array<const SpectralArray*, NIn>& inputs,
                                           Fn&& fn) {
  const std::size_t base = g.spectral_size();
  const std::size_t mp = g.padded_physical_size();
  const std::size_t ms = g.padded_spectral_size();

  detail::PaddedWorkspace& ws = detail::padded_workspace();
  ws.reserve(NIn + NOut, mp, ms);
  SpectralArray& buf = ws.spec;
  for (std::size_t c = 0; c < NIn; ++c) {
    std::fill(buf.begin(), buf.end(), Complex{});
    const SpectralArray& src = *inputs[c];
    for (std::size_t i = 0; i < base; ++i) {
      const std::size_t p = g.padded_index(i);
      if (p != Grid::npos) buf[p] = src[i];
    }
    g.inverse_padded(buf.data(), ws.phys[c].data());
  }

  std::array<const double*, NIn> src{};
  std::array<double*, NOut> dst{};
  for (std::size_t c = 0; c < NIn; ++c) src[c] = ws.phys[c].data();
  for (std::size_t c = 0; c < NOut; ++c) dst[c] = ws.phys[NIn + c].data();
  // Blocked so that each component array is streamed a block at a time
  // instead of touching NIn + NOut pages for every sample.
  constexpr std::size_t kBlock = 128;
  std::array<std::array<double, NIn>, kBlock> in{};
  std::array<std::array<double, NOut>, kBlock> out{};
  for (std::size_t p0 = 0; p0 < mp; p0 += kBlock) {
    const std::size_t len = std::min(kBlock, mp - p0);
    for (std::size_t c = 0; c < NIn; ++c) {
      const double* s = src[c] + p0;
      for (std::size_t q = 0; q < len; ++q) in[q][c] = s[q];
    }
    for (std::size_t q = 0; q < len; ++q) fn(in[q], out[q]);
    for (std::size_t c = 0; c < NOut; ++c) {
      double* d = dst[c] + p0;
      for (std::size_t q = 0; q < len; ++q) d[q] = out[q][c];
    }
  }

  const double scale = 1.0 / static_cast<double>(mp);
  std::array<SpectralArray, NOut> result;
  for (std::size_t c = 0; c < NOut; ++c) {
    g.forward_padded(dst[c], buf.data());
    result[c].assign(base, Complex{});
    for (std::size_t i = 0; i < base; ++i) {
      const std::size_t p = g.padded_index(i);
      if (p != Grid::npos) result[c][i] = scale * buf[p];
    }
  }
  return result;
}

/// Flattens the component arrays of several fields into one pointer array.
template <std::size_t... Cs>
std::array<const SpectralArray*, (Cs + ...)> components_of(const Field<Cs>&... fields) {
  std::array<const SpectralArray*, (Cs + ...)> out{};
  std::size_t pos = 0;
  auto push = [&](const auto& f) {
    for (std::size_t c = 0; c < std::remove_cvref_t<decltype(f)>::kComponents; ++c) {
      out[pos++] = &f[c];
    }
  };
  (push(fields), ...);
  return out;
}

/// Moves NOut arrays starting at `offset` into a C-component field.
template <std::size_t C, std::size_t N>
Field<C> take_field(const GridPtr& grid, std::array<SpectralArray, N>& arrays,
                    std::size_t offset = 0) {
  std::array<SpectralArray, C> comps;
  for (std::size_t c = 0; c < C; ++c) comps[c] = std::move(arrays[offset + c]);
  return Field<C>(grid, std::move(comps));
}

/// Pointwise product of two scalars.
inline ScalarField multiply(const ScalarField& a, const ScalarField& b) {
  auto r = padded_map<1>(a.grid(), components_of(a, b),
                         [](const auto& in, auto& out) { out[0] = in[0] * in[1]; });
  return take_field<1>(a.grid_ptr(), r);
}

/// Pointwise scaling of every component of f by the scalar s.
template <std::size_t C>
Field<C> scale_pointwise(const ScalarField& s, const Field<C>& f) {
  auto r = padded_map<C>(s.grid(), components_of(s, f), [](const auto& in, auto& out) {
    for (std::size_t c = 0; c < C; ++c) out[c] = in[0] * in[1 + c];
  });
  return take_field<C>(s.grid_ptr(), r);
}

/// Advection u.grad f, applied to each component of f.
template <std::size_t C>
Field<C> advect(const VectorField& u, const Field<C>& f) {
  const Field<3 * C> grad = gradient(f);
  auto r = padded_map<C>(u.grid(), components_of(u, grad), [](const auto& in, auto& out) {
    for (std::size_t c = 0; c < C; ++c) {
      out[c] = in[0] * in[3 + 3 * c] + in[1] * in[4 + 3 * c] + in[2] * in[5 + 3 * c];
    }
  });
  return take_field<C>(u.grid_ptr(), r);
}

/// Pointwise 3x3 matrix product A B of two full tensor fields.
inline TensorField matmul(const TensorField& a, const TensorField& b) {
  auto r = padded_map<9>(a.grid(), components_of(a, b), [](const auto& in, auto& out) {
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        double acc = 0.0;
        for (std::size_t l = 0; l < 3; ++l) acc += in[3 * i + l] * in[9 + 3 * l + j];
        out[3 * i + j] = acc;
      }
    }
  });
  return take_field<9>(a.grid_ptr(), r);
}

}  // namespace oldroyd
