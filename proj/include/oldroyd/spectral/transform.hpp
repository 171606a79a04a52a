#pragma once

#include <array>
#include <span>
#include <string>

#include "oldroyd/spectral/field.hpp"

namespace oldroyd {

/// Physical-space samples of a C-component field, x1-fastest per component.
template <std::size_t C>
struct PhysicalField {
  GridPtr grid;
  std::array<PhysicalArray, C> comp;

  explicit PhysicalField(GridPtr g) : grid(std::move(g)) {
    for (auto& c : comp) c.assign(grid->physical_size(), 0.0);
  }

  double& at(std::size_t c, int i1, int i2, int i3) {
    const auto n = static_cast<std::size_t>(grid->n());
    return comp[c][static_cast<std::size_t>(i1) + n * (static_cast<std::size_t>(i2) +
                                                        n * static_cast<std::size_t>(i3))];
  }
  double at(std::size_t c, int i1, int i2, int i3) const {
    return const_cast<PhysicalField*>(this)->at(c, i1, i2, i3);
  }
};

template <std::size_t C>
Field<C> transform_forward(const PhysicalField<C>& phys) {
  const Grid& g = *phys.grid;
  Field<C> out(phys.grid);
  for (std::size_t c = 0; c < C; ++c) {
    if (phys.comp[c].size() != g.physical_size()) {
      throw SizeMismatch("component " + std::to_string(c) + " has " +
                         std::to_string(phys.comp[c].size()) + " samples, grid expects " +
                         std::to_string(g.physical_size()));
    }
    g.forward(phys.comp[c].data(), out[c].data());
  }
  return out;
}

/// Single scalar from a flat sample span.
inline ScalarField transform_forward(GridPtr grid, std::span<const double> samples) {
  if (samples.size() != grid->physical_size()) {
    throw SizeMismatch("got " + std::to_string(samples.size()) + " samples, grid expects " +
                       std::to_string(grid->physical_size()));
  }
  PhysicalField<1> phys(grid);
  std::copy(samples.begin(), samples.end(), phys.comp[0].begin());
  return transform_forward(phys);
}

template <std::size_t C>
PhysicalField<C> transform_inverse(const Field<C>& f) {
  const Grid& g = f.grid();
  PhysicalField<C> out(f.grid_ptr());
  for (std::size_t c = 0; c < C; ++c) {
    if (f[c].size() != g.spectral_size()) throw SizeMismatch("spectral size mismatch");
    g.inverse(f[c].data(), out.comp[c].data());
  }
  return out;
}

/// Samples fn(x1, x2, x3) -> std::array<double, C> on the grid and transforms.
template <std::size_t C, class Fn>
Field<C> sample_field(const GridPtr& grid, Fn&& fn) {
  PhysicalField<C> phys(grid);
  const int n = grid->n();
  for (int i3 = 0; i3 < n; ++i3) {
    for (int i2 = 0; i2 < n; ++i2) {
      for (int i1 = 0; i1 < n; ++i1) {
        const std::array<double, C> v =
            fn(grid->coordinate(i1), grid->coordinate(i2), grid->coordinate(i3));
        for (std::size_t c = 0; c < C; ++c) phys.at(c, i1, i2, i3) = v[c];
      }
    }
  }
  return transform_forward(phys);
}

template <class Fn>
ScalarField sample_scalar(const GridPtr& grid, Fn&& fn) {
  return sample_field<1>(grid, [&](double x, double y, double z) {
    return std::array<double, 1>{fn(x, y, z)};
  });
}

}  // namespace oldroyd
