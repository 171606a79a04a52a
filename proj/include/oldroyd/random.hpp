#pragma once

#include <cstdint>
#include <random>

#include "oldroyd/spectral/operators.hpp"
#include "oldroyd/spectral/transform.hpp"

namespace oldroyd {

/// Random real fields band-limited to 0 < |k| <= kmax, drawn by forward
/// transforming Gaussian samples and keeping the band. Reality and Hermitian
/// symmetry come for free from the real-to-complex transform. Every field is
/// rescaled to unit L2 norm.
class FieldSampler {
 public:
  FieldSampler(GridPtr grid, std::uint64_t seed) : grid_(std::move(grid)), rng_(seed) {}

  const GridPtr& grid() const noexcept { return grid_; }
  std::mt19937_64& engine() noexcept { return rng_; }

  template <std::size_t C>
  Field<C> band(double kmax) {
    const Grid& g = *grid_;
    std::normal_distribution<double> normal(0.0, 1.0);
    PhysicalField<C> p(grid_);
    for (auto& comp : p.comp) {
      for (auto& v : comp) v = normal(rng_);
    }
    Field<C> f = transform_forward(p);
    const double k2max = kmax * kmax;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double k2 = g.k2(i);
      if (k2 == 0.0 || k2 > k2max || g.is_nyquist(i)) {
        for (std::size_t c = 0; c < C; ++c) f[c][i] = Complex{};
      }
    }
    const double norm = l2_norm(f);
    if (norm > 0.0) f *= 1.0 / norm;
    return f;
  }

  ScalarField scalar(double kmax) { return band<1>(kmax); }

  VectorField solenoidal(double kmax) {
    VectorField u = leray_project(band<3>(kmax));
    const double norm = l2_norm(u);
    if (norm > 0.0) u *= 1.0 / norm;
    return u;
  }

  /// Solenoidal field plus a gradient part of comparable size.
  VectorField compressible(double kmax) {
    VectorField u = solenoidal(kmax);
    VectorField grad = gradient(scalar(kmax));
    grad *= 1.0 / l2_norm(grad);
    return u + grad;
  }

  SymTensorField symmetric(double kmax) { return band<6>(kmax); }
  TensorField tensor(double kmax) { return band<9>(kmax); }

 private:
  GridPtr grid_;
  std::mt19937_64 rng_;
};

}  // namespace oldroyd
