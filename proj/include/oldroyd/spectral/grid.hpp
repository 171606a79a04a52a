#pragma once

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <new>
#include <numbers>
#include <vector>

#include "oldroyd/errors.hpp"

namespace oldroyd {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// std::allocator replacement backed by fftw_malloc, so that every buffer a
/// plan is executed on has the alignment the plan was created with.
template <class T>
struct FftwAllocator {
  using value_type = T;

  FftwAllocator() = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) noexcept {}

  T* allocate(std::size_t count) {
    void* p = fftw_malloc(count * sizeof(T));
    if (p == nullptr) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { fftw_free(p); }

  friend bool operator==(const FftwAllocator&, const FftwAllocator&) noexcept {
    return true;
  }
};

using SpectralArray = std::vector<Complex, FftwAllocator<Complex>>;
using PhysicalArray = std::vector<double, FftwAllocator<double>>;

using Wavenumber = std::array<int, 3>;

/// Periodic box [0, 2pi)^3 sampled on n^3 points, plus the 3/2-padded
/// grid used for alias-free quadratic products.
///
/// Physical samples are stored x1-fastest: index = i1 + n*(i2 + n*i3).
/// Spectral coefficients use the real-to-complex half layout with the
/// x1 direction halved: index = j1 + (n/2+1)*(j2 + n*j3), k1 = j1 in
/// [0, n/2], k2 and k3 in [-n/2, n/2). The coefficient of mode k is the
/// amplitude of exp(i k.x).
///
/// Differential symbols use the effective wavevector, in which any
/// component sitting on the Nyquist plane (|k_d| = n/2) is replaced by 0.
/// Every operator built on it (gradient, divergence, Laplacian, Leray
/// projection, |grad|^s) is then Hermitian-consistent and mutually exact.
class Grid {
 public:
  static std::shared_ptr<const Grid> make(int n) {
    if (n < 8 || n % 2 != 0) {
      throw OutOfRange("grid.n", "must be even and >= 8, got " + std::to_string(n));
    }
    return std::shared_ptr<const Grid>(new Grid(n));
  }

  ~Grid() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
    pad_fwd_.destroy();
    pad_inv_.destroy();
  }

  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  int n() const noexcept { return n_; }
  /// Product-grid size: ceil(3n/2) rounded up to even.
  int padded_n() const noexcept { return m_; }

  std::size_t physical_size() const noexcept { return cube(n_); }
  std::size_t spectral_size() const noexcept { return spectral_size(n_); }
  std::size_t padded_physical_size() const noexcept { return cube(m_); }
  std::size_t padded_spectral_size() const noexcept { return spectral_size(m_); }

  double length() const noexcept { return kTwoPi; }
  double spacing() const noexcept { return kTwoPi / n_; }
  double volume() const noexcept { return kTwoPi * kTwoPi * kTwoPi; }

  /// Physical coordinate of sample index i along any axis.
  double coordinate(int i) const noexcept { return spacing() * i; }

  const Wavenumber& wavenumber(std::size_t idx) const noexcept { return modes_[idx].k; }
  const std::array<double, 3>& effective_k(std::size_t idx) const noexcept {
    return modes_[idx].k_eff;
  }
  /// |k_eff|^2.
  double k2(std::size_t idx) const noexcept { return modes_[idx].k2; }
  /// Number of full-spectrum modes represented by this stored coefficient (1 or 2).
  double hermitian_weight(std::size_t idx) const noexcept { return modes_[idx].weight; }
  bool is_nyquist(std::size_t idx) const noexcept { return modes_[idx].nyquist; }

  /// Stored index of mode k (or of -k when k1 < 0, with conjugate flag set).
  struct Location {
    std::size_t index;
    bool conjugate;
  };
  Location locate(const Wavenumber& k) const {
    for (int v : k) {
      if (v < -n_ / 2 || v > n_ / 2) throw OutOfRange("wavenumber", "outside grid band");
    }
    Wavenumber q = k;
    bool conj = false;
    if (q[0] < 0) {
      q = {-q[0], -q[1], -q[2]};
      conj = true;
    }
    auto wrap = [this](int v) { return static_cast<std::size_t>(((v % n_) + n_) % n_); };
    const std::size_t h = n_ / 2 + 1;
    return {static_cast<std::size_t>(q[0]) + h * (wrap(q[1]) + n_ * wrap(q[2])), conj};
  }

  /// Index of a base-grid coefficient inside the padded spectrum;
  /// npos for Nyquist modes, which products treat as zero.
  std::size_t padded_index(std::size_t idx) const noexcept { return pad_map_[idx]; }
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  /// r2c on the base grid; output scaled by 1/n^3.
  void forward(const double* phys, Complex* spec) const {
    fftw_execute_dft_r2c(forward_, const_cast<double*>(phys),
                         reinterpret_cast<fftw_complex*>(spec));
    const double scale = 1.0 / static_cast<double>(physical_size());
    std::for_each(spec, spec + spectral_size(), [scale](Complex& c) { c *= scale; });
  }

  /// c2r on the base grid; the input is left untouched.
  void inverse(const Complex* spec, double* phys) const {
    SpectralArray scratch(spec, spec + spectral_size());
    fftw_execute_dft_c2r(inverse_, reinterpret_cast<fftw_complex*>(scratch.data()), phys);
  }

  /// r2c on the padded grid, unscaled. Only the coefficients that map back
  /// to non-Nyquist base modes (see padded_index) are computed; every other
  /// entry of `spec` is left unspecified.
  void forward_padded(const double* phys, Complex* spec) const {
    auto* c = reinterpret_cast<fftw_complex*>(spec);
    fftw_execute_dft_r2c(pad_fwd_.x, const_cast<double*>(phys), c);
    fftw_execute_dft(pad_fwd_.y, c, c);
    fftw_execute_dft(pad_fwd_.z_lo, c, c);
    fftw_execute_dft(pad_fwd_.z_hi, c + pad_hi_offset_, c + pad_hi_offset_);
  }

  /// c2r on the padded grid; destroys the input, which must vanish outside
  /// the embedded base band. One-dimensional passes skip the rows that are
  /// known to be zero.
  void inverse_padded(Complex* spec, double* phys) const {
    auto* c = reinterpret_cast<fftw_complex*>(spec);
    fftw_execute_dft(pad_inv_.z_lo, c, c);
    fftw_execute_dft(pad_inv_.z_hi, c + pad_hi_offset_, c + pad_hi_offset_);
    fftw_execute_dft(pad_inv_.y, c, c);
    fftw_execute_dft_c2r(pad_inv_.x, c, phys);
  }

 private:
  struct ModeInfo {
    Wavenumber k;
    std::array<double, 3> k_eff;
    double k2;
    double weight;
    bool nyquist;
  };

  static std::size_t cube(int v) noexcept {
    return static_cast<std::size_t>(v) * v * v;
  }
  static std::size_t spectral_size(int v) noexcept {
    return static_cast<std::size_t>(v) * v * (v / 2 + 1);
  }

  static std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
  }

  explicit Grid(int n) : n_(n), m_(((3 * n + 1) / 2 + 1) / 2 * 2) {
    build_mode_table();
    std::lock_guard lock(planner_mutex());
    PhysicalArray phys(physical_size());
    SpectralArray spec(spectral_size());
    forward_ = fftw_plan_dft_r2c_3d(n_, n_, n_, phys.data(),
                                    reinterpret_cast<fftw_complex*>(spec.data()),
                                    FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_3d(n_, n_, n_, reinterpret_cast<fftw_complex*>(spec.data()),
                                    phys.data(), FFTW_ESTIMATE);
    PhysicalArray pphys(padded_physical_size());
    SpectralArray pspec(padded_spectral_size());
    plan_padded(pphys.data(), reinterpret_cast<fftw_complex*>(pspec.data()));
  }

  /// Pruned padded transforms. The band occupies j1 < n/2 and, along the
  /// other two axes, the rows 0..n/2-1 and M-n/2+1..M-1.
  void plan_padded(double* phys, fftw_complex* spec) {
    const int m = m_;
    const int h = m_ / 2 + 1;
    const int k1 = n_ / 2;
    const int lo = n_ / 2;
    const int hi = n_ / 2 - 1;
    pad_hi_offset_ = static_cast<std::size_t>(h) * (m - hi);
    fftw_complex* spec_hi = spec + pad_hi_offset_;

    const fftw_iodim along_z{m, h * m, h * m};
    const fftw_iodim along_y{m, h, h};
    const fftw_iodim z_lo_many[2] = {{k1, 1, 1}, {lo, h, h}};
    const fftw_iodim z_hi_many[2] = {{k1, 1, 1}, {hi, h, h}};
    const fftw_iodim y_many[2] = {{k1, 1, 1}, {m, h * m, h * m}};
    const fftw_iodim x_c2r{m, 1, 1};
    const fftw_iodim x_c2r_many{m * m, h, m};
    const fftw_iodim x_r2c_many{m * m, m, h};

    for (int sign : {FFTW_BACKWARD, FFTW_FORWARD}) {
      PaddedPlans& p = sign == FFTW_BACKWARD ? pad_inv_ : pad_fwd_;
      p.z_lo = fftw_plan_guru_dft(1, &along_z, 2, z_lo_many, spec, spec, sign, FFTW_ESTIMATE);
      p.z_hi = fftw_plan_guru_dft(1, &along_z, 2, z_hi_many, spec_hi, spec_hi, sign, FFTW_ESTIMATE);
      p.y = fftw_plan_guru_dft(1, &along_y, 2, y_many, spec, spec, sign, FFTW_ESTIMATE);
    }
    pad_inv_.x = fftw_plan_guru_dft_c2r(1, &x_c2r, 1, &x_c2r_many, spec, phys, FFTW_ESTIMATE);
    pad_fwd_.x = fftw_plan_guru_dft_r2c(1, &x_c2r, 1, &x_r2c_many, phys, spec, FFTW_ESTIMATE);
    for (const PaddedPlans* p : {&pad_inv_, &pad_fwd_}) {
      if (!p->x || !p->y || !p->z_lo || !p->z_hi) throw Error("FFTW could not plan padded transforms");
    }
  }

  void build_mode_table() {
    const int h = n_ / 2 + 1;
    const int mh = m_ / 2 + 1;
    modes_.resize(spectral_size());
    pad_map_.resize(spectral_size());
    std::size_t idx = 0;
    for (int j3 = 0; j3 < n_; ++j3) {
      for (int j2 = 0; j2 < n_; ++j2) {
        for (int j1 = 0; j1 < h; ++j1, ++idx) {
          const Wavenumber k{j1, j2 < n_ / 2 ? j2 : j2 - n_, j3 < n_ / 2 ? j3 : j3 - n_};
          ModeInfo info{};
          info.k = k;
          info.nyquist = false;
          double k2 = 0.0;
          for (int d = 0; d < 3; ++d) {
            const bool nyq = (k[d] == n_ / 2) || (k[d] == -n_ / 2);
            info.nyquist = info.nyquist || nyq;
            info.k_eff[d] = nyq ? 0.0 : static_cast<double>(k[d]);
            k2 += info.k_eff[d] * info.k_eff[d];
          }
          info.k2 = k2;
          info.weight = (j1 == 0 || j1 == n_ / 2) ? 1.0 : 2.0;
          modes_[idx] = info;
          if (info.nyquist) {
            pad_map_[idx] = npos;
          } else {
            const int p2 = k[1] >= 0 ? k[1] : k[1] + m_;
            const int p3 = k[2] >= 0 ? k[2] : k[2] + m_;
            pad_map_[idx] = static_cast<std::size_t>(k[0]) +
                            static_cast<std::size_t>(mh) *
                                (static_cast<std::size_t>(p2) +
                                 static_cast<std::size_t>(m_) * static_cast<std::size_t>(p3));
          }
        }
      }
    }
  }

  int n_;
  int m_;
  std::vector<ModeInfo> modes_;
  std::vector<std::size_t> pad_map_;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
  struct PaddedPlans {
    fftw_plan x = nullptr;
    fftw_plan y = nullptr;
    fftw_plan z_lo = nullptr;
    fftw_plan z_hi = nullptr;

    void destroy() noexcept {
      for (fftw_plan q : {x, y, z_lo, z_hi}) {
        if (q) fftw_destroy_plan(q);
      }
    }
  };
  PaddedPlans pad_fwd_;
  PaddedPlans pad_inv_;
  std::size_t pad_hi_offset_ = 0;
};

using GridPtr = std::shared_ptr<const Grid>;

}  // namespace oldroyd
