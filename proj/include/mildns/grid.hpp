#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace mildns {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

/// Integer wave vector on the lattice of a torus grid.
class WaveIndex {
 public:
  WaveIndex() = default;
  WaveIndex(std::initializer_list<int> k);
  explicit WaveIndex(std::span<const int> k);

  int dim() const { return dim_; }
  int operator[](int axis) const { return k_[static_cast<std::size_t>(axis)]; }
  std::span<const int> values() const { return {k_.data(), static_cast<std::size_t>(dim_)}; }

  bool operator==(const WaveIndex&) const = default;

 private:
  std::array<int, 3> k_{};
  int dim_ = 0;
};

class FftPlans;

/// Uniform discretization of the unit torus [0,1]^N, N in {1,2,3}.
///
/// Samples are stored row-major (last axis fastest). Spectral arrays use the
/// same layout in FFT order, so flat index i along an axis carries wavenumber
/// i for i < M/2 and i - M otherwise; the Nyquist index M/2 maps to -M/2.
class TorusGrid {
 public:
  explicit TorusGrid(std::vector<int> resolution);
  ~TorusGrid();
  TorusGrid(const TorusGrid&) = delete;
  TorusGrid& operator=(const TorusGrid&) = delete;

  int dim() const { return dim_; }
  int resolution(int axis) const { return res_[static_cast<std::size_t>(axis)]; }
  std::span<const int> resolutions() const { return {res_.data(), static_cast<std::size_t>(dim_)}; }
  std::size_t size() const { return size_; }
  double spacing(int axis) const { return 1.0 / resolution(axis); }
  std::string describe() const;

  /// Multi-index of a flat sample/spectral index.
  std::array<int, 3> unflatten(std::size_t flat) const;
  std::size_t flatten(std::span<const int> index) const;
  /// Physical coordinate of sample `flat` along `axis`.
  double coordinate(std::size_t flat, int axis) const;

  int wavenumber(int axis, int index) const;
  WaveIndex wave_index(std::size_t flat) const;
  /// Flat spectral position of a lattice vector; entries must be in range.
  std::size_t spectral_index(const WaveIndex& k) const;
  bool in_lattice(const WaveIndex& k) const;

  /// lambda_k = sum_i (2 pi k_i)^2 for each spectral slot.
  std::span<const double> eigenvalues() const { return lambda_; }
  /// 2 pi k_axis with the Nyquist entry zeroed, used for odd derivatives.
  std::span<const double> derivative_symbol(int axis) const {
    return deriv_[static_cast<std::size_t>(axis)];
  }
  /// 1 for modes kept by the two-thirds rule, 0 otherwise.
  std::span<const unsigned char> dealias_mask() const { return dealias_; }
  /// 1 if any axis sits on its Nyquist wavenumber.
  std::span<const unsigned char> nyquist_mask() const { return nyquist_; }

  const FftPlans& fft() const { return *fft_; }

  bool same_shape(const TorusGrid& other) const;

 private:
  int dim_;
  std::array<int, 3> res_{1, 1, 1};
  std::size_t size_ = 1;
  std::vector<double> lambda_;
  std::array<std::vector<double>, 3> deriv_;
  std::vector<unsigned char> dealias_;
  std::vector<unsigned char> nyquist_;
  std::unique_ptr<FftPlans> fft_;
};

using GridPtr = std::shared_ptr<const TorusGrid>;

GridPtr make_grid(std::vector<int> resolution);
/// Square/cubic grid of `dim` axes with `m` points each.
GridPtr make_grid(int dim, int m);

}  // namespace mildns
