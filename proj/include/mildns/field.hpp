#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mildns/grid.hpp"

namespace mildns {

/// Real periodic function sampled on a torus grid.
///
/// Fields are immutable values. The spectral view is produced on demand by
/// coefficients() (forward transform, unnormalized); inverse transforms divide
/// by the grid size.
class ScalarField {
 public:
  ScalarField(GridPtr grid, std::vector<double> values, bool mean_zero = false);

  static ScalarField zeros(GridPtr grid);
  static ScalarField constant(GridPtr grid, double value);
  static ScalarField from_function(GridPtr grid, const std::function<double(std::span<const double>)>& fn);
  /// Real part of the inverse transform of `coefficients`.
  static ScalarField from_coefficients(GridPtr grid, const Spectrum& coefficients, bool mean_zero = false);

  const TorusGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  Spectrum coefficients() const;
  bool mean_zero() const { return mean_zero_; }
  double mean() const;
  double min() const;
  double max() const;

  ScalarField map(const std::function<double(double)>& fn) const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
  bool mean_zero_;
};

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);
ScalarField operator-(const ScalarField& a);
/// Pointwise product (no dealiasing).
ScalarField product(const ScalarField& a, const ScalarField& b);
ScalarField remove_mean(const ScalarField& f);

/// N scalar components sharing one grid.
class VectorField {
 public:
  explicit VectorField(std::vector<ScalarField> components, bool divergence_free = false);

  static VectorField zeros(GridPtr grid);

  int dim() const { return static_cast<int>(components_.size()); }
  const TorusGrid& grid() const { return components_.front().grid(); }
  const GridPtr& grid_ptr() const { return components_.front().grid_ptr(); }
  const ScalarField& operator[](int i) const { return components_[static_cast<std::size_t>(i)]; }
  std::span<const ScalarField> components() const { return components_; }
  bool divergence_free() const { return divergence_free_; }
  VectorField with_divergence_free(bool flag) const;

 private:
  std::vector<ScalarField> components_;
  bool divergence_free_;
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(double s, const VectorField& a);
/// Multiply every component by a scalar field pointwise.
VectorField product(const ScalarField& s, const VectorField& u);

/// True when every sample of both fields is finite.
bool all_finite(const ScalarField& f);
bool all_finite(const VectorField& u);

/// Largest pointwise absolute difference.
double max_abs_diff(const ScalarField& a, const ScalarField& b);
double max_abs_diff(const VectorField& a, const VectorField& b);

}  // namespace mildns
