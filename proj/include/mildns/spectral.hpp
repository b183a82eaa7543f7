#pragma once

#include <functional>

#include "mildns/field.hpp"

namespace mildns {

/// Relative size of the zero mode below which a field counts as mean-zero.
inline constexpr double kMeanZeroTolerance = 1e-12;

Spectrum forward_transform(const ScalarField& f);
ScalarField inverse_transform(GridPtr grid, const Spectrum& coefficients);

/// lambda_k = sum_i (2 pi k_i)^2.
double laplacian_eigenvalue(const WaveIndex& k);

/// Multiply coefficient k by symbol(lambda_k).
ScalarField apply_radial_symbol(const ScalarField& f, const std::function<double(double)>& symbol);

ScalarField apply_laplacian(const ScalarField& f);
VectorField apply_laplacian(const VectorField& u);

/// Solves Delta w = f for mean-zero f; throws DomainError when f carries a mean.
ScalarField inverse_laplacian(const ScalarField& f);
/// Divides coefficient k by lambda_k^{1/2}; same domain as inverse_laplacian.
ScalarField inverse_sqrt_laplacian(const ScalarField& f);

/// Exact spectral derivative d/dx_axis; the Nyquist mode is dropped.
ScalarField partial_derivative(const ScalarField& f, int axis);
VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& u);

/// Orthogonal projection onto divergence-free fields.
VectorField leray_project(const VectorField& u);

/// Zero every mode outside the two-thirds band.
ScalarField dealias(const ScalarField& f);
VectorField dealias(const VectorField& u);
/// dealias(a * b).
ScalarField dealiased_product(const ScalarField& a, const ScalarField& b);

/// Throws DomainError unless |mean(f)| <= kMeanZeroTolerance * ||f||_2.
void require_mean_zero(const ScalarField& f, const char* operation);

}  // namespace mildns
