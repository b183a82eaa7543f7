#pragma once

#include <cstdint>

#include "mildns/field.hpp"

namespace mildns {

/// Taylor-Green vortex of unit wavenumber: in 2-D
///   u = A (sin 2pi x cos 2pi y, -cos 2pi x sin 2pi y);
/// in 3-D the same pattern times cos 2pi z with a zero third component.
VectorField taylor_green(const GridPtr& grid, double amplitude);
/// Exact Navier-Stokes solution at time t with kinematic viscosity nu (2-D).
VectorField taylor_green_exact(const GridPtr& grid, double amplitude, double nu, double t);
/// Kinematic pressure gradient grad(p/rho) = -(u.grad)u of the 2-D exact solution.
VectorField taylor_green_pressure_gradient(const GridPtr& grid, double amplitude, double nu, double t);

/// Random real field with Gaussian coefficients on modes |k|_inf <= kmax,
/// amplitude (1+|k|^2)^{-slope/2}, scaled to unit L2 norm. Nyquist modes and
/// (if mean_zero) the zero mode are excluded.
ScalarField random_field(const GridPtr& grid, std::uint64_t seed, std::uint32_t stream, int kmax, double slope,
                         bool mean_zero = true);
/// Leray projection of a random vector field, scaled to unit L2 norm.
VectorField random_divfree(const GridPtr& grid, std::uint64_t seed, std::uint32_t stream, int kmax, double slope);
VectorField random_vector(const GridPtr& grid, std::uint64_t seed, std::uint32_t stream, int kmax, double slope);

/// Mean-zero power-law field with coefficients |k|^{N/p - N} on every
/// non-Nyquist mode; behaves like |x|^{-N/p} near the origin.
ScalarField rough_field(const GridPtr& grid, double p);

/// |x|^{-exponent} around the origin times a smooth bump supported in
/// |x| < radius; the singular sample is evaluated at half a grid spacing.
ScalarField power_singularity(const GridPtr& grid, double exponent, double radius);

/// Smooth density perturbation A sin(2pi x) (times cos(2pi y) for N >= 2).
ScalarField density_wave(const GridPtr& grid, double amplitude);
/// Smooth random density perturbation rescaled so that max |a| = amplitude.
ScalarField density_random(const GridPtr& grid, std::uint64_t seed, double amplitude);

}  // namespace mildns
