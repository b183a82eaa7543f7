#pragma once

#include <array>
#include <span>
#include <vector>

#include "mildns/field.hpp"

namespace mildns {

/// Velocity samples u(t_j) at t_j = j * dt, j = 0..n-1; linear in time between samples.
struct VelocityHistory {
  double dt = 0.0;
  std::vector<VectorField> samples;

  double end_time() const { return samples.empty() ? 0.0 : dt * static_cast<double>(samples.size() - 1); }
  /// Throws InputError unless the history is non-empty, dt > 0 and it covers [0, t].
  void require_covers(double t) const;
  /// Time-reversed, negated history over [0, end_time()].
  VelocityHistory reversed() const;
};

/// Density perturbation a with the extremes of 1 + a.
struct DensityState {
  ScalarField a;
  double lower = 1.0;
  double upper = 1.0;

  explicit DensityState(ScalarField field);
};

/// Tensor-product periodic cubic Lagrange interpolation at a point of the unit torus.
double interpolate(const ScalarField& f, std::span<const double> x);

/// Foot of the characteristic through (x, t): x - int_0^t u ds, by explicit
/// midpoint steps on the history grid, wrapped into [0,1)^N.
std::array<double, 3> backtrack_foot(std::span<const double> x, const VelocityHistory& history, double t);

/// a0 evaluated at the feet of all grid points, clamped to [min a0, max a0].
DensityState advect_density(const ScalarField& a0, const VelocityHistory& history, double t);

/// a at every history time t_j, built by composing one-step displacement maps.
/// Entry j equals a0 advected to t_j.
std::vector<DensityState> advect_trajectory(const ScalarField& a0, const VelocityHistory& history);

/// max over Fourier probes of ||grad e||_inf / ||Hessian e||_p.
double calibrate_embedding_constant(const GridPtr& grid, double p);

struct SobolevGrowthReport {
  double measured = 0.0;        // |a|_{2,p}
  double initial = 0.0;         // |a0|_{2,p}
  double bound = 0.0;           // |a0|_{2,p} (1 + t C6 sup |Hess u|_p)
  double bound_factor = 1.0;
  double hessian_measured = 0.0;
  double hessian_bound = 0.0;   // |Hess a0|_p (1 + t C6 sup |Hess u|_p)
  double embedding_constant = 0.0;
  bool violated = false;
};

SobolevGrowthReport sobolev_growth_diagnostic(const DensityState& a, const ScalarField& a0,
                                              const VelocityHistory& history, double t, double p,
                                              double embedding_constant);

}  // namespace mildns
