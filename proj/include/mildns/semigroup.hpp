#pragma once

#include <memory>
#include <vector>

#include "mildns/transport.hpp"

namespace mildns {

/// Variable-coefficient diffusion A f = c(x) Laplacian f with c = mu / (rho_bar (1 + a)).
class Generator {
 public:
  /// Throws ConfigError for non-positive mu or rho_bar and DensityBandError
  /// when 1 + a <= density_floor anywhere (density_floor >= 0).
  Generator(double mu, double rho_bar, const DensityState& density, double density_floor = 0.0);

  double mu() const { return mu_; }
  double rho_bar() const { return rho_bar_; }
  const ScalarField& coefficient() const { return c_; }
  const ScalarField& inverse_coefficient() const { return inverse_c_; }
  /// 1 + a, the density relative to rho_bar.
  const ScalarField& relative_density() const { return density_; }
  double c_min() const { return c_min_; }
  double c_max() const { return c_max_; }
  /// mean(1/c); the preconditioner shift.
  double mean_inverse() const { return mean_inverse_; }
  bool constant() const { return c_min_ == c_max_; }

  ScalarField apply(const ScalarField& f) const;
  VectorField apply(const VectorField& u) const;

 private:
  double mu_;
  double rho_bar_;
  ScalarField density_;
  ScalarField c_;
  ScalarField inverse_c_;
  double c_min_ = 0.0;
  double c_max_ = 0.0;
  double mean_inverse_ = 0.0;
};

enum class Scheme { exact_constant, crank_nicolson };

struct PropagatorStep {
  std::shared_ptr<const Generator> generator;
  double dt = 0.0;
  Scheme scheme = Scheme::crank_nicolson;
};

/// exact_constant for constant coefficients, crank_nicolson otherwise.
PropagatorStep make_step(std::shared_ptr<const Generator> generator, double dt);

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;
};

inline constexpr double kSolveTolerance = 1e-11;
inline constexpr int kSolveMaxIterations = 200;

/// One propagator step. exact_constant multiplies mode k by exp(-c lambda_k dt)
/// and requires a constant coefficient. crank_nicolson solves
///   (1/c - dt/2 Delta) w = f/c + dt/2 Delta f
/// by preconditioned conjugate gradients; it conserves mean(w/c) and
/// contracts in the norm weighted by 1/c. Throws NumericalError on stall.
ScalarField apply_semigroup(const PropagatorStep& step, const ScalarField& f, SolveStats* stats = nullptr);
VectorField apply_semigroup(const PropagatorStep& step, const VectorField& u, SolveStats* stats = nullptr);

struct DissipativityReport {
  double min_ratio = 0.0;             // in the 1/c-weighted norm
  double min_unweighted_ratio = 0.0;  // plain L2, reported only
  std::size_t probes = 0;
  bool pass = false;
};

/// min over probes of ||(lambda I - A) g|| / (lambda ||g||); pass iff >= 1 - 1e-9.
DissipativityReport dissipativity_check(const Generator& gen, double lambda, const std::vector<ScalarField>& probes);

struct DecayReport {
  std::vector<double> times;
  std::vector<double> generator_norms;  // ||A S(t) f||_2
  std::vector<double> lq_norms;         // |S(t) f|_q
  double generator_slope = 0.0;
  double generator_r_squared = 0.0;
  double lq_slope = 0.0;
  double lq_r_squared = 0.0;
  double lq_expected_slope = 0.0;       // -(N/2)(1/p - 1/q)
};

/// Exact Fourier evaluation for a constant-coefficient generator.
DecayReport decay_probe(const Generator& gen, const ScalarField& f, const std::vector<double>& times, double p,
                        double q);

struct CommutationReport {
  double commutator_norm = 0.0;  // ||grad S f - S grad f||_2
  double gradient_norm = 0.0;    // ||grad f||_2
  double relative = 0.0;
  bool exact_scheme = false;
  bool pass = true;              // checked only for exact_constant
};

CommutationReport gradient_commutation_check(const PropagatorStep& step, const ScalarField& f);

}  // namespace mildns
