#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mildns/semigroup.hpp"

namespace mildns {

/// Truncated additive noise sum_k Phi_k dbeta_k with time-constant coefficient fields.
struct NoiseModel {
  std::vector<VectorField> phi;
  std::uint64_t seed = 0;
  std::uint32_t stream_id = 0;

  int modes() const { return static_cast<int>(phi.size()); }
  bool zero() const;
};

/// Divergence-free eigenmodes amplitude |q|^{-decay} (q_perp/|q|) {cos,sin}(2 pi q.x),
/// lattice vectors taken in order of |q|^2, one per +/- pair, cosine before sine.
/// Throws ConfigError in one dimension.
NoiseModel eigenmode_noise(const GridPtr& grid, int modes, double amplitude, double decay, std::uint64_t seed);

struct CPhiTerms {
  double sup = 0.0;       // sum ||Phi_k||_inf^2
  double gradient = 0.0;  // sum ||grad Phi_k||_inf^2
  double laplacian = 0.0; // sum ||Delta Phi_k||_inf^2
  double grad_laplacian = 0.0;
  double value = 0.0;     // max of the four
};

/// Sup-norm sums over the retained modes; throws ConfigError if any is non-finite.
CPhiTerms compute_C_Phi_terms(const NoiseModel& model);
double compute_C_Phi(const NoiseModel& model);

/// Brownian increments dW_{k,j} ~ N(0, dt), indexed [step * modes + k].
struct WienerPath {
  double dt = 0.0;
  int steps = 0;
  int modes = 0;
  std::vector<double> increments;

  double operator()(int step, int mode) const {
    return increments[static_cast<std::size_t>(step) * static_cast<std::size_t>(modes) + static_cast<std::size_t>(mode)];
  }
  /// Path whose increments are sums of consecutive pairs (dt doubled).
  WienerPath coarsened() const;
};

/// Reproducible given (model.seed, model.stream_id, sample_index). Increment j
/// is addressed by the global step first_step + j, so consecutive windows of
/// one sample continue the same Brownian path.
WienerPath sample_increments(const NoiseModel& model, int steps, double dt, std::uint32_t sample_index,
                             int first_step = 0);

/// sum_k Phi_k dW_{k,step}.
VectorField noise_forcing(const NoiseModel& model, const WienerPath& path, int step, const GridPtr& grid);

/// z_{j+1} = S(dt) (z_j + sum_k Phi_k dW_{k,j}).
VectorField stochastic_convolution_step(const VectorField& z, const PropagatorStep& step, const NoiseModel& model,
                                        const WienerPath& path, int j);

/// Monte Carlo estimate against an exact value or a bound.
struct MonteCarloReport {
  std::string name;
  double estimate = 0.0;
  double exact_or_bound = 0.0;
  double rel_error = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  bool pass = false;
  nlohmann::json extra = nlohmann::json::object();
};

nlohmann::json to_json(const MonteCarloReport& r);

/// E ||int_0^t Phi dW||_2^2 against t sum_k ||Phi_k||_2^2; pass iff rel_error <= tolerance.
MonteCarloReport ito_isometry_check(const NoiseModel& model, double t, std::size_t samples, double tolerance = 0.05);

struct EnvelopeReport {
  std::vector<double> times;
  std::vector<double> mean_h3_sq;
  std::vector<double> p95_h3_sq;
  std::vector<double> sup_h3_sq;   // over sampled paths
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int r = 2;
  double moment_r = 0.0;           // E[X^r], X = ||z(T)||_{H3}
  double moment_r_half = 0.0;      // E[X^{r/2}]
  bool jensen_ordered = true;      // E[X^{r/2}]^2 <= E[X^r]
  std::size_t samples = 0;
};

/// Monte Carlo over z paths driven by one frozen generator: mean, 95th
/// percentile and maximum of ||z(t)||_{H3}^2 at every step, a linear fit of
/// the mean in t, and the r-th moment of ||z(T)||_{H3} (r even, >= 2).
EnvelopeReport moment_boundedness_check(const NoiseModel& model, const PropagatorStep& step, double horizon, int r,
                                        std::size_t samples);

std::string envelope_csv(const EnvelopeReport& r);

/// E sup_{s<=t} |M(s)|^2 <= K E<M>_t for M = sum_k phi_k beta_k with
/// phi_k = ||Phi_k||_2; K is Doob's constant 4. The literal m = 1 constant is
/// recorded in extra.
MonteCarloReport bdg_check(const NoiseModel& model, double t, int steps, std::size_t samples);

enum class SyntheticLaw { uniform, truncated_normal, two_point };

/// P[|X| > 2C] <= 2^{-r} with C = (E|X|^r)^{1/r} estimated from an independent half.
MonteCarloReport chebyshev_check(SyntheticLaw law, int r, std::size_t samples, std::uint64_t seed);

}  // namespace mildns
