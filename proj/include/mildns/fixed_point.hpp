#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mildns/noise.hpp"

namespace mildns {

enum class WindowMode { auto_formula, fixed };
/// Density weight in the pressure source term mu grad(rho) . Delta v / rho^k.
enum class PressureForm { inverse_square, inverse };

struct SolverConfig {
  double mu = 0.01;
  double rho_bar = 1.0;
  double p = 4.0;
  int dim = 2;
  double horizon = 0.1;  // T
  double dt = 1e-3;
  double picard_tol = 1e-8;
  int max_levels = 20;
  WindowMode window_mode = WindowMode::fixed;
  double fixed_window = 0.0;  // 0 means the whole horizon
  double constant_M = 2.0;
  double alpha_margin = 1e-3;  // root-find alpha(T) = 1/2 - margin
  double C5 = -1.0;            // negative: derived from the noise model
  bool enforce_density_band = true;
  double density_band = 0.5;   // |a| <= band
  PressureForm pressure_form = PressureForm::inverse_square;
  bool nonlinear = true;       // false drops B and grad Q (heat-only runs)
  int divergence_patience = 3;

  /// Throws ConfigError naming the violated condition (N < p <= 6, dt | T, ...).
  void validate() const;
  int steps_for(double length) const;
};

struct InitialData {
  ScalarField a0;
  VectorField u0;
};

/// One Picard level: trajectories at t_j = j dt, j = 0..steps.
struct IterationState {
  int level = 0;
  double dt = 0.0;
  std::vector<DensityState> a;
  std::vector<VectorField> v;
  std::vector<VectorField> z;
  std::vector<std::string> warnings;

  int steps() const { return static_cast<int>(v.size()) - 1; }
  VectorField u(int j) const;
};

/// -div dealias(u~ (x) u~) with u~ = dealias(u).
VectorField bilinear_term(const VectorField& u);

/// grad u : grad u^T computed from dealiased u.
ScalarField velocity_gradient_contraction(const VectorField& u);

/// grad Q = -grad Delta^{-1}(s - mean s) with
///   s = grad u : grad u^T + mu grad(rho) . Delta v / rho^2,  rho = rho_bar (1 + a)
/// (rho^1 under PressureForm::inverse). If source_mean_ratio is given it
/// receives |mean s| / ||s||_2.
VectorField pressure_gradient(const DensityState& a, const VectorField& u, const VectorField& v,
                              const SolverConfig& cfg, double* source_mean_ratio = nullptr);

/// Level 0: a = a0, v = u0, z = 0 at every step.
IterationState initial_level(const InitialData& init, const SolverConfig& cfg, int steps);

/// Level n from level n-1 with a fixed Wiener path.
IterationState picard_level(const IterationState& prev, const InitialData& init, const NoiseModel& noise,
                            const WienerPath& path, const SolverConfig& cfg);

struct WindowConstants {
  double K0 = 1.0;
  double a0_w2p = 0.0;
  double u0_w2p = 0.0;
  double C5 = 0.0;
  double C6 = 0.0;
  double M = 2.0;
  double theta = 0.0;  // (1 - N/p) / 2
};

struct AlphaTerms {
  double leading = 0.0;    // coefficient of t^theta
  double viscous = 0.0;    // coefficient of t^{1+theta}, (16 mu / rho_bar) M^2 K0
  double quadratic = 0.0;  // coefficient of t^{1+theta}, 80 mu M^3 K0^2 / rho_bar
  double value = 0.0;
};

/// Default C5 = 4 sum_k ||Phi_k||_{H3}^2.
double default_C5(const NoiseModel& noise);

/// K0 = max{2|a0|_{2,p}, 2|u0|_{2,p}, C5, 1} and the grid embedding constant.
WindowConstants compute_K0(const SolverConfig& cfg, const ScalarField& a0, const VectorField& u0, double C5);
AlphaTerms alpha_terms(const SolverConfig& cfg, const WindowConstants& k, double t);
double alpha(const SolverConfig& cfg, const WindowConstants& k, double t);
/// beta = T^{1+theta} (40 mu / rho_bar) M^2 K0^3.
double beta(const SolverConfig& cfg, const WindowConstants& k, double t);

struct WindowSelection {
  double alpha_root = 0.0;  // alpha(T) = 1/2 - margin
  double t0_root = 0.0;     // 2 T C6 M K0 + T^{1/2} K0 = 1
  double window = 0.0;      // min of the two
  std::string binding;      // "alpha" or "T0"
  double alpha_at_window = 0.0;
  double beta_at_window = 0.0;
};

/// Bisection to 1e-6 relative on the monotone conditions.
WindowSelection select_window(const SolverConfig& cfg, const WindowConstants& k);

struct LevelRecord {
  int level = 0;
  double distance = 0.0;    // d_n
  double v_distance = 0.0;
  double z_distance = 0.0;
  std::optional<double> ratio;  // d_n / d_{n-1}
  std::optional<double> a_distance;
  std::optional<double> a_bound;   // 2 M K0^2 t sup|u_{n-1} - u_{n-2}|_p
  std::optional<double> implied_M;
};

struct ContractionReport {
  std::vector<LevelRecord> levels;
  WindowConstants constants;
  double window = 0.0;
  double alpha_bound = 0.0;  // alpha(window)
  AlphaTerms alpha_parts;    // coefficients behind alpha_bound
  bool converged = false;
  double duhamel_residual = 0.0;  // max over steps
  double max_ratio = 0.0;
  bool contraction_pass = false;  // every measured ratio < 1
  bool a_bound_pass = true;
  std::vector<std::string> warnings;

  std::vector<double> ratios() const;
};

struct LocalResult {
  IterationState state;
  ContractionReport report;
};

/// Picard iteration on [0, length] until d_n < picard_tol or max_levels.
/// Throws DivergenceError after divergence_patience consecutive ratios >= 1.
LocalResult run_local(const SolverConfig& cfg, const InitialData& init, const NoiseModel& noise,
                      const WienerPath& path, double length);

/// max_j |v_{j+1} - P S_j[v_j + dt(B(u_j) - grad Q_j)]|_p with the fixed point re-inserted.
double duhamel_residual(const IterationState& state, const SolverConfig& cfg);

struct WindowReport {
  int index = 0;
  double t_start = 0.0;
  double length = 0.0;
  int steps = 0;
  WindowSelection selection;
  ContractionReport contraction;
  double seam_jump = 0.0;
};

/// Per-step norms of the stitched solution.
struct SeriesRow {
  double t = 0.0;
  double u_lp = 0.0;
  double u_w2p = 0.0;
  double h1 = 0.0;
  double h3 = 0.0;
  double a_w2p = 0.0;
  double div_residual = 0.0;
};

struct MarchResult {
  std::vector<WindowReport> windows;
  std::vector<double> times;
  std::vector<VectorField> u;        // stitched, one entry per global step
  std::vector<ScalarField> a;
  std::vector<SeriesRow> series;
  double max_seam_jump = 0.0;
};

/// Chains run_local windows over [0, total]. Windows are re-derived from the
/// current norms under auto_formula (floored to whole steps) and fixed otherwise.
/// Throws MarchError when an auto window drops below 10 dt.
MarchResult global_march(const SolverConfig& cfg, const InitialData& init, const NoiseModel& noise, double total,
                         std::uint32_t sample_index = 0);

SeriesRow series_row(double t, const VectorField& u, const ScalarField& a, double p);
std::string series_csv(const std::vector<SeriesRow>& rows);

}  // namespace mildns
