#include "mildns/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "mildns/errors.hpp"
#include "mildns/norms.hpp"
#include "mildns/spectral.hpp"

namespace mildns {
namespace {

bool is_multiple(double length, double dt) {
  const double r = length / dt;
  return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, r);
}

double sup_distance(const std::vector<VectorField>& x, const std::vector<VectorField>& y, double p) {
  double d = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) d = std::max(d, lp_norm(x[j] - y[j], p));
  return d;
}

double sup_velocity_distance(const IterationState& x, const IterationState& y, double p) {
  double d = 0.0;
  for (int j = 0; j <= x.steps(); ++j) d = std::max(d, lp_norm(x.u(j) - y.u(j), p));
  return d;
}

// Bisection for the largest t with g(t) <= target, g increasing and g(0) < target.
template <typename G>
double monotone_root(G g, double target) {
  double lo = 0.0;
  double hi = 1.0;
  while (g(hi) <= target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) return hi;
  }
  while (hi - lo > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) <= target ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

void SolverConfig::validate() const {
  if (dim < 1 || dim > 3) throw ConfigError("dimension N must be 1, 2 or 3");
  if (!(p > dim) || p > 6.0) {
    std::ostringstream os;
    os << "lp.p = " << p << " violates the hypothesis N < p <= 6 with N = " << dim;
    throw ConfigError(os.str());
  }
  if (!(mu > 0.0)) throw ConfigError("physics.mu must be positive");
  if (!(rho_bar > 0.0)) throw ConfigError("physics.rho_bar must be positive");
  if (!(dt > 0.0)) throw ConfigError("time.dt must be positive");
  if (!(horizon > 0.0)) throw ConfigError("time.T must be positive");
  if (!is_multiple(horizon, dt)) throw ConfigError("time.dt must divide time.T");
  if (fixed_window < 0.0 || (fixed_window > 0.0 && !is_multiple(fixed_window, dt)))
    throw ConfigError("picard.window must be a non-negative multiple of time.dt");
  if (!(picard_tol > 0.0)) throw ConfigError("picard.tol must be positive");
  if (max_levels < 1) throw ConfigError("picard.max_levels must be at least 1");
  if (!(constant_M >= 2.0)) throw ConfigError("picard.M must be at least 2");
  if (!(alpha_margin > 0.0 && alpha_margin < 0.5)) throw ConfigError("picard.alpha_margin must lie in (0, 1/2)");
  if (!(density_band > 0.0 && density_band < 1.0)) throw ConfigError("initial.density_band must lie in (0, 1)");
  if (divergence_patience < 1) throw ConfigError("picard.patience must be at least 1");
}

int SolverConfig::steps_for(double length) const {
  if (!is_multiple(length, dt)) throw ConfigError("window length is not a multiple of time.dt");
  return static_cast<int>(std::llround(length / dt));
}

VectorField IterationState::u(int j) const {
  const auto ju = static_cast<std::size_t>(j);
  return (v[ju] + z[ju]).with_divergence_free(true);
}

VectorField bilinear_term(const VectorField& u) {
  const auto& g = u.grid();
  const int n = g.dim();
  const auto ut = dealias(u);
  const auto mask = g.dealias_mask();
  std::vector<Spectrum> out(static_cast<std::size_t>(n), Spectrum(g.size(), Complex(0.0)));
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const auto c = product(ut[i], ut[j]).coefficients();
      auto ki = g.derivative_symbol(i);
      auto kj = g.derivative_symbol(j);
      auto& bi = out[static_cast<std::size_t>(i)];
      auto& bj = out[static_cast<std::size_t>(j)];
      for (std::size_t m = 0; m < c.size(); ++m) {
        if (!mask[m]) continue;
        bi[m] -= Complex(0.0, kj[m]) * c[m];
        if (j != i) bj[m] -= Complex(0.0, ki[m]) * c[m];
      }
    }
  }
  std::vector<ScalarField> comps;
  for (auto& s : out) comps.push_back(ScalarField::from_coefficients(u.grid_ptr(), s, true));
  return VectorField(std::move(comps));
}

ScalarField velocity_gradient_contraction(const VectorField& u) {
  const int n = u.dim();
  const auto ut = dealias(u);
  std::vector<ScalarField> d;  // d[i*n + j] = d_i u_j
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d.push_back(partial_derivative(ut[j], i));
  std::vector<double> acc(u.grid().size(), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      auto x = d[static_cast<std::size_t>(i * n + j)].values();
      auto y = d[static_cast<std::size_t>(j * n + i)].values();
      for (std::size_t m = 0; m < acc.size(); ++m) acc[m] += x[m] * y[m];
    }
  }
  return dealias(ScalarField(u.grid_ptr(), std::move(acc)));
}

VectorField pressure_gradient(const DensityState& a, const VectorField& u, const VectorField& v,
                              const SolverConfig& cfg, double* source_mean_ratio) {
  ScalarField source = velocity_gradient_contraction(u);
  if (a.a.min() != a.a.max()) {
    const VectorField grad_a = gradient(a.a);
    const VectorField lap_v = apply_laplacian(v);
    std::vector<double> acc(u.grid().size(), 0.0);
    for (int i = 0; i < u.dim(); ++i) {
      auto ga = grad_a[i].values();
      auto lv = lap_v[i].values();
      for (std::size_t m = 0; m < acc.size(); ++m) acc[m] += ga[m] * lv[m];
    }
    auto av = a.a.values();
    for (std::size_t m = 0; m < acc.size(); ++m) {
      const double r = 1.0 + av[m];
      const double weight = cfg.pressure_form == PressureForm::inverse_square ? 1.0 / (cfg.rho_bar * r * r) : 1.0 / r;
      acc[m] *= cfg.mu * weight;
    }
    source = source + dealias(ScalarField(u.grid_ptr(), std::move(acc)));
  }
  const double norm = l2_norm(source);
  if (source_mean_ratio) *source_mean_ratio = norm > 0.0 ? std::abs(source.mean()) / norm : 0.0;
  if (norm == 0.0) return VectorField::zeros(u.grid_ptr());
  return -1.0 * gradient(inverse_laplacian(remove_mean(source)));
}

IterationState initial_level(const InitialData& init, const SolverConfig& cfg, int steps) {
  IterationState s;
  s.level = 0;
  s.dt = cfg.dt;
  const DensityState a0(init.a0);
  const auto zero = VectorField::zeros(init.u0.grid_ptr());
  for (int j = 0; j <= steps; ++j) {
    s.a.push_back(a0);
    s.v.push_back(init.u0);
    s.z.push_back(zero);
  }
  return s;
}

IterationState picard_level(const IterationState& prev, const InitialData& init, const NoiseModel& noise,
                            const WienerPath& path, const SolverConfig& cfg) {
  const int steps = prev.steps();
  const auto grid = init.u0.grid_ptr();
  IterationState cur;
  cur.level = prev.level + 1;
  cur.dt = cfg.dt;

  VelocityHistory history;
  history.dt = cfg.dt;
  history.samples.reserve(static_cast<std::size_t>(steps + 1));
  for (int j = 0; j <= steps; ++j) history.samples.push_back(prev.u(j));
  cur.a = advect_trajectory(init.a0, history);

  if (cfg.enforce_density_band) {
    for (int j = 0; j <= steps; ++j) {
      const auto& a = cur.a[static_cast<std::size_t>(j)].a;
      const double m = std::max(std::abs(a.min()), std::abs(a.max()));
      if (m > cfg.density_band + 1e-12)
        throw DensityBandError("level " + std::to_string(cur.level) + " step " + std::to_string(j) + ": |a| = " +
                               std::to_string(m) + " exceeds the band " + std::to_string(cfg.density_band));
    }
  }

  const bool noisy = noise.modes() > 0;
  if (noisy && path.steps < steps) throw InputError("Wiener path is shorter than the window");
  cur.v.reserve(static_cast<std::size_t>(steps + 1));
  cur.z.reserve(static_cast<std::size_t>(steps + 1));
  cur.v.push_back(init.u0);
  cur.z.push_back(VectorField::zeros(grid));

  double worst_mean = 0.0;
  for (int j = 0; j < steps; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    auto gen = std::make_shared<const Generator>(cfg.mu, cfg.rho_bar, cur.a[ju]);
    const auto step = make_step(gen, cfg.dt);

    if (noisy)
      cur.z.push_back(leray_project(stochastic_convolution_step(cur.z[ju], step, noise, path, j)));
    else
      cur.z.push_back(cur.z[ju]);

    VectorField forcing = cur.v[ju];
    if (cfg.nonlinear) {
      const VectorField u_prev = history.samples[ju];
      double mean_ratio = 0.0;
      const auto gq = pressure_gradient(cur.a[ju], u_prev, prev.v[ju], cfg, &mean_ratio);
      worst_mean = std::max(worst_mean, mean_ratio);
      forcing = forcing + cfg.dt * (bilinear_term(u_prev) - gq);
    }
    auto next = leray_project(apply_semigroup(step, forcing));
    if (!all_finite(next) || !all_finite(cur.z.back()))
      throw BlowupError("non-finite velocity at level " + std::to_string(cur.level) + " step " + std::to_string(j + 1),
                        j + 1);
    cur.v.push_back(std::move(next));
  }
  if (worst_mean > 1e-8) {
    std::ostringstream os;
    os << "level " << cur.level << ": pressure source mean reached " << worst_mean << " of its norm before zeroing";
    cur.warnings.push_back(os.str());
  }
  return cur;
}

double default_C5(const NoiseModel& noise) {
  double acc = 0.0;
  for (const auto& f : noise.phi) acc += hs_norm_sq(f, 3.0);
  return 4.0 * acc;
}

WindowConstants compute_K0(const SolverConfig& cfg, const ScalarField& a0, const VectorField& u0, double C5) {
  WindowConstants k;
  k.a0_w2p = w2p_norm(a0, cfg.p);
  k.u0_w2p = w2p_norm(u0, cfg.p);
  k.C5 = C5;
  k.C6 = calibrate_embedding_constant(a0.grid_ptr(), cfg.p);
  k.M = cfg.constant_M;
  k.theta = 0.5 * (1.0 - cfg.dim / cfg.p);
  k.K0 = std::max({2.0 * k.a0_w2p, 2.0 * k.u0_w2p, C5, 1.0});
  return k;
}

AlphaTerms alpha_terms(const SolverConfig& cfg, const WindowConstants& k, double t) {
  const double m = k.M;
  const double visc = cfg.mu / cfg.rho_bar;
  AlphaTerms a;
  a.leading = 2.0 * m * (4.0 * m + 2.0) * k.K0 + 8.0 * visc * m * m * k.K0 + 4.0 * visc * m * k.K0;
  a.viscous = 16.0 * visc * m * m * k.K0;
  a.quadratic = 80.0 * visc * m * m * m * k.K0 * k.K0;
  if (t <= 0.0) return a;
  const double tt = std::pow(t, k.theta);
  a.value = a.leading * tt + (a.viscous + a.quadratic) * t * tt;
  return a;
}

double alpha(const SolverConfig& cfg, const WindowConstants& k, double t) { return alpha_terms(cfg, k, t).value; }

double beta(const SolverConfig& cfg, const WindowConstants& k, double t) {
  return std::pow(t, 1.0 + k.theta) * 40.0 * (cfg.mu / cfg.rho_bar) * k.M * k.M * k.K0 * k.K0 * k.K0;
}

WindowSelection select_window(const SolverConfig& cfg, const WindowConstants& k) {
  WindowSelection s;
  s.alpha_root = monotone_root([&](double t) { return alpha(cfg, k, t); }, 0.5 - cfg.alpha_margin);
  s.t0_root = monotone_root([&](double t) { return 2.0 * t * k.C6 * k.M * k.K0 + std::sqrt(t) * k.K0; }, 1.0);
  s.binding = s.alpha_root <= s.t0_root ? "alpha" : "T0";
  s.window = std::min(s.alpha_root, s.t0_root);
  s.alpha_at_window = alpha(cfg, k, s.window);
  s.beta_at_window = beta(cfg, k, s.window);
  return s;
}

std::vector<double> ContractionReport::ratios() const {
  std::vector<double> r;
  for (const auto& l : levels)
    if (l.ratio) r.push_back(*l.ratio);
  return r;
}

double duhamel_residual(const IterationState& state, const SolverConfig& cfg) {
  double worst = 0.0;
  for (int j = 0; j < state.steps(); ++j) {
    const auto ju = static_cast<std::size_t>(j);
    auto gen = std::make_shared<const Generator>(cfg.mu, cfg.rho_bar, state.a[ju]);
    const auto step = make_step(gen, cfg.dt);
    VectorField forcing = state.v[ju];
    if (cfg.nonlinear) {
      const auto u = state.u(j);
      forcing = forcing + cfg.dt * (bilinear_term(u) - pressure_gradient(state.a[ju], u, state.v[ju], cfg));
    }
    const auto predicted = leray_project(apply_semigroup(step, forcing));
    worst = std::max(worst, lp_norm(state.v[ju + 1] - predicted, cfg.p));
  }
  return worst;
}

LocalResult run_local(const SolverConfig& cfg, const InitialData& init, const NoiseModel& noise,
                      const WienerPath& path, double length) {
  const int steps = cfg.steps_for(length);
  const double c5 = cfg.C5 >= 0.0 ? cfg.C5 : default_C5(noise);
  ContractionReport report;
  report.constants = compute_K0(cfg, init.a0, init.u0, c5);
  report.window = length;
  report.alpha_parts = alpha_terms(cfg, report.constants, length);
  report.alpha_bound = report.alpha_parts.value;
  const double k0 = report.constants.K0;

  IterationState prev = initial_level(init, cfg, steps);
  std::optional<double> prev_distance;
  std::optional<double> prev_u_distance;
  int non_contracting = 0;
  for (int n = 1; n <= cfg.max_levels; ++n) {
    IterationState cur = picard_level(prev, init, noise, path, cfg);
    for (auto& w : cur.warnings) report.warnings.push_back(w);

    LevelRecord rec;
    rec.level = n;
    rec.v_distance = sup_distance(cur.v, prev.v, cfg.p);
    rec.z_distance = sup_distance(cur.z, prev.z, cfg.p);
    double d = 0.0;
    for (int j = 0; j <= steps; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      d = std::max(d, lp_norm(cur.v[ju] - prev.v[ju], cfg.p) + lp_norm(cur.z[ju] - prev.z[ju], cfg.p));
    }
    rec.distance = d;
    if (prev_distance && *prev_distance > 0.0) rec.ratio = d / *prev_distance;
    if (prev_u_distance) {
      double ad = 0.0;
      for (int j = 0; j <= steps; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        ad = std::max(ad, lp_norm(cur.a[ju].a - prev.a[ju].a, cfg.p));
      }
      rec.a_distance = ad;
      const double unit = 2.0 * k0 * k0 * length * *prev_u_distance;
      rec.a_bound = cfg.constant_M * unit;
      rec.implied_M = unit > 0.0 ? ad / unit : 0.0;
      if (ad > *rec.a_bound * (1.0 + 1e-12) + 1e-15) report.a_bound_pass = false;
    }
    prev_u_distance = sup_velocity_distance(cur, prev, cfg.p);
    report.levels.push_back(rec);

    if (rec.ratio && *rec.ratio >= 1.0) {
      if (++non_contracting >= cfg.divergence_patience)
        throw DivergenceError("Picard iteration stopped contracting at level " + std::to_string(n) +
                              "; choose a shorter window");
    } else {
      non_contracting = 0;
    }
    prev_distance = d;
    prev = std::move(cur);
    if (d < cfg.picard_tol) {
      report.converged = true;
      break;
    }
  }

  const auto ratios = report.ratios();
  report.max_ratio = ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end());
  report.contraction_pass = std::all_of(ratios.begin(), ratios.end(), [](double r) { return r < 1.0; });
  report.duhamel_residual = duhamel_residual(prev, cfg);
  return LocalResult{std::move(prev), std::move(report)};
}

SeriesRow series_row(double t, const VectorField& u, const ScalarField& a, double p) {
  SeriesRow r;
  r.t = t;
  r.u_lp = lp_norm(u, p);
  r.u_w2p = w2p_norm(u, p);
  r.h1 = std::sqrt(hs_norm_sq(u, 1.0));
  r.h3 = std::sqrt(hs_norm_sq(u, 3.0));
  r.a_w2p = w2p_norm(a, p);
  const double g = gradient_power_norm(u, 1);
  const double div = l2_norm(divergence(u));
  r.div_residual = g > 0.0 ? div / g : div;
  return r;
}

std::string series_csv(const std::vector<SeriesRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "t,u_Lp,u_W2p,H1,H3,a_W2p,div_residual\n";
  for (const auto& r : rows)
    os << r.t << ',' << r.u_lp << ',' << r.u_w2p << ',' << r.h1 << ',' << r.h3 << ',' << r.a_w2p << ','
       << r.div_residual << '\n';
  return os.str();
}

MarchResult global_march(const SolverConfig& cfg, const InitialData& init, const NoiseModel& noise, double total,
                         std::uint32_t sample_index) {
  if (!(total > 0.0)) throw ConfigError("march horizon must be positive");
  const int total_steps = cfg.steps_for(total);
  const double c5 = cfg.C5 >= 0.0 ? cfg.C5 : default_C5(noise);

  MarchResult out;
  ScalarField a_cur = init.a0;
  VectorField u_cur = init.u0;
  out.times.push_back(0.0);
  out.u.push_back(u_cur);
  out.a.push_back(a_cur);
  out.series.push_back(series_row(0.0, u_cur, a_cur, cfg.p));

  int done = 0;
  int index = 0;
  while (done < total_steps) {
    WindowReport w;
    w.index = index;
    w.t_start = done * cfg.dt;
    int steps = 0;
    if (cfg.window_mode == WindowMode::auto_formula) {
      const auto k = compute_K0(cfg, a_cur, u_cur, c5);
      w.selection = select_window(cfg, k);
      steps = static_cast<int>(std::floor(w.selection.window / cfg.dt * (1.0 + 1e-12)));
      if (steps < 10)
        throw MarchError("norm growth prevents marching: window " + std::to_string(w.selection.window) +
                             " is below 10 dt at K0 = " + std::to_string(k.K0),
                         k.K0);
    } else {
      steps = cfg.steps_for(cfg.fixed_window > 0.0 ? cfg.fixed_window : cfg.horizon);
    }
    steps = std::min(steps, total_steps - done);
    w.steps = steps;
    w.length = steps * cfg.dt;

    const WienerPath path = noise.modes() > 0 ? sample_increments(noise, steps, cfg.dt, sample_index, done)
                                              : WienerPath{cfg.dt, steps, 0, {}};
    auto local = run_local(cfg, InitialData{a_cur, u_cur}, noise, path, w.length);
    w.seam_jump = max_abs_diff(local.state.u(0), u_cur);
    out.max_seam_jump = std::max(out.max_seam_jump, w.seam_jump);
    w.contraction = std::move(local.report);

    for (int j = 1; j <= steps; ++j) {
      const double t = (done + j) * cfg.dt;
      auto u = local.state.u(j);
      const auto& a = local.state.a[static_cast<std::size_t>(j)].a;
      out.times.push_back(t);
      out.series.push_back(series_row(t, u, a, cfg.p));
      out.u.push_back(std::move(u));
      out.a.push_back(a);
    }
    a_cur = out.a.back();
    u_cur = out.u.back();
    done += steps;
    out.windows.push_back(std::move(w));
    ++index;
  }
  return out;
}

}  // namespace mildns
