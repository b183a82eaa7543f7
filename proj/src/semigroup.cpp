#include "mildns/semigroup.hpp"

#include <cmath>
#include <limits>

#include "mildns/errors.hpp"
#include "mildns/norms.hpp"
#include "mildns/spectral.hpp"
#include "mildns/stats.hpp"

namespace mildns {
namespace {

ScalarField exact_step(const ScalarField& f, double c, double dt) {
  return apply_radial_symbol(f, [c, dt](double lam) { return std::exp(-c * lam * dt); });
}

double dot(const ScalarField& a, const ScalarField& b) { return inner(a, b); }

ScalarField axpy(double s, const ScalarField& x, const ScalarField& y) { return y + s * x; }

// Preconditioned CG for (1/c - h Delta) w = rhs with spectral preconditioner (gamma + h lambda)^{-1}.
ScalarField solve_cn(const Generator& gen, const ScalarField& rhs, double h, const ScalarField& guess, SolveStats* stats) {
  const auto& inv_c = gen.inverse_coefficient();
  const double gamma = gen.mean_inverse();
  auto op = [&](const ScalarField& w) { return product(inv_c, w) - h * apply_laplacian(w); };
  auto precond = [&](const ScalarField& r) {
    return apply_radial_symbol(r, [gamma, h](double lam) { return 1.0 / (gamma + h * lam); });
  };

  const double rhs_norm = l2_norm(rhs);
  if (rhs_norm == 0.0) {
    if (stats) *stats = SolveStats{};
    return ScalarField::zeros(rhs.grid_ptr());
  }
  ScalarField w = guess;
  ScalarField r = rhs - op(w);
  ScalarField zr = precond(r);
  ScalarField d = zr;
  double rz = dot(r, zr);
  double res = l2_norm(r) / rhs_norm;
  int it = 0;
  while (res > kSolveTolerance) {
    if (it == kSolveMaxIterations)
      throw NumericalError("Crank-Nicolson solve did not converge in " + std::to_string(it) + " iterations", res, it);
    const ScalarField ad = op(d);
    const double alpha = rz / dot(d, ad);
    w = axpy(alpha, d, w);
    r = axpy(-alpha, ad, r);
    zr = precond(r);
    const double rz_next = dot(r, zr);
    d = axpy(rz_next / rz, d, zr);
    rz = rz_next;
    res = l2_norm(r) / rhs_norm;
    ++it;
  }
  if (stats) {
    stats->iterations = it;
    stats->residual = res;
  }
  return w;
}

}  // namespace

Generator::Generator(double mu, double rho_bar, const DensityState& density, double density_floor)
    : mu_(mu),
      rho_bar_(rho_bar),
      density_(density.a.map([](double a) { return 1.0 + a; })),
      c_(density_),
      inverse_c_(density_) {
  if (!(mu > 0.0)) throw ConfigError("viscosity mu must be positive");
  if (!(rho_bar > 0.0)) throw ConfigError("reference density rho_bar must be positive");
  const double floor = std::max(density_floor, 0.0);
  if (!(density_.min() > floor))
    throw DensityBandError("density 1+a = " + std::to_string(density_.min()) + " violates the lower bound " +
                           std::to_string(floor));
  c_ = density_.map([mu, rho_bar](double r) { return mu / (rho_bar * r); });
  inverse_c_ = density_.map([mu, rho_bar](double r) { return rho_bar * r / mu; });
  c_min_ = c_.min();
  c_max_ = c_.max();
  mean_inverse_ = inverse_c_.mean();
}

ScalarField Generator::apply(const ScalarField& f) const { return product(c_, apply_laplacian(f)); }

VectorField Generator::apply(const VectorField& u) const {
  std::vector<ScalarField> out;
  for (const auto& c : u.components()) out.push_back(apply(c));
  return VectorField(std::move(out));
}

PropagatorStep make_step(std::shared_ptr<const Generator> generator, double dt) {
  const Scheme s = generator->constant() ? Scheme::exact_constant : Scheme::crank_nicolson;
  return PropagatorStep{std::move(generator), dt, s};
}

ScalarField apply_semigroup(const PropagatorStep& step, const ScalarField& f, SolveStats* stats) {
  if (!step.generator) throw ConfigError("propagator step has no generator");
  if (!(step.dt > 0.0)) throw ConfigError("propagator step size must be positive");
  const auto& gen = *step.generator;
  if (!f.grid().same_shape(gen.coefficient().grid())) throw ConfigError("field and generator live on different grids");

  if (step.scheme == Scheme::exact_constant) {
    if (!gen.constant()) throw ConfigError("exact_constant scheme requires a spatially constant density");
    if (stats) *stats = SolveStats{};
    return exact_step(f, gen.c_max(), step.dt);
  }
  const double h = 0.5 * step.dt;
  const ScalarField rhs = product(gen.inverse_coefficient(), f) + h * apply_laplacian(f);
  return solve_cn(gen, rhs, h, f, stats);
}

VectorField apply_semigroup(const PropagatorStep& step, const VectorField& u, SolveStats* stats) {
  std::vector<ScalarField> out;
  SolveStats worst;
  for (const auto& c : u.components()) {
    SolveStats s;
    out.push_back(apply_semigroup(step, c, &s));
    worst.iterations = std::max(worst.iterations, s.iterations);
    worst.residual = std::max(worst.residual, s.residual);
  }
  if (stats) *stats = worst;
  return VectorField(std::move(out));
}

DissipativityReport dissipativity_check(const Generator& gen, double lambda, const std::vector<ScalarField>& probes) {
  if (!(lambda > 0.0)) throw ConfigError("dissipativity check needs lambda > 0");
  DissipativityReport r;
  r.min_ratio = std::numeric_limits<double>::infinity();
  r.min_unweighted_ratio = std::numeric_limits<double>::infinity();
  const auto& weight = gen.inverse_coefficient();
  for (const auto& g : probes) {
    const double gw = weighted_l2_norm(g, weight);
    if (gw == 0.0) continue;
    const ScalarField resolvent = lambda * g - gen.apply(g);
    r.min_ratio = std::min(r.min_ratio, weighted_l2_norm(resolvent, weight) / (lambda * gw));
    r.min_unweighted_ratio = std::min(r.min_unweighted_ratio, l2_norm(resolvent) / (lambda * l2_norm(g)));
    ++r.probes;
  }
  if (r.probes == 0) {
    r.min_ratio = 1.0;
    r.min_unweighted_ratio = 1.0;
  }
  r.pass = r.min_ratio >= 1.0 - 1e-9;
  return r;
}

DecayReport decay_probe(const Generator& gen, const ScalarField& f, const std::vector<double>& times, double p,
                        double q) {
  if (!gen.constant()) throw ConfigError("decay probe evaluates the constant-coefficient semigroup exactly");
  if (times.size() < 2) throw ConfigError("decay probe needs at least two times");
  for (std::size_t i = 0; i < times.size(); ++i)
    if (!(times[i] > 0.0) || (i > 0 && !(times[i] > times[i - 1])))
      throw ConfigError("decay probe times must be positive and ascending");

  DecayReport r;
  r.times = times;
  const double c = gen.c_max();
  const auto coeff = f.coefficients();
  const auto lam = f.grid().eigenvalues();
  const double npts = static_cast<double>(coeff.size());
  for (double t : times) {
    double acc = 0.0;
    Spectrum s(coeff.size());
    for (std::size_t i = 0; i < coeff.size(); ++i) {
      const double decay = std::exp(-c * lam[i] * t);
      acc += std::norm(c * lam[i] * decay * coeff[i]);
      s[i] = decay * coeff[i];
    }
    r.generator_norms.push_back(std::sqrt(acc) / npts);
    r.lq_norms.push_back(lp_norm(ScalarField::from_coefficients(f.grid_ptr(), s), q));
  }
  const auto fa = loglog_fit(r.times, r.generator_norms);
  const auto fq = loglog_fit(r.times, r.lq_norms);
  r.generator_slope = fa.slope;
  r.generator_r_squared = fa.r_squared;
  r.lq_slope = fq.slope;
  r.lq_r_squared = fq.r_squared;
  r.lq_expected_slope = -0.5 * f.grid().dim() * (1.0 / p - 1.0 / q);
  return r;
}

CommutationReport gradient_commutation_check(const PropagatorStep& step, const ScalarField& f) {
  CommutationReport r;
  r.exact_scheme = step.scheme == Scheme::exact_constant;
  const VectorField lhs = gradient(apply_semigroup(step, f));
  const VectorField rhs = apply_semigroup(step, gradient(f));
  r.commutator_norm = l2_norm(lhs - rhs);
  r.gradient_norm = l2_norm(gradient(f));
  r.relative = r.gradient_norm > 0.0 ? r.commutator_norm / r.gradient_norm : r.commutator_norm;
  r.pass = !r.exact_scheme || r.relative <= 1e-10;
  return r;
}

}  // namespace mildns
