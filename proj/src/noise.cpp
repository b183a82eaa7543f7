#include "mildns/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mildns/errors.hpp"
#include "mildns/norms.hpp"
#include "mildns/rng.hpp"
#include "mildns/spectral.hpp"
#include "mildns/stats.hpp"

namespace mildns {
namespace {

constexpr double kZ95 = 1.96;

struct LatticeVector {
  std::array<int, 3> q{};
  int norm2 = 0;
};

// One representative per +/- pair (first nonzero entry positive), sorted by |q|^2 then lexicographically.
std::vector<LatticeVector> half_lattice(const TorusGrid& g) {
  std::vector<LatticeVector> out;
  int r = g.resolution(0);
  for (int a = 0; a < g.dim(); ++a) r = std::min(r, g.resolution(a));
  const int qmax = (r - 1) / 3;  // keeps 3|q_i| < M_i so the mode survives dealiasing
  const int n = g.dim();
  std::array<int, 3> q{};
  const int lo = -qmax;
  const int span = 2 * qmax + 1;
  int total = 1;
  for (int a = 0; a < n; ++a) total *= span;
  for (int idx = 0; idx < total; ++idx) {
    int rem = idx;
    for (int a = n - 1; a >= 0; --a) {
      q[static_cast<std::size_t>(a)] = lo + rem % span;
      rem /= span;
    }
    int first = 0;
    for (int a = 0; a < n && first == 0; ++a) first = q[static_cast<std::size_t>(a)];
    if (first <= 0) continue;
    LatticeVector v;
    v.q = q;
    for (int a = 0; a < n; ++a) v.norm2 += q[static_cast<std::size_t>(a)] * q[static_cast<std::size_t>(a)];
    out.push_back(v);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (x.norm2 != y.norm2) return x.norm2 < y.norm2;
    return x.q < y.q;
  });
  return out;
}

std::array<double, 3> perpendicular(const std::array<int, 3>& q, int n) {
  std::array<double, 3> p{};
  if (n == 2) {
    p = {-static_cast<double>(q[1]), static_cast<double>(q[0]), 0.0};
  } else {
    std::array<double, 3> e{0.0, 0.0, 1.0};
    if (q[0] == 0 && q[1] == 0) e = {1.0, 0.0, 0.0};
    p = {q[1] * e[2] - q[2] * e[1], q[2] * e[0] - q[0] * e[2], q[0] * e[1] - q[1] * e[0]};
  }
  const double norm = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
  for (auto& x : p) x /= norm;
  return p;
}

MonteCarloReport summarize(std::string name, std::span<const double> values, double exact, std::uint64_t seed) {
  MonteCarloReport r;
  r.name = std::move(name);
  r.samples = values.size();
  r.seed = seed;
  r.estimate = mean(values);
  r.std_error = standard_error(values);
  r.ci_low = r.estimate - kZ95 * r.std_error;
  r.ci_high = r.estimate + kZ95 * r.std_error;
  r.exact_or_bound = exact;
  if (exact != 0.0)
    r.rel_error = std::abs(r.estimate - exact) / std::abs(exact);
  else
    r.rel_error = r.estimate == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace

bool NoiseModel::zero() const {
  return std::all_of(phi.begin(), phi.end(), [](const VectorField& f) { return sup_norm(f) == 0.0; });
}

NoiseModel eigenmode_noise(const GridPtr& grid, int modes, double amplitude, double decay, std::uint64_t seed) {
  const auto& g = *grid;
  if (g.dim() < 2) throw ConfigError("divergence-free noise modes need dimension >= 2");
  if (modes < 0) throw ConfigError("noise mode count must be non-negative");
  NoiseModel model;
  model.seed = seed;
  model.stream_id = substream_id("noise");
  const auto lattice = half_lattice(g);
  if (static_cast<std::size_t>(modes) > 2 * lattice.size())
    throw ConfigError("grid " + g.describe() + " resolves only " + std::to_string(2 * lattice.size()) +
                      " dealiased noise modes");
  const int n = g.dim();
  for (int k = 0; k < modes; ++k) {
    const auto& lv = lattice[static_cast<std::size_t>(k / 2)];
    const bool use_sin = k % 2 == 1;
    const auto perp = perpendicular(lv.q, n);
    const double qn = std::sqrt(static_cast<double>(lv.norm2));
    const double amp = amplitude * std::pow(qn, -decay);
    auto phase = ScalarField::from_function(grid, [&](std::span<const double> x) {
      double arg = 0.0;
      for (int a = 0; a < n; ++a) arg += 2.0 * std::numbers::pi * lv.q[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
      return use_sin ? std::sin(arg) : std::cos(arg);
    });
    std::vector<ScalarField> comps;
    for (int a = 0; a < n; ++a) comps.push_back((amp * perp[static_cast<std::size_t>(a)]) * phase);
    model.phi.emplace_back(std::move(comps), true);
  }
  return model;
}

CPhiTerms compute_C_Phi_terms(const NoiseModel& model) {
  CPhiTerms t;
  for (const auto& f : model.phi) {
    const auto lap = apply_laplacian(f);
    const double s0 = sup_norm(f);
    const double s1 = sup_norm(gradient_magnitude(f));
    const double s2 = sup_norm(lap);
    const double s3 = sup_norm(gradient_magnitude(lap));
    t.sup += s0 * s0;
    t.gradient += s1 * s1;
    t.laplacian += s2 * s2;
    t.grad_laplacian += s3 * s3;
  }
  for (double v : {t.sup, t.gradient, t.laplacian, t.grad_laplacian})
    if (!std::isfinite(v)) throw ConfigError("noise coefficient sums are not finite");
  t.value = std::max({t.sup, t.gradient, t.laplacian, t.grad_laplacian});
  return t;
}

double compute_C_Phi(const NoiseModel& model) { return compute_C_Phi_terms(model).value; }

WienerPath WienerPath::coarsened() const {
  WienerPath c;
  c.dt = 2.0 * dt;
  c.steps = steps / 2;
  c.modes = modes;
  c.increments.resize(static_cast<std::size_t>(c.steps) * static_cast<std::size_t>(modes));
  for (int j = 0; j < c.steps; ++j)
    for (int k = 0; k < modes; ++k)
      c.increments[static_cast<std::size_t>(j * modes + k)] = (*this)(2 * j, k) + (*this)(2 * j + 1, k);
  return c;
}

WienerPath sample_increments(const NoiseModel& model, int steps, double dt, std::uint32_t sample_index,
                             int first_step) {
  if (!(dt > 0.0)) throw ConfigError("Wiener increments need dt > 0");
  WienerPath w;
  w.dt = dt;
  w.steps = steps;
  w.modes = model.modes();
  w.increments.resize(static_cast<std::size_t>(steps) * static_cast<std::size_t>(w.modes));
  const CounterRng rng(model.seed, model.stream_id, sample_index);
  const double s = std::sqrt(dt);
  for (int j = 0; j < steps; ++j)
    for (int k = 0; k < w.modes; ++k)
      w.increments[static_cast<std::size_t>(j * w.modes + k)] =
          s * rng.normal(static_cast<std::uint32_t>(first_step + j), static_cast<std::uint32_t>(k));
  return w;
}

VectorField noise_forcing(const NoiseModel& model, const WienerPath& path, int step, const GridPtr& grid) {
  VectorField acc = VectorField::zeros(grid);
  bool divfree = true;
  for (int k = 0; k < model.modes(); ++k) {
    const auto& phi = model.phi[static_cast<std::size_t>(k)];
    acc = acc + path(step, k) * phi;
    divfree = divfree && phi.divergence_free();
  }
  return acc.with_divergence_free(divfree);
}

VectorField stochastic_convolution_step(const VectorField& z, const PropagatorStep& step, const NoiseModel& model,
                                        const WienerPath& path, int j) {
  if (j < 0 || j >= path.steps) throw InputError("Wiener path has no increment for step " + std::to_string(j));
  if (model.modes() == 0) return apply_semigroup(step, z).with_divergence_free(z.divergence_free());
  const auto forced = z + noise_forcing(model, path, j, z.grid_ptr());
  return apply_semigroup(step, forced).with_divergence_free(forced.divergence_free());
}

nlohmann::json to_json(const MonteCarloReport& r) {
  nlohmann::json j = {{"name", r.name},
                      {"estimate", r.estimate},
                      {"exact_or_bound", r.exact_or_bound},
                      {"rel_error", r.rel_error},
                      {"ci_95", {r.ci_low, r.ci_high}},
                      {"samples", r.samples},
                      {"seed", r.seed},
                      {"pass", r.pass}};
  if (!r.extra.empty()) j["extra"] = r.extra;
  return j;
}

MonteCarloReport ito_isometry_check(const NoiseModel& model, double t, std::size_t samples, double tolerance) {
  const int k = model.modes();
  const auto uk = static_cast<std::size_t>(k);
  std::vector<double> gram(uk * uk, 0.0);
  double trace = 0.0;
  for (std::size_t i = 0; i < uk; ++i) {
    for (std::size_t l = i; l < uk; ++l) {
      const double v = inner(model.phi[i], model.phi[l]);
      gram[i * uk + l] = v;
      gram[l * uk + i] = v;
    }
    trace += gram[i * uk + i];
  }
  constexpr int kSteps = 10;
  std::vector<double> values(samples, 0.0);
  parallel_for(samples, [&](std::size_t s) {
    const auto path = sample_increments(model, kSteps, t / kSteps, static_cast<std::uint32_t>(s));
    std::vector<double> w(uk, 0.0);
    for (int j = 0; j < kSteps; ++j)
      for (int m = 0; m < k; ++m) w[static_cast<std::size_t>(m)] += path(j, m);
    double acc = 0.0;
    for (std::size_t i = 0; i < uk; ++i)
      for (std::size_t l = 0; l < uk; ++l) acc += w[i] * w[l] * gram[i * uk + l];
    values[s] = acc;
  });
  auto r = summarize("ito_isometry", values, t * trace, model.seed);
  r.pass = r.rel_error <= tolerance;
  r.extra = {{"t", t}, {"modes", k}, {"tolerance", tolerance}};
  return r;
}

EnvelopeReport moment_boundedness_check(const NoiseModel& model, const PropagatorStep& step, double horizon, int r,
                                        std::size_t samples) {
  if (r < 2 || r % 2 != 0) throw ConfigError("moment order r must be even and >= 2");
  const int steps = static_cast<int>(std::llround(horizon / step.dt));
  if (steps < 1) throw ConfigError("moment check horizon is shorter than one step");
  const auto grid = step.generator->coefficient().grid_ptr();
  const auto width = static_cast<std::size_t>(steps + 1);
  std::vector<double> h3(samples * width, 0.0);
  parallel_for(samples, [&](std::size_t s) {
    const auto path = sample_increments(model, steps, step.dt, static_cast<std::uint32_t>(s));
    VectorField z = VectorField::zeros(grid);
    for (int j = 0; j < steps; ++j) {
      z = stochastic_convolution_step(z, step, model, path, j);
      h3[s * width + static_cast<std::size_t>(j + 1)] = hs_norm_sq(z, 3.0);
    }
  });

  EnvelopeReport rep;
  rep.r = r;
  rep.samples = samples;
  std::vector<double> column(samples);
  for (std::size_t j = 0; j < width; ++j) {
    for (std::size_t s = 0; s < samples; ++s) column[s] = h3[s * width + j];
    rep.times.push_back(static_cast<double>(j) * step.dt);
    rep.mean_h3_sq.push_back(mean(column));
    rep.p95_h3_sq.push_back(quantile(column, 0.95));
    rep.sup_h3_sq.push_back(column.empty() ? 0.0 : *std::max_element(column.begin(), column.end()));
  }
  const auto fit = linear_fit(rep.times, rep.mean_h3_sq);
  rep.slope = fit.slope;
  rep.intercept = fit.intercept;
  rep.r_squared = fit.r_squared;

  double mr = 0.0, mh = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double x = std::sqrt(h3[s * width + width - 1]);
    mr += std::pow(x, r);
    mh += std::pow(x, r / 2);
  }
  if (samples > 0) {
    rep.moment_r = mr / static_cast<double>(samples);
    rep.moment_r_half = mh / static_cast<double>(samples);
  }
  rep.jensen_ordered = rep.moment_r_half * rep.moment_r_half <= rep.moment_r * (1.0 + 1e-12);
  return rep;
}

std::string envelope_csv(const EnvelopeReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "t,mean_H3_sq,p95_H3_sq\n";
  for (std::size_t j = 0; j < r.times.size(); ++j) os << r.times[j] << ',' << r.mean_h3_sq[j] << ',' << r.p95_h3_sq[j] << '\n';
  return os.str();
}

MonteCarloReport bdg_check(const NoiseModel& model, double t, int steps, std::size_t samples) {
  if (steps < 1) throw ConfigError("BDG check needs at least one step");
  std::vector<double> phi;
  double qv_rate = 0.0;
  for (const auto& f : model.phi) {
    phi.push_back(l2_norm(f));
    qv_rate += phi.back() * phi.back();
  }
  const double dt = t / steps;
  std::vector<double> values(samples, 0.0);
  parallel_for(samples, [&](std::size_t s) {
    const auto path = sample_increments(model, steps, dt, static_cast<std::uint32_t>(s));
    double m = 0.0, best = 0.0;
    for (int j = 0; j < steps; ++j) {
      for (int k = 0; k < path.modes; ++k) m += phi[static_cast<std::size_t>(k)] * path(j, k);
      best = std::max(best, m * m);
    }
    values[s] = best;
  });
  constexpr double kDoob = 4.0;
  constexpr double kLiteral = 1.0;
  const double qv = t * qv_rate;
  auto r = summarize("bdg", values, kDoob * qv, model.seed);
  r.rel_error = qv > 0.0 ? (r.estimate - r.exact_or_bound) / r.exact_or_bound : 0.0;
  r.pass = r.estimate - kZ95 * r.std_error <= r.exact_or_bound;
  r.extra = {{"quadratic_variation", qv},
             {"constant", kDoob},
             {"literal_constant", kLiteral},
             {"literal_bound", kLiteral * qv},
             {"literal_holds", r.ci_low <= kLiteral * qv},
             {"steps", steps}};
  return r;
}

MonteCarloReport chebyshev_check(SyntheticLaw law, int r, std::size_t samples, std::uint64_t seed) {
  if (r < 1) throw ConfigError("Chebyshev order must be positive");
  if (samples < 4) throw ConfigError("Chebyshev check needs at least four samples");
  const char* names[] = {"uniform", "truncated_normal", "two_point"};
  const auto law_index = static_cast<std::size_t>(law);
  SequentialRng rng(seed, substream_id(std::string("chebyshev/") + names[law_index]));
  auto draw = [&]() {
    switch (law) {
      case SyntheticLaw::uniform:
        return 2.0 * rng.uniform() - 1.0;
      case SyntheticLaw::truncated_normal: {
        for (;;) {
          const double x = rng.normal();
          if (std::abs(x) <= 3.0) return x;
        }
      }
      case SyntheticLaw::two_point:
        return rng.uniform() < 0.9 ? 1.0 : 4.0;
    }
    return 0.0;
  };
  const std::size_t half = samples / 2;
  double moment = 0.0;
  for (std::size_t i = 0; i < half; ++i) moment += std::pow(std::abs(draw()), r);
  const double c_hat = std::pow(moment / static_cast<double>(half), 1.0 / r);
  std::vector<double> hits;
  for (std::size_t i = half; i < samples; ++i) hits.push_back(std::abs(draw()) > 2.0 * c_hat ? 1.0 : 0.0);
  const double bound = std::pow(0.5, r);
  auto rep = summarize(std::string("chebyshev/") + names[law_index], hits, bound, seed);
  const double n = static_cast<double>(hits.size());
  rep.rel_error = (rep.estimate - bound) / bound;
  rep.pass = rep.estimate <= bound + kZ95 * std::sqrt(bound * (1.0 - bound) / n);
  rep.extra = {{"r", r}, {"c_hat", c_hat}};
  return rep;
}

}  // namespace mildns
