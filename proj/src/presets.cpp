#include "mildns/presets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mildns/errors.hpp"
#include "mildns/norms.hpp"
#include "mildns/rng.hpp"
#include "mildns/spectral.hpp"

namespace mildns {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_dim(const TorusGrid& g, int lo, const char* what) {
  if (g.dim() < lo) throw ConfigError(std::string(what) + " needs dimension >= " + std::to_string(lo));
}

Spectrum random_spectrum(const TorusGrid& g, SequentialRng& rng, int kmax, double slope, bool mean_zero) {
  Spectrum c(g.size(), Complex(0.0));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto k = g.wave_index(i);
    bool keep = !g.nyquist_mask()[i];
    double k2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      keep = keep && std::abs(k[a]) <= kmax;
      k2 += static_cast<double>(k[a]) * k[a];
    }
    if (mean_zero && k2 == 0.0) keep = false;
    const double re = rng.normal();
    const double im = rng.normal();
    if (keep) c[i] = Complex(re, im) * std::pow(1.0 + k2, -0.5 * slope);
  }
  return c;
}

ScalarField normalized(const ScalarField& f) {
  const double n = l2_norm(f);
  return n > 0.0 ? (1.0 / n) * f : f;
}

}  // namespace

VectorField taylor_green(const GridPtr& grid, double amplitude) {
  require_dim(*grid, 2, "taylor_green");
  const int n = grid->dim();
  auto zfac = [n](std::span<const double> x) { return n == 3 ? std::cos(kTwoPi * x[2]) : 1.0; };
  std::vector<ScalarField> c;
  c.push_back(ScalarField::from_function(grid, [&](std::span<const double> x) {
    return amplitude * std::sin(kTwoPi * x[0]) * std::cos(kTwoPi * x[1]) * zfac(x);
  }));
  c.push_back(ScalarField::from_function(grid, [&](std::span<const double> x) {
    return -amplitude * std::cos(kTwoPi * x[0]) * std::sin(kTwoPi * x[1]) * zfac(x);
  }));
  if (n == 3) c.push_back(ScalarField::zeros(grid));
  return VectorField(std::move(c), true);
}

VectorField taylor_green_exact(const GridPtr& grid, double amplitude, double nu, double t) {
  if (grid->dim() != 2) throw ConfigError("the exact Taylor-Green solution is two-dimensional");
  const double lam = 2.0 * kTwoPi * kTwoPi;
  return taylor_green(grid, amplitude * std::exp(-lam * nu * t));
}

VectorField taylor_green_pressure_gradient(const GridPtr& grid, double amplitude, double nu, double t) {
  if (grid->dim() != 2) throw ConfigError("the exact Taylor-Green pressure is two-dimensional");
  const double lam = 2.0 * kTwoPi * kTwoPi;
  const double a = amplitude * std::exp(-lam * nu * t);
  // p / rho = (A^2 / 4)(cos 4pi x + cos 4pi y).
  const double s = -a * a * std::numbers::pi;
  std::vector<ScalarField> c;
  c.push_back(ScalarField::from_function(grid, [&](std::span<const double> x) { return s * std::sin(2.0 * kTwoPi * x[0]); }));
  c.push_back(ScalarField::from_function(grid, [&](std::span<const double> x) { return s * std::sin(2.0 * kTwoPi * x[1]); }));
  return VectorField(std::move(c));
}

ScalarField random_field(const GridPtr& grid, std::uint64_t seed, std::uint32_t stream, int kmax, double slope,
                         bool mean_zero) {
  SequentialRng rng(seed, stream);
  const auto c = random_spectrum(*grid, rng, kmax, slope, mean_zero);
  return normalized(ScalarField::from_coefficients(grid, c, mean_zero));
}

VectorField random_vector(const GridPtr& grid, std::uint64_t seed, std::uint32_t stream, int kmax, double slope) {
  SequentialRng rng(seed, stream);
  std::vector<ScalarField> comps;
  for (int a = 0; a < grid->dim(); ++a)
    comps.push_back(ScalarField::from_coefficients(grid, random_spectrum(*grid, rng, kmax, slope, true), true));
  VectorField u(std::move(comps));
  const double n = l2_norm(u);
  return n > 0.0 ? (1.0 / n) * u : u;
}

VectorField random_divfree(const GridPtr& grid, std::uint64_t seed, std::uint32_t stream, int kmax, double slope) {
  if (grid->dim() < 2) throw ConfigError("divergence-free random fields need dimension >= 2");
  auto u = leray_project(random_vector(grid, seed, stream, kmax, slope));
  const double n = l2_norm(u);
  return n > 0.0 ? (1.0 / n) * u : u;
}

ScalarField rough_field(const GridPtr& grid, double p) {
  const auto& g = *grid;
  const double n = g.dim();
  const double exponent = n / p - n;
  Spectrum c(g.size(), Complex(0.0));
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.nyquist_mask()[i]) continue;
    const auto k = g.wave_index(i);
    double k2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) k2 += static_cast<double>(k[a]) * k[a];
    if (k2 > 0.0) c[i] = std::pow(k2, 0.5 * exponent);
  }
  return ScalarField::from_coefficients(grid, c, true);
}

ScalarField power_singularity(const GridPtr& grid, double exponent, double radius) {
  const double floor = 0.5 * grid->spacing(0);
  return ScalarField::from_function(grid, [&](std::span<const double> x) {
    double r2 = 0.0;
    for (double xi : x) {
      const double d = xi > 0.5 ? xi - 1.0 : xi;
      r2 += d * d;
    }
    const double s2 = r2 / (radius * radius);
    if (s2 >= 1.0) return 0.0;
    const double r = std::max(std::sqrt(r2), floor);
    return std::pow(r, -exponent) * std::exp(1.0 - 1.0 / (1.0 - s2));
  });
}

ScalarField density_wave(const GridPtr& grid, double amplitude) {
  const int n = grid->dim();
  return ScalarField::from_function(grid, [&](std::span<const double> x) {
    const double y = n >= 2 ? std::cos(kTwoPi * x[1]) : 1.0;
    return amplitude * std::sin(kTwoPi * x[0]) * y;
  });
}

ScalarField density_random(const GridPtr& grid, std::uint64_t seed, double amplitude) {
  auto f = random_field(grid, seed, substream_id("density"), 3, 2.0, true);
  const double m = sup_norm(f);
  return m > 0.0 ? (amplitude / m) * f : f;
}

}  // namespace mildns
