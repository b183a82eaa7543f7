#include "mildns/norms.hpp"

#include <algorithm>
#include <cmath>

#include "mildns/spectral.hpp"

namespace mildns {
namespace {

double lp_of_magnitude(std::span<const double> mag, double p) {
  double acc = 0.0;
  for (double m : mag) acc += std::pow(std::abs(m), p);
  return std::pow(acc / static_cast<double>(mag.size()), 1.0 / p);
}

ScalarField sqrt_of(GridPtr grid, std::vector<double> sq) {
  for (auto& x : sq) x = std::sqrt(x);
  return ScalarField(std::move(grid), std::move(sq));
}

void accumulate_squares(std::vector<double>& acc, const ScalarField& f) {
  auto v = f.values();
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i] * v[i];
}

void accumulate_gradient(std::vector<double>& acc, const ScalarField& f) {
  const auto c = f.coefficients();
  const auto& g = f.grid();
  Spectrum d(c.size());
  for (int a = 0; a < g.dim(); ++a) {
    auto k = g.derivative_symbol(a);
    for (std::size_t i = 0; i < c.size(); ++i) d[i] = c[i] * Complex(0.0, k[i]);
    accumulate_squares(acc, ScalarField::from_coefficients(f.grid_ptr(), d));
  }
}

void accumulate_hessian(std::vector<double>& acc, const ScalarField& f) {
  const auto c = f.coefficients();
  const auto& g = f.grid();
  Spectrum d(c.size());
  for (int a = 0; a < g.dim(); ++a) {
    for (int b = a; b < g.dim(); ++b) {
      auto ka = g.derivative_symbol(a);
      auto kb = g.derivative_symbol(b);
      for (std::size_t i = 0; i < c.size(); ++i) d[i] = -c[i] * ka[i] * kb[i];
      auto h = ScalarField::from_coefficients(f.grid_ptr(), d);
      auto v = h.values();
      const double mult = a == b ? 1.0 : 2.0;
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += mult * v[i] * v[i];
    }
  }
}

double spectral_weighted_sum(const ScalarField& f, const auto& weight) {
  const auto c = f.coefficients();
  const auto lam = f.grid().eigenvalues();
  double acc = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) acc += weight(lam[i]) * std::norm(c[i]);
  const double n = static_cast<double>(c.size());
  return acc / (n * n);
}

}  // namespace

double lp_norm(const ScalarField& f, double p) { return lp_of_magnitude(f.values(), p); }
double lp_norm(const VectorField& u, double p) { return lp_of_magnitude(magnitude(u).values(), p); }
double l2_norm(const ScalarField& f) { return lp_norm(f, 2.0); }
double l2_norm(const VectorField& u) { return lp_norm(u, 2.0); }

double sup_norm(const ScalarField& f) {
  double m = 0.0;
  for (double x : f.values()) m = std::max(m, std::abs(x));
  return m;
}

double sup_norm(const VectorField& u) { return sup_norm(magnitude(u)); }

ScalarField magnitude(const VectorField& u) {
  std::vector<double> acc(u.grid().size(), 0.0);
  for (const auto& c : u.components()) accumulate_squares(acc, c);
  return sqrt_of(u.grid_ptr(), std::move(acc));
}

ScalarField gradient_magnitude(const ScalarField& f) {
  std::vector<double> acc(f.size(), 0.0);
  accumulate_gradient(acc, f);
  return sqrt_of(f.grid_ptr(), std::move(acc));
}

ScalarField gradient_magnitude(const VectorField& u) {
  std::vector<double> acc(u.grid().size(), 0.0);
  for (const auto& c : u.components()) accumulate_gradient(acc, c);
  return sqrt_of(u.grid_ptr(), std::move(acc));
}

ScalarField hessian_magnitude(const ScalarField& f) {
  std::vector<double> acc(f.size(), 0.0);
  accumulate_hessian(acc, f);
  return sqrt_of(f.grid_ptr(), std::move(acc));
}

ScalarField hessian_magnitude(const VectorField& u) {
  std::vector<double> acc(u.grid().size(), 0.0);
  for (const auto& c : u.components()) accumulate_hessian(acc, c);
  return sqrt_of(u.grid_ptr(), std::move(acc));
}

double w2p_norm(const ScalarField& f, double p) {
  return lp_norm(f, p) + lp_norm(gradient_magnitude(f), p) + lp_norm(hessian_magnitude(f), p);
}

double w2p_norm(const VectorField& u, double p) {
  return lp_norm(u, p) + lp_norm(gradient_magnitude(u), p) + lp_norm(hessian_magnitude(u), p);
}

double hs_norm_sq(const ScalarField& f, double s) {
  return spectral_weighted_sum(f, [s](double lam) { return std::pow(1.0 + lam, s); });
}

double hs_norm_sq(const VectorField& u, double s) {
  double acc = 0.0;
  for (const auto& c : u.components()) acc += hs_norm_sq(c, s);
  return acc;
}

double gradient_power_norm(const ScalarField& f, int k) {
  return std::sqrt(spectral_weighted_sum(f, [k](double lam) { return std::pow(lam, k); }));
}

double gradient_power_norm(const VectorField& u, int k) {
  double acc = 0.0;
  for (const auto& c : u.components()) {
    const double n = gradient_power_norm(c, k);
    acc += n * n;
  }
  return std::sqrt(acc);
}

double inner(const ScalarField& f, const ScalarField& g) {
  auto a = f.values();
  auto b = g.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc / static_cast<double>(a.size());
}

double inner(const VectorField& u, const VectorField& w) {
  double acc = 0.0;
  for (int a = 0; a < u.dim(); ++a) acc += inner(u[a], w[a]);
  return acc;
}

double weighted_l2_norm(const ScalarField& f, const ScalarField& weight) {
  auto v = f.values();
  auto w = weight.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += w[i] * v[i] * v[i];
  return std::sqrt(acc / static_cast<double>(v.size()));
}

double weighted_l2_norm(const VectorField& u, const ScalarField& weight) {
  double acc = 0.0;
  for (const auto& c : u.components()) {
    const double n = weighted_l2_norm(c, weight);
    acc += n * n;
  }
  return std::sqrt(acc);
}

}  // namespace mildns
