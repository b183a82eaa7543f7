#include "mildns/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mildns/errors.hpp"
#include "mildns/norms.hpp"

namespace mildns {

Spectrum forward_transform(const ScalarField& f) { return f.coefficients(); }

ScalarField inverse_transform(GridPtr grid, const Spectrum& coefficients) {
  return ScalarField::from_coefficients(std::move(grid), coefficients);
}

double laplacian_eigenvalue(const WaveIndex& k) {
  double lam = 0.0;
  for (int a = 0; a < k.dim(); ++a) {
    const double w = 2.0 * std::numbers::pi * k[a];
    lam += w * w;
  }
  return lam;
}

ScalarField apply_radial_symbol(const ScalarField& f, const std::function<double(double)>& symbol) {
  auto c = f.coefficients();
  auto lam = f.grid().eigenvalues();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= symbol(lam[i]);
  return ScalarField::from_coefficients(f.grid_ptr(), c, f.mean_zero());
}

ScalarField apply_laplacian(const ScalarField& f) {
  auto c = f.coefficients();
  auto lam = f.grid().eigenvalues();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= -lam[i];
  return ScalarField::from_coefficients(f.grid_ptr(), c, true);
}

VectorField apply_laplacian(const VectorField& u) {
  std::vector<ScalarField> out;
  for (const auto& c : u.components()) out.push_back(apply_laplacian(c));
  return VectorField(std::move(out), u.divergence_free());
}

void require_mean_zero(const ScalarField& f, const char* operation) {
  const double m = std::abs(f.mean());
  if (m > kMeanZeroTolerance * l2_norm(f)) {
    throw DomainError(std::string(operation) + " requires zero mean (mean = " + std::to_string(m) + ")");
  }
}

ScalarField inverse_laplacian(const ScalarField& f) {
  require_mean_zero(f, "inverse Laplacian");
  auto c = f.coefficients();
  auto lam = f.grid().eigenvalues();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = lam[i] > 0.0 ? -c[i] / lam[i] : Complex(0.0);
  return ScalarField::from_coefficients(f.grid_ptr(), c, true);
}

ScalarField inverse_sqrt_laplacian(const ScalarField& f) {
  require_mean_zero(f, "inverse square-root Laplacian");
  auto c = f.coefficients();
  auto lam = f.grid().eigenvalues();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = lam[i] > 0.0 ? c[i] / std::sqrt(lam[i]) : Complex(0.0);
  return ScalarField::from_coefficients(f.grid_ptr(), c, true);
}

ScalarField partial_derivative(const ScalarField& f, int axis) {
  auto c = f.coefficients();
  auto k = f.grid().derivative_symbol(axis);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= Complex(0.0, k[i]);
  return ScalarField::from_coefficients(f.grid_ptr(), c, true);
}

VectorField gradient(const ScalarField& f) {
  const auto& g = f.grid();
  const auto c = f.coefficients();
  std::vector<ScalarField> out;
  Spectrum d(c.size());
  for (int a = 0; a < g.dim(); ++a) {
    auto k = g.derivative_symbol(a);
    for (std::size_t i = 0; i < c.size(); ++i) d[i] = c[i] * Complex(0.0, k[i]);
    out.push_back(ScalarField::from_coefficients(f.grid_ptr(), d, true));
  }
  return VectorField(std::move(out));
}

ScalarField divergence(const VectorField& u) {
  const auto& g = u.grid();
  Spectrum acc(g.size(), Complex(0.0));
  for (int a = 0; a < g.dim(); ++a) {
    const auto c = u[a].coefficients();
    auto k = g.derivative_symbol(a);
    for (std::size_t i = 0; i < c.size(); ++i) acc[i] += c[i] * Complex(0.0, k[i]);
  }
  return ScalarField::from_coefficients(u.grid_ptr(), acc, true);
}

VectorField leray_project(const VectorField& u) {
  const auto& g = u.grid();
  const int n = g.dim();
  std::vector<Spectrum> c;
  for (int a = 0; a < n; ++a) c.push_back(u[a].coefficients());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double k2 = 0.0;
    Complex kdotu(0.0);
    for (int a = 0; a < n; ++a) {
      const double k = g.derivative_symbol(a)[i];
      k2 += k * k;
      kdotu += k * c[static_cast<std::size_t>(a)][i];
    }
    if (k2 == 0.0) continue;
    for (int a = 0; a < n; ++a) c[static_cast<std::size_t>(a)][i] -= g.derivative_symbol(a)[i] * kdotu / k2;
  }
  std::vector<ScalarField> out;
  for (int a = 0; a < n; ++a) out.push_back(ScalarField::from_coefficients(u.grid_ptr(), c[static_cast<std::size_t>(a)]));
  return VectorField(std::move(out), true);
}

ScalarField dealias(const ScalarField& f) {
  auto c = f.coefficients();
  auto mask = f.grid().dealias_mask();
  for (std::size_t i = 0; i < c.size(); ++i)
    if (!mask[i]) c[i] = Complex(0.0);
  return ScalarField::from_coefficients(f.grid_ptr(), c, f.mean_zero());
}

VectorField dealias(const VectorField& u) {
  std::vector<ScalarField> out;
  for (const auto& c : u.components()) out.push_back(dealias(c));
  return VectorField(std::move(out), u.divergence_free());
}

ScalarField dealiased_product(const ScalarField& a, const ScalarField& b) { return dealias(product(a, b)); }

}  // namespace mildns
