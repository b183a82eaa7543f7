#include "mildns/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fft.hpp"
#include "mildns/errors.hpp"

namespace mildns {
namespace {

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (a.grid_ptr() != b.grid_ptr() && !a.grid().same_shape(b.grid()))
    throw ConfigError("fields live on different grids (" + a.grid().describe() + " vs " + b.grid().describe() + ")");
}

template <typename Op>
ScalarField zip(const ScalarField& a, const ScalarField& b, Op op, bool mean_zero = false) {
  require_same_grid(a, b);
  std::vector<double> out(a.size());
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(av[i], bv[i]);
  return ScalarField(a.grid_ptr(), std::move(out), mean_zero);
}

}  // namespace

ScalarField::ScalarField(GridPtr grid, std::vector<double> values, bool mean_zero)
    : grid_(std::move(grid)), values_(std::move(values)), mean_zero_(mean_zero) {
  if (!grid_) throw ConfigError("field constructed without a grid");
  if (values_.size() != grid_->size())
    throw ConfigError("sample count " + std::to_string(values_.size()) + " does not match grid " + grid_->describe());
}

ScalarField ScalarField::zeros(GridPtr grid) {
  const auto n = grid->size();
  return ScalarField(std::move(grid), std::vector<double>(n, 0.0), true);
}

ScalarField ScalarField::constant(GridPtr grid, double value) {
  const auto n = grid->size();
  return ScalarField(std::move(grid), std::vector<double>(n, value), value == 0.0);
}

ScalarField ScalarField::from_function(GridPtr grid, const std::function<double(std::span<const double>)>& fn) {
  const auto& g = *grid;
  std::vector<double> v(g.size());
  std::array<double, 3> x{};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.unflatten(i);
    for (int a = 0; a < g.dim(); ++a) x[static_cast<std::size_t>(a)] = idx[static_cast<std::size_t>(a)] * g.spacing(a);
    v[i] = fn(std::span<const double>(x.data(), static_cast<std::size_t>(g.dim())));
  }
  return ScalarField(std::move(grid), std::move(v));
}

ScalarField ScalarField::from_coefficients(GridPtr grid, const Spectrum& coefficients, bool mean_zero) {
  const auto n = grid->size();
  if (coefficients.size() != n) throw ConfigError("spectrum size does not match grid " + grid->describe());
  Spectrum out(n);
  grid->fft().backward(coefficients.data(), out.data());
  std::vector<double> v(n);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = out[i].real() * inv;
  return ScalarField(std::move(grid), std::move(v), mean_zero);
}

Spectrum ScalarField::coefficients() const {
  Spectrum in(values_.begin(), values_.end());
  Spectrum out(values_.size());
  grid_->fft().forward(in.data(), out.data());
  return out;
}

double ScalarField::mean() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

ScalarField ScalarField::map(const std::function<double(double)>& fn) const {
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), fn);
  return ScalarField(grid_, std::move(out));
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  return zip(a, b, std::plus<>(), a.mean_zero() && b.mean_zero());
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  return zip(a, b, std::minus<>(), a.mean_zero() && b.mean_zero());
}

ScalarField operator*(double s, const ScalarField& a) {
  std::vector<double> out(a.values().begin(), a.values().end());
  for (auto& x : out) x *= s;
  return ScalarField(a.grid_ptr(), std::move(out), a.mean_zero());
}

ScalarField operator-(const ScalarField& a) { return -1.0 * a; }

ScalarField product(const ScalarField& a, const ScalarField& b) { return zip(a, b, std::multiplies<>()); }

ScalarField remove_mean(const ScalarField& f) {
  const double m = f.mean();
  std::vector<double> out(f.values().begin(), f.values().end());
  for (auto& x : out) x -= m;
  return ScalarField(f.grid_ptr(), std::move(out), true);
}

VectorField::VectorField(std::vector<ScalarField> components, bool divergence_free)
    : components_(std::move(components)), divergence_free_(divergence_free) {
  if (components_.empty()) throw ConfigError("vector field needs at least one component");
  const auto& g = components_.front().grid();
  if (static_cast<int>(components_.size()) != g.dim())
    throw ConfigError("vector field component count must equal the grid dimension");
  for (const auto& c : components_) require_same_grid(components_.front(), c);
}

VectorField VectorField::zeros(GridPtr grid) {
  std::vector<ScalarField> comps;
  for (int a = 0; a < grid->dim(); ++a) comps.push_back(ScalarField::zeros(grid));
  return VectorField(std::move(comps), true);
}

VectorField VectorField::with_divergence_free(bool flag) const {
  return VectorField(components_, flag);
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  if (a.dim() != b.dim()) throw ConfigError("vector fields differ in dimension");
  std::vector<ScalarField> c;
  for (int i = 0; i < a.dim(); ++i) c.push_back(a[i] + b[i]);
  return VectorField(std::move(c), a.divergence_free() && b.divergence_free());
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  if (a.dim() != b.dim()) throw ConfigError("vector fields differ in dimension");
  std::vector<ScalarField> c;
  for (int i = 0; i < a.dim(); ++i) c.push_back(a[i] - b[i]);
  return VectorField(std::move(c), a.divergence_free() && b.divergence_free());
}

VectorField operator*(double s, const VectorField& a) {
  std::vector<ScalarField> c;
  for (int i = 0; i < a.dim(); ++i) c.push_back(s * a[i]);
  return VectorField(std::move(c), a.divergence_free());
}

VectorField product(const ScalarField& s, const VectorField& u) {
  std::vector<ScalarField> c;
  for (int i = 0; i < u.dim(); ++i) c.push_back(product(s, u[i]));
  return VectorField(std::move(c));
}

bool all_finite(const ScalarField& f) {
  return std::all_of(f.values().begin(), f.values().end(), [](double x) { return std::isfinite(x); });
}

bool all_finite(const VectorField& u) {
  return std::all_of(u.components().begin(), u.components().end(), [](const auto& c) { return all_finite(c); });
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs_diff(const VectorField& a, const VectorField& b) {
  double m = 0.0;
  for (int i = 0; i < a.dim(); ++i) m = std::max(m, max_abs_diff(a[i], b[i]));
  return m;
}

}  // namespace mildns
