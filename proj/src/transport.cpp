#include "mildns/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mildns/errors.hpp"
#include "mildns/norms.hpp"

namespace mildns {
namespace {

constexpr double kSnap = 1e-12;

struct Stencil {
  std::array<std::array<int, 4>, 3> index{};
  std::array<std::array<double, 4>, 3> weight{};
};

Stencil make_stencil(const TorusGrid& g, std::span<const double> x) {
  Stencil s;
  for (int a = 0; a < g.dim(); ++a) {
    const int m = g.resolution(a);
    const double pos = x[static_cast<std::size_t>(a)] * m;
    double fl = std::floor(pos);
    double f = pos - fl;
    if (f < kSnap) {
      f = 0.0;
    } else if (1.0 - f < kSnap) {
      f = 0.0;
      fl += 1.0;
    }
    const auto base = static_cast<long>(fl);
    auto& idx = s.index[static_cast<std::size_t>(a)];
    for (int o = 0; o < 4; ++o) {
      long i = (base - 1 + o) % m;
      if (i < 0) i += m;
      idx[static_cast<std::size_t>(o)] = static_cast<int>(i);
    }
    auto& w = s.weight[static_cast<std::size_t>(a)];
    w[0] = -f * (f - 1.0) * (f - 2.0) / 6.0;
    w[1] = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
    w[2] = -(f + 1.0) * f * (f - 2.0) / 2.0;
    w[3] = (f + 1.0) * f * (f - 1.0) / 6.0;
  }
  return s;
}

double evaluate(const TorusGrid& g, std::span<const double> v, const Stencil& s) {
  const int n = g.dim();
  if (n == 1) {
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) acc += s.weight[0][i] * v[static_cast<std::size_t>(s.index[0][i])];
    return acc;
  }
  const auto m1 = static_cast<std::size_t>(g.resolution(1));
  if (n == 2) {
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) {
      const auto row = static_cast<std::size_t>(s.index[0][i]) * m1;
      double r = 0.0;
      for (int j = 0; j < 4; ++j) r += s.weight[1][j] * v[row + static_cast<std::size_t>(s.index[1][j])];
      acc += s.weight[0][i] * r;
    }
    return acc;
  }
  const auto m2 = static_cast<std::size_t>(g.resolution(2));
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    double plane = 0.0;
    for (int j = 0; j < 4; ++j) {
      const auto row = (static_cast<std::size_t>(s.index[0][i]) * m1 + static_cast<std::size_t>(s.index[1][j])) * m2;
      double r = 0.0;
      for (int k = 0; k < 4; ++k) r += s.weight[2][k] * v[row + static_cast<std::size_t>(s.index[2][k])];
      plane += s.weight[1][j] * r;
    }
    acc += s.weight[0][i] * plane;
  }
  return acc;
}

double wrap(double x) {
  double w = x - std::floor(x);
  return w >= 1.0 ? 0.0 : w;
}

std::array<double, 3> grid_point(const TorusGrid& g, std::size_t flat) {
  std::array<double, 3> x{};
  const auto idx = g.unflatten(flat);
  for (int a = 0; a < g.dim(); ++a) x[static_cast<std::size_t>(a)] = idx[static_cast<std::size_t>(a)] * g.spacing(a);
  return x;
}

// Velocity at an arbitrary point and time, linear in time between samples.
std::array<double, 3> velocity_at(const VelocityHistory& h, std::span<const double> x, double t) {
  const auto& g = h.samples.front().grid();
  const auto last = h.samples.size() - 1;
  double pos = last == 0 ? 0.0 : std::clamp(t / h.dt, 0.0, static_cast<double>(last));
  auto j = static_cast<std::size_t>(std::floor(pos));
  if (j >= last) j = last == 0 ? 0 : last - 1;
  const double w = last == 0 ? 0.0 : pos - static_cast<double>(j);
  const auto st = make_stencil(g, x);
  std::array<double, 3> u{};
  for (int a = 0; a < g.dim(); ++a) {
    const double u0 = evaluate(g, h.samples[j][a].values(), st);
    const double u1 = last == 0 ? u0 : evaluate(g, h.samples[j + 1][a].values(), st);
    u[static_cast<std::size_t>(a)] = (1.0 - w) * u0 + w * u1;
  }
  return u;
}

bool is_constant(const ScalarField& f) { return f.min() == f.max(); }

}  // namespace

void VelocityHistory::require_covers(double t) const {
  if (samples.empty()) throw InputError("velocity history is empty");
  if (!(dt > 0.0)) throw InputError("velocity history step must be positive");
  if (t < 0.0) throw InputError("transport time must be non-negative");
  if (t > end_time() * (1.0 + 1e-12) + 1e-14)
    throw InputError("velocity history ends at t=" + std::to_string(end_time()) + " before requested t=" +
                     std::to_string(t));
}

VelocityHistory VelocityHistory::reversed() const {
  VelocityHistory r;
  r.dt = dt;
  for (auto it = samples.rbegin(); it != samples.rend(); ++it) r.samples.push_back(-1.0 * *it);
  return r;
}

DensityState::DensityState(ScalarField field) : a(std::move(field)) {
  lower = 1.0 + a.min();
  upper = 1.0 + a.max();
}

double interpolate(const ScalarField& f, std::span<const double> x) {
  std::array<double, 3> w{};
  for (int a = 0; a < f.grid().dim(); ++a) w[static_cast<std::size_t>(a)] = wrap(x[static_cast<std::size_t>(a)]);
  return evaluate(f.grid(), f.values(), make_stencil(f.grid(), w));
}

std::array<double, 3> backtrack_foot(std::span<const double> x, const VelocityHistory& history, double t) {
  history.require_covers(t);
  const int n = history.samples.front().grid().dim();
  std::array<double, 3> y{};
  for (int a = 0; a < n; ++a) y[static_cast<std::size_t>(a)] = x[static_cast<std::size_t>(a)];

  double t1 = t;
  while (t1 > 0.0) {
    double t0 = std::floor(t1 / history.dt * (1.0 + 1e-14)) * history.dt;
    if (t0 >= t1 - 1e-14 * history.dt) t0 = t1 - history.dt;
    t0 = std::max(t0, 0.0);
    const double h = t1 - t0;
    const auto u1 = velocity_at(history, y, t1);
    std::array<double, 3> mid{};
    for (int a = 0; a < n; ++a) mid[static_cast<std::size_t>(a)] = wrap(y[static_cast<std::size_t>(a)] - 0.5 * h * u1[static_cast<std::size_t>(a)]);
    const auto um = velocity_at(history, std::span<const double>(mid.data(), static_cast<std::size_t>(n)), t1 - 0.5 * h);
    for (int a = 0; a < n; ++a) y[static_cast<std::size_t>(a)] = wrap(y[static_cast<std::size_t>(a)] - h * um[static_cast<std::size_t>(a)]);
    t1 = t0;
  }
  return y;
}

DensityState advect_density(const ScalarField& a0, const VelocityHistory& history, double t) {
  history.require_covers(t);
  if (1.0 + a0.min() <= 0.0) throw DensityBandError("initial density 1+a0 is not positive");
  if (is_constant(a0) || t == 0.0) return DensityState(a0);
  const auto& g = a0.grid();
  const double lo = a0.min();
  const double hi = a0.max();
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto x = grid_point(g, i);
    const auto foot = backtrack_foot(std::span<const double>(x.data(), static_cast<std::size_t>(g.dim())), history, t);
    out[i] = std::clamp(interpolate(a0, std::span<const double>(foot.data(), static_cast<std::size_t>(g.dim()))), lo, hi);
  }
  DensityState s(ScalarField(a0.grid_ptr(), std::move(out)));
  if (s.lower <= 0.0) throw DensityBandError("advected density lost positivity");
  return s;
}

std::vector<DensityState> advect_trajectory(const ScalarField& a0, const VelocityHistory& history) {
  history.require_covers(0.0);
  if (1.0 + a0.min() <= 0.0) throw DensityBandError("initial density 1+a0 is not positive");
  const std::size_t steps = history.samples.size();
  std::vector<DensityState> out;
  out.reserve(steps);
  out.emplace_back(a0);
  if (is_constant(a0)) {
    for (std::size_t j = 1; j < steps; ++j) out.emplace_back(a0);
    return out;
  }

  const auto& g = a0.grid();
  const int n = g.dim();
  const auto npts = g.size();
  const double h = history.dt;
  const double lo = a0.min();
  const double hi = a0.max();

  // disp[a][i]: foot(x_i) - x_i for the current time level, unwrapped.
  std::vector<std::vector<double>> disp(static_cast<std::size_t>(n), std::vector<double>(npts, 0.0));
  std::vector<std::vector<double>> next(static_cast<std::size_t>(n), std::vector<double>(npts, 0.0));
  std::vector<std::vector<double>> half(static_cast<std::size_t>(n), std::vector<double>(npts, 0.0));

  for (std::size_t j = 0; j + 1 < steps; ++j) {
    const auto& u0 = history.samples[j];
    const auto& u1 = history.samples[j + 1];
    for (int a = 0; a < n; ++a) {
      auto v0 = u0[a].values();
      auto v1 = u1[a].values();
      auto& hv = half[static_cast<std::size_t>(a)];
      for (std::size_t i = 0; i < npts; ++i) hv[i] = 0.5 * (v0[i] + v1[i]);
    }

    std::vector<double> a_next(npts);
    for (std::size_t i = 0; i < npts; ++i) {
      const auto x = grid_point(g, i);
      std::array<double, 3> mid{};
      for (int a = 0; a < n; ++a) mid[static_cast<std::size_t>(a)] = wrap(x[static_cast<std::size_t>(a)] - 0.5 * h * u1[a][i]);
      const auto sm = make_stencil(g, mid);
      std::array<double, 3> y{};
      for (int a = 0; a < n; ++a) {
        const double um = evaluate(g, half[static_cast<std::size_t>(a)], sm);
        y[static_cast<std::size_t>(a)] = x[static_cast<std::size_t>(a)] - h * um;
      }
      std::array<double, 3> yw{};
      for (int a = 0; a < n; ++a) yw[static_cast<std::size_t>(a)] = wrap(y[static_cast<std::size_t>(a)]);
      const auto sy = make_stencil(g, yw);
      std::array<double, 3> foot{};
      for (int a = 0; a < n; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        const double d = y[ua] - x[ua] + evaluate(g, disp[ua], sy);
        next[ua][i] = d;
        foot[ua] = wrap(x[ua] + d);
      }
      a_next[i] = std::clamp(evaluate(g, a0.values(), make_stencil(g, foot)), lo, hi);
    }
    std::swap(disp, next);
    out.emplace_back(ScalarField(a0.grid_ptr(), std::move(a_next)));
  }
  return out;
}

double calibrate_embedding_constant(const GridPtr& grid, double p) {
  const auto& g = *grid;
  const int kmax = std::min(3, g.resolution(0) / 3);
  double best = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto k = g.wave_index(i);
    bool ok = true;
    bool nonzero = false;
    for (int a = 0; a < g.dim(); ++a) {
      ok = ok && k[a] >= 0 && k[a] <= kmax;
      nonzero = nonzero || k[a] != 0;
    }
    if (!ok || !nonzero) continue;
    for (int phase = 0; phase < 2; ++phase) {
      auto e = ScalarField::from_function(grid, [&](std::span<const double> x) {
        double arg = 0.0;
        for (int a = 0; a < g.dim(); ++a) arg += 2.0 * std::numbers::pi * k[a] * x[static_cast<std::size_t>(a)];
        return phase == 0 ? std::cos(arg) : std::sin(arg);
      });
      const double denom = lp_norm(hessian_magnitude(e), p);
      if (denom > 0.0) best = std::max(best, sup_norm(gradient_magnitude(e)) / denom);
    }
  }
  return best;
}

SobolevGrowthReport sobolev_growth_diagnostic(const DensityState& a, const ScalarField& a0,
                                              const VelocityHistory& history, double t, double p,
                                              double embedding_constant) {
  history.require_covers(t);
  double sup_hess_u = 0.0;
  const auto last = static_cast<std::size_t>(std::llround(t / history.dt));
  for (std::size_t j = 0; j <= std::min(last, history.samples.size() - 1); ++j)
    sup_hess_u = std::max(sup_hess_u, lp_norm(hessian_magnitude(history.samples[j]), p));

  SobolevGrowthReport r;
  r.embedding_constant = embedding_constant;
  r.measured = w2p_norm(a.a, p);
  r.initial = w2p_norm(a0, p);
  r.bound_factor = 1.0 + t * embedding_constant * sup_hess_u;
  r.bound = r.initial * r.bound_factor;
  r.hessian_measured = lp_norm(hessian_magnitude(a.a), p);
  r.hessian_bound = lp_norm(hessian_magnitude(a0), p) * r.bound_factor;
  r.violated = r.measured > r.bound * (1.0 + 1e-12);
  return r;
}

}  // namespace mildns
