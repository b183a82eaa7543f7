#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mildns/errors.hpp"
#include "mildns/norms.hpp"
#include "mildns/presets.hpp"
#include "mildns/spectral.hpp"
#include "mildns/transport.hpp"

namespace mildns {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

VelocityHistory steady(const VectorField& u, double dt, int steps) {
  VelocityHistory h;
  h.dt = dt;
  h.samples.assign(static_cast<std::size_t>(steps + 1), u);
  return h;
}

// Method-of-lines oracle: a_t = -u . grad a with spectral gradients and
// classical RK4 in time. Independent of characteristics and interpolation.
ScalarField mol_advect(const ScalarField& a0, const VectorField& u, double t, int steps) {
  auto rhs = [&](const ScalarField& a) {
    const auto grad = gradient(a);
    auto out = ScalarField::zeros(a.grid_ptr());
    for (int d = 0; d < u.dim(); ++d) out = out - product(u[d], grad[d]);
    return out;
  };
  const double h = t / steps;
  auto a = a0;
  for (int i = 0; i < steps; ++i) {
    const auto k1 = rhs(a);
    const auto k2 = rhs(a + (0.5 * h) * k1);
    const auto k3 = rhs(a + (0.5 * h) * k2);
    const auto k4 = rhs(a + h * k3);
    a = a + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return a;
}

TEST(Transport, MatchesMethodOfLinesUnderSwirl) {
  auto g = make_grid(2, 64);
  const auto u = taylor_green(g, 0.5);
  const auto a0 = ScalarField::from_function(g, [](std::span<const double> x) {
    return 0.2 * std::sin(kTwoPi * x[0]) + 0.1 * std::cos(kTwoPi * (x[0] + 2 * x[1]));
  });
  const double t = 0.1;
  const auto semi = advect_density(a0, steady(u, 1e-3, 100), t);
  const auto oracle = mol_advect(a0, u, t, 400);
  EXPECT_LT(max_abs_diff(semi.a, oracle), 2e-5);
}

TEST(Transport, TrajectoryAndDirectAdvectionMatchTheOracle) {
  // Time-dependent flow, linear between samples in both the scheme and the oracle.
  auto g = make_grid(2, 32);
  const auto a0 = ScalarField::from_function(g, [](std::span<const double> x) {
    return 0.2 * std::sin(kTwoPi * x[0]) * std::cos(kTwoPi * x[1]);
  });
  VelocityHistory h;
  h.dt = 0.01;
  const auto u1 = random_divfree(g, 8, 0, 3, 1.0), u2 = random_divfree(g, 8, 1, 3, 1.0);
  for (int j = 0; j <= 10; ++j) h.samples.push_back(0.2 * (std::cos(0.3 * j) * u1 + std::sin(0.3 * j) * u2));
  auto a = a0;
  constexpr int kSub = 200;
  for (int j = 0; j < 10; ++j) {
    const double hs = h.dt / kSub;
    for (int i = 0; i < kSub; ++i) {
      auto u_at = [&](double s) { return (1.0 - s) * h.samples[static_cast<std::size_t>(j)] + s * h.samples[static_cast<std::size_t>(j + 1)]; };
      const double s0 = static_cast<double>(i) / kSub;
      const double ds = 1.0 / kSub;
      auto rhs = [&](const ScalarField& f, double s) {
        const auto u = u_at(s);
        const auto grad = gradient(f);
        return -1.0 * (product(u[0], grad[0]) + product(u[1], grad[1]));
      };
      const auto k1 = rhs(a, s0);
      const auto k2 = rhs(a + (0.5 * hs) * k1, s0 + 0.5 * ds);
      const auto k3 = rhs(a + (0.5 * hs) * k2, s0 + 0.5 * ds);
      const auto k4 = rhs(a + hs * k3, s0 + ds);
      a = a + (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  const auto traj = advect_trajectory(a0, h);
  ASSERT_EQ(traj.size(), 11u);
  EXPECT_EQ(max_abs_diff(traj.front().a, a0), 0.0);
  EXPECT_LT(max_abs_diff(traj.back().a, a), 1e-4);
  EXPECT_LT(max_abs_diff(advect_density(a0, h, 0.1).a, a), 1e-4);
}

TEST(Transport, InterpolationIsExactForCubics) {
  // Cubic Lagrange interpolation reproduces cubic polynomials away from the wrap.
  auto g = make_grid(1, 32);
  auto cubic = [](double x) { return 0.5 + x - 2 * x * x + 1.5 * x * x * x; };
  const auto f = ScalarField::from_function(g, [&](std::span<const double> x) { return cubic(x[0]); });
  for (double x : {0.3, 0.41, 0.5077, 0.66}) {
    const std::array<double, 1> p{x};
    EXPECT_NEAR(interpolate(f, p), cubic(x), 1e-13) << x;
  }
}

TEST(Transport, ReversedHistoryNegatesAndReverses) {
  auto g = make_grid(2, 8);
  VelocityHistory h;
  h.dt = 0.5;
  h.samples = {VectorField::zeros(g), taylor_green(g, 1.0)};
  const auto r = h.reversed();
  EXPECT_EQ(max_abs_diff(r.samples.front(), -1.0 * taylor_green(g, 1.0)), 0.0);
  EXPECT_EQ(sup_norm(r.samples.back()), 0.0);
  EXPECT_DOUBLE_EQ(r.end_time(), 0.5);
}

TEST(Transport, RejectsNonPositiveDensity) {
  auto g = make_grid(2, 8);
  const auto a = ScalarField::constant(g, -1.5);
  EXPECT_THROW((void)advect_density(a, steady(VectorField::zeros(g), 0.1, 1), 0.1), DensityBandError);
}

TEST(Transport, EmbeddingConstantIsPositiveAndStable) {
  const double c32 = calibrate_embedding_constant(make_grid(2, 32), 4.0);
  const double c64 = calibrate_embedding_constant(make_grid(2, 64), 4.0);
  EXPECT_GT(c32, 0.0);
  EXPECT_NEAR(c64 / c32, 1.0, 0.25);
}

}  // namespace
}  // namespace mildns
