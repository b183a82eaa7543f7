#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mildns/errors.hpp"
#include "mildns/fixed_point.hpp"
#include "mildns/norms.hpp"
#include "mildns/presets.hpp"
#include "mildns/spectral.hpp"

namespace mildns {
namespace {

constexpr double kPi = std::numbers::pi;

SolverConfig config(double mu, double dt, double horizon) {
  SolverConfig c;
  c.mu = mu;
  c.dt = dt;
  c.horizon = horizon;
  return c;
}

TEST(FixedPoint, BilinearEqualsConvectiveFormForResolvedFlow) {
  // For divergence-free u with modes inside the two-thirds band,
  // -div(u (x) u) = -(u . grad) u; the oracle uses pointwise products.
  auto g = make_grid(2, 48);
  const auto u = random_divfree(g, 1, 0, 4, 1.0);
  const auto b = bilinear_term(u);
  for (int i = 0; i < 2; ++i) {
    const auto grad = gradient(u[i]);
    const auto conv = product(u[0], grad[0]) + product(u[1], grad[1]);
    EXPECT_LT(max_abs_diff(b[i], -conv), 1e-11) << "component " << i;
  }
}

TEST(FixedPoint, ContractionOfGradientsByHand) {
  // u = (sin 2 pi y, 0): grad u : grad u^T = du1/dy du2/dx = 0.
  // u = Taylor-Green: 2 (d1u1)^2 + 2 d1u2 d2u1 = 8 pi^2 (cos^2 cos^2 - sin^2 sin^2).
  auto g = make_grid(2, 32);
  const auto tg = taylor_green(g, 1.0);
  const auto expected = ScalarField::from_function(g, [](std::span<const double> x) {
    const double cx = std::cos(2 * kPi * x[0]), cy = std::cos(2 * kPi * x[1]);
    const double sx = std::sin(2 * kPi * x[0]), sy = std::sin(2 * kPi * x[1]);
    return 8 * kPi * kPi * (cx * cx * cy * cy - sx * sx * sy * sy);
  });
  EXPECT_LT(max_abs_diff(velocity_gradient_contraction(tg), expected), 1e-10);
}

TEST(FixedPoint, ConfigValidationNamesTheHypothesis) {
  auto c = config(0.01, 1e-3, 0.1);
  c.p = 2.0;
  try {
    c.validate();
    FAIL() << "p = N accepted";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("N < p <= 6"), std::string::npos);
  }
  c.p = 4.0;
  c.dt = 0.03;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_EQ(config(0.01, 1e-3, 0.1).steps_for(0.1), 100);
}

TEST(FixedPoint, AlphaTermsFollowTheirPowers) {
  auto c = config(0.02, 1e-3, 0.1);
  c.p = 4.0;
  WindowConstants k;
  k.K0 = 1.5;
  k.M = 2.0;
  k.theta = (1.0 - 2.0 / 4.0) / 2.0;
  const auto a1 = alpha_terms(c, k, 1e-4), a2 = alpha_terms(c, k, 4e-4);
  EXPECT_NEAR(a1.viscous, 16 * 0.02 * 4 * 1.5, 1e-14);
  EXPECT_NEAR(a1.quadratic, 80 * 0.02 * 8 * 1.5 * 1.5, 1e-12);
  EXPECT_NEAR(a2.value - a2.leading * std::pow(4e-4, k.theta),
              (a1.value - a1.leading * std::pow(1e-4, k.theta)) * std::pow(4.0, 1 + k.theta), 1e-12);
  EXPECT_NEAR(beta(c, k, 1e-2), std::pow(1e-2, 1 + k.theta) * 40 * 0.02 * 4 * std::pow(1.5, 3), 1e-14);
}

TEST(FixedPoint, DefaultC5SumsH3Norms) {
  auto g = make_grid(2, 16);
  const auto m = eigenmode_noise(g, 3, 0.2, 1.0, 1);
  double sum = 0.0;
  for (const auto& phi : m.phi) sum += hs_norm_sq(phi, 3.0);
  EXPECT_NEAR(default_C5(m), 4 * sum, 1e-12 * sum);
  EXPECT_EQ(default_C5(NoiseModel{}), 0.0);
}

TEST(FixedPoint, HeatOnlyLevelIsTheSemigroup) {
  auto g = make_grid(2, 16);
  auto c = config(0.05, 0.01, 0.05);
  c.nonlinear = false;
  const InitialData init{ScalarField::zeros(g), random_divfree(g, 2, 0, 4, 1.0)};
  const auto run = run_local(c, init, NoiseModel{}, WienerPath{c.dt, 5, 0, {}}, 0.05);
  ASSERT_TRUE(run.report.converged);
  const auto expected_x = apply_radial_symbol(init.u0[0], [](double l) { return std::exp(-0.05 * l * 0.05); });
  EXPECT_LT(max_abs_diff(run.state.u(5)[0], expected_x), 1e-13);
}

TEST(FixedPoint, SeriesCsvHasDocumentedHeader) {
  auto g = make_grid(2, 8);
  const auto row = series_row(0.0, taylor_green(g, 1.0), ScalarField::zeros(g), 4.0);
  const auto csv = series_csv({row});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,u_Lp,u_W2p,H1,H3,a_W2p,div_residual");
  // Full H1 norm: (|u|^2 + |grad u|^2)^{1/2} with |u|^2 = 1/2 and |grad u|^2 = 4 pi^2.
  EXPECT_NEAR(row.h1, std::sqrt(0.5 + 4 * kPi * kPi), 1e-12);
}

}  // namespace
}  // namespace mildns
