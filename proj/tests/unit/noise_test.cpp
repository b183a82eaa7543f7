#include <cmath>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "mildns/errors.hpp"
#include "mildns/noise.hpp"
#include "mildns/norms.hpp"
#include "mildns/presets.hpp"
#include "mildns/rng.hpp"
#include "mildns/spectral.hpp"
#include "mildns/stats.hpp"

namespace mildns {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Rng, PhiloxKnownAnswer) {
  // Reference vector of the Random123 distribution for Philox4x32-10.
  const auto out = philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
  const auto ones = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(ones[0], 0x408f276du);
  EXPECT_EQ(ones[1], 0x41c83b0eu);
  EXPECT_EQ(ones[2], 0xa20bc7c6u);
  EXPECT_EQ(ones[3], 0x6d5451fdu);
}

TEST(Rng, DrawsDependOnlyOnTheirAddress) {
  const CounterRng a(9, 3, 1), b(9, 3, 1), c(9, 4, 1);
  EXPECT_EQ(a.normal(17, 2), b.normal(17, 2));
  EXPECT_NE(a.normal(17, 2), c.normal(17, 2));
  std::vector<double> x;
  for (std::uint32_t i = 0; i < 20000; ++i) x.push_back(a.normal(i, 0));
  EXPECT_NEAR(mean(x), 0.0, 4.0 / std::sqrt(20000.0));
  EXPECT_NEAR(variance(x), 1.0, 0.04);
}

TEST(Noise, EigenmodesAreDivergenceFreeAndOrdered) {
  auto g = make_grid(2, 16);
  const auto m = eigenmode_noise(g, 6, 0.5, 1.0, 3);
  ASSERT_EQ(m.modes(), 6);
  double prev = 0.0;
  for (const auto& phi : m.phi) {
    EXPECT_LT(l2_norm(divergence(phi)), 1e-12);
    // Amplitude |q|^{-decay} times a unit direction and a cos or sin profile.
    const double h1 = gradient_power_norm(phi, 1) / l2_norm(phi);
    EXPECT_GE(h1, prev - 1e-12);
    prev = h1;
  }
  EXPECT_NEAR(l2_norm(m.phi[0]), 0.5 * std::sqrt(0.5), 1e-12);
  EXPECT_THROW((void)eigenmode_noise(make_grid(1, 16), 2, 1.0, 1.0, 1), ConfigError);
}

TEST(Noise, CPhiOfSingleModeByHand) {
  // Phi = A (0, cos 2 pi x): sup A, gradient 2 pi A, Laplacian 4 pi^2 A, grad Laplacian 8 pi^3 A.
  auto g = make_grid(2, 32);
  const double amp = 0.3;
  NoiseModel m;
  m.phi.push_back(VectorField({ScalarField::zeros(g), amp * ScalarField::from_function(g, [](std::span<const double> x) {
                                                         return std::cos(2 * kPi * x[0]);
                                                       })}));
  const auto terms = compute_C_Phi_terms(m);
  EXPECT_NEAR(terms.sup, amp * amp, 1e-12);
  EXPECT_NEAR(terms.gradient, std::pow(2 * kPi * amp, 2), 1e-10);
  EXPECT_NEAR(terms.laplacian, std::pow(4 * kPi * kPi * amp, 2), 1e-8);
  EXPECT_NEAR(terms.grad_laplacian, std::pow(8 * kPi * kPi * kPi * amp, 2), 1e-6);
  EXPECT_DOUBLE_EQ(terms.value, terms.grad_laplacian);
}

TEST(Noise, IncrementsHaveVarianceDtAndCoarsenBySums) {
  auto g = make_grid(2, 8);
  const auto m = eigenmode_noise(g, 3, 1.0, 1.0, 5);
  const auto p = sample_increments(m, 4000, 0.01, 0);
  EXPECT_NEAR(variance(p.increments) / 0.01, 1.0, 0.05);
  const auto c = p.coarsened();
  ASSERT_EQ(c.steps, 2000);
  EXPECT_DOUBLE_EQ(c.dt, 0.02);
  EXPECT_DOUBLE_EQ(c(7, 2), p(14, 2) + p(15, 2));
  const auto tail = sample_increments(m, 10, 0.01, 0, 100);
  EXPECT_EQ(tail(3, 1), p(103, 1));
}

TEST(Noise, ChebyshevAndBdgReportsAreConsistent) {
  auto g = make_grid(2, 8);
  const auto m = eigenmode_noise(g, 2, 1.0, 1.0, 7);
  const auto b = bdg_check(m, 0.1, 20, 2000);
  EXPECT_LE(b.ci_low, b.estimate);
  EXPECT_LE(b.estimate, b.ci_high);
  EXPECT_EQ(b.samples, 2000u);
  const auto c = chebyshev_check(SyntheticLaw::two_point, 2, 4000, 8);
  EXPECT_TRUE(c.pass);
}

}  // namespace
}  // namespace mildns
