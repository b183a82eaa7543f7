#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>
#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "mildns/errors.hpp"
#include "mildns/norms.hpp"
#include "mildns/presets.hpp"
#include "mildns/semigroup.hpp"
#include "mildns/spectral.hpp"

namespace mildns {
namespace {

// Dense matrix of c(x) Laplacian on the grid, assembled column by column from
// the exact Fourier Laplacian of unit vectors.
Eigen::MatrixXd dense_generator(const Generator& gen) {
  const auto& c = gen.coefficient();
  const auto grid = c.grid_ptr();
  const auto n = static_cast<Eigen::Index>(grid->size());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    e[static_cast<std::size_t>(j)] = 1.0;
    const auto col = apply_laplacian(ScalarField(grid, e));
    for (Eigen::Index i = 0; i < n; ++i) a(i, j) = c[static_cast<std::size_t>(i)] * col[static_cast<std::size_t>(i)];
  }
  return a;
}

Eigen::VectorXd as_vector(const ScalarField& f) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i) v(static_cast<Eigen::Index>(i)) = f[i];
  return v;
}

TEST(Semigroup, CrankNicolsonMatchesDenseSolve) {
  auto g = make_grid(2, 8);
  const auto gen = std::make_shared<const Generator>(0.1, 1.0, DensityState(density_random(g, 1, 0.4)));
  const double dt = 0.01;
  const auto f = random_field(g, 2, 0, 3, 0.5, false);
  const auto a = dense_generator(*gen);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  const Eigen::VectorXd expected = (id - 0.5 * dt * a).lu().solve((id + 0.5 * dt * a) * as_vector(f));
  const auto got = apply_semigroup(PropagatorStep{gen, dt, Scheme::crank_nicolson}, f);
  EXPECT_LT((as_vector(got) - expected).lpNorm<Eigen::Infinity>(), 1e-9);
}

TEST(Semigroup, RepeatedStepsConvergeToMatrixExponential) {
  auto g = make_grid(2, 8);
  const auto gen = std::make_shared<const Generator>(0.05, 1.0, DensityState(density_wave(g, 0.3)));
  const auto f = random_field(g, 3, 0, 2, 1.0, false);
  const double t = 0.02;
  const Eigen::VectorXd exact = (t * dense_generator(*gen)).exp() * as_vector(f);
  std::vector<double> errs;
  for (int steps : {4, 8, 16}) {
    auto w = f;
    const PropagatorStep step{gen, t / steps, Scheme::crank_nicolson};
    for (int i = 0; i < steps; ++i) w = apply_semigroup(step, w);
    errs.push_back((as_vector(w) - exact).norm());
  }
  EXPECT_GT(std::log2(errs[0] / errs[1]), 1.8);
  EXPECT_GT(std::log2(errs[1] / errs[2]), 1.8);
}

TEST(Semigroup, ExactSchemeMatchesFourierMultiplier) {
  auto g = make_grid(2, 16);
  const auto gen = std::make_shared<const Generator>(0.02, 2.0, DensityState(ScalarField::zeros(g)));
  const auto step = make_step(gen, 0.05);
  ASSERT_EQ(step.scheme, Scheme::exact_constant);
  const auto f = random_field(g, 4, 0, 6, 0.0, false);
  const double c = 0.02 / 2.0;
  const auto expected = apply_radial_symbol(f, [&](double lambda) { return std::exp(-c * lambda * 0.05); });
  EXPECT_LT(max_abs_diff(apply_semigroup(step, f), expected), 1e-14);
}

TEST(Semigroup, ExactSchemeRejectsVariableCoefficient) {
  auto g = make_grid(2, 8);
  const auto gen = std::make_shared<const Generator>(0.02, 1.0, DensityState(density_wave(g, 0.2)));
  EXPECT_ANY_THROW((void)apply_semigroup(PropagatorStep{gen, 0.01, Scheme::exact_constant}, ScalarField::zeros(g)));
}

TEST(Semigroup, GeneratorValidatesInputs) {
  auto g = make_grid(2, 8);
  const DensityState zero(ScalarField::zeros(g));
  EXPECT_THROW(Generator(0.0, 1.0, zero), ConfigError);
  EXPECT_THROW(Generator(1.0, -1.0, zero), ConfigError);
  EXPECT_THROW(Generator(1.0, 1.0, DensityState(ScalarField::constant(g, -1.0))), DensityBandError);
  const Generator gen(0.3, 1.5, DensityState(ScalarField::constant(g, 0.5)));
  EXPECT_DOUBLE_EQ(gen.c_min(), 0.3 / (1.5 * 1.5));
  EXPECT_TRUE(gen.constant());
}

TEST(Semigroup, CrankNicolsonConservesWeightedMean) {
  auto g = make_grid(2, 16);
  const auto gen = std::make_shared<const Generator>(0.1, 1.0, DensityState(density_random(g, 5, 0.45)));
  const auto f = random_field(g, 6, 0, 5, 0.5, false);
  const auto w = apply_semigroup(PropagatorStep{gen, 0.05, Scheme::crank_nicolson}, f);
  const auto& inv = gen->inverse_coefficient();
  EXPECT_NEAR(product(w, inv).mean(), product(f, inv).mean(), 1e-10 * std::abs(product(f, inv).mean()) + 1e-12);
  EXPECT_LE(weighted_l2_norm(w, inv), weighted_l2_norm(f, inv) * (1.0 + 1e-12));
}

TEST(Semigroup, DecayProbeExpectedSlope) {
  auto g = make_grid(3, 8);
  const Generator gen(0.05, 1.0, DensityState(ScalarField::zeros(g)));
  const auto r = decay_probe(gen, rough_field(g, 2.0), {1e-3, 1e-2}, 2.0, 4.0);
  EXPECT_DOUBLE_EQ(r.lq_expected_slope, -1.5 * (0.5 - 0.25));
}

}  // namespace
}  // namespace mildns
