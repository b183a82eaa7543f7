#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <variant>

#include <gtest/gtest.h>
#include <unistd.h>

#include "mildns/errors.hpp"
#include "mildns/norms.hpp"
#include "mildns/presets.hpp"
#include "mildns/snapshot.hpp"
#include "mildns/spectral.hpp"

namespace mildns {
namespace {

constexpr double kPi = std::numbers::pi;

// O(N^2) DFT with the unnormalized forward sign convention exp(-i 2 pi k.x).
Spectrum naive_dft(const ScalarField& f) {
  const auto& g = f.grid();
  Spectrum out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto k = g.wave_index(i);
    std::complex<double> acc = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      double phase = 0.0;
      for (int a = 0; a < g.dim(); ++a) phase += 2.0 * kPi * k[a] * g.coordinate(j, a);
      acc += f[j] * std::polar(1.0, -phase);
    }
    out[i] = acc;
  }
  return out;
}

TEST(SpectralCore, ForwardTransformMatchesNaiveDft) {
  for (auto res : {std::vector<int>{8}, std::vector<int>{8, 10}, std::vector<int>{8, 12, 8}}) {
    auto g = make_grid(res);
    const auto f = random_field(g, 1, 0, 3, 0.0, false);
    const auto fast = forward_transform(f);
    const auto slow = naive_dft(f);
    for (std::size_t i = 0; i < g->size(); ++i) EXPECT_LT(std::abs(fast[i] - slow[i]), 1e-12) << g->describe() << " slot " << i;
  }
}

TEST(SpectralCore, InverseDividesByGridSize) {
  auto g = make_grid(2, 8);
  Spectrum c(g->size(), 0.0);
  c[0] = static_cast<double>(g->size());
  const auto one = inverse_transform(g, c);
  for (std::size_t i = 0; i < g->size(); ++i) EXPECT_DOUBLE_EQ(one[i], 1.0);
}

TEST(SpectralCore, LaplacianAgreesWithCentralDifferences) {
  // Fourth-order central differences on a fine grid; the smooth field is
  // resolved spectrally, so the gap is the finite-difference truncation.
  auto g = make_grid(2, 128);
  const auto f = ScalarField::from_function(g, [](std::span<const double> x) {
    return std::exp(std::sin(2 * kPi * x[0])) * std::cos(2 * kPi * x[1]);
  });
  const auto lap = apply_laplacian(f);
  const int m = 128;
  const double h = 1.0 / m;
  auto at = [&](int i, int j) { return f[static_cast<std::size_t>(((i + m) % m) * m + (j + m) % m)]; };
  double worst = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double fd = (-at(i + 2, j) + 16 * at(i + 1, j) - 30 * at(i, j) + 16 * at(i - 1, j) - at(i - 2, j) -
                         at(i, j + 2) + 16 * at(i, j + 1) - 30 * at(i, j) + 16 * at(i, j - 1) - at(i, j - 2)) /
                        (12 * h * h);
      worst = std::max(worst, std::abs(fd - lap[static_cast<std::size_t>(i * m + j)]));
    }
  }
  EXPECT_LT(worst, 1e-3);
}

TEST(SpectralCore, InverseLaplacianSolvesPoisson) {
  auto g = make_grid(3, 16);
  const auto f = random_field(g, 2, 0, 5, 1.0);
  const auto w = inverse_laplacian(f);
  EXPECT_LT(max_abs_diff(apply_laplacian(w), f), 1e-11);
  EXPECT_NEAR(w.mean(), 0.0, 1e-14);
  EXPECT_THROW((void)inverse_laplacian(ScalarField::constant(g, 1.0)), DomainError);
}

TEST(SpectralCore, InverseSqrtLaplacianHasPositiveSymbol) {
  auto g = make_grid(2, 16);
  const auto f = random_field(g, 3, 0, 5, 1.0);
  const auto twice = inverse_sqrt_laplacian(inverse_sqrt_laplacian(f));
  EXPECT_LT(max_abs_diff(twice, -inverse_laplacian(f)), 1e-14);
}

TEST(SpectralCore, OddDerivativeDropsNyquist) {
  auto g = make_grid(1, 8);
  // cos(pi M x) sampled on the grid alternates sign; its derivative would be
  // aliased, so the spectral derivative returns zero.
  const auto nyq = ScalarField::from_function(g, [](std::span<const double> x) { return std::cos(8 * kPi * x[0]); });
  EXPECT_LT(sup_norm(partial_derivative(nyq, 0)), 1e-13);
}

TEST(SpectralCore, LerayMatchesPerModeProjector) {
  // P u_k = u_k - k (k . u_k) / |k|^2 off the zero and Nyquist modes.
  auto g = make_grid(2, 16);
  const auto u = random_vector(g, 4, 0, 6, 1.0);
  const auto pu = leray_project(u);
  const auto c0 = forward_transform(u[0]), c1 = forward_transform(u[1]);
  const auto q0 = forward_transform(pu[0]), q1 = forward_transform(pu[1]);
  for (std::size_t i = 1; i < g->size(); ++i) {
    if (g->nyquist_mask()[i]) continue;
    const auto k = g->wave_index(i);
    const double k0 = k[0], k1 = k[1];
    const auto dot = k0 * c0[i] + k1 * c1[i];
    const double kk = k0 * k0 + k1 * k1;
    EXPECT_LT(std::abs(q0[i] - (c0[i] - k0 * dot / kk)) + std::abs(q1[i] - (c1[i] - k1 * dot / kk)), 1e-11) << "slot " << i;
  }
  EXPECT_LT(std::abs(q0[0] - c0[0]) + std::abs(q1[0] - c1[0]), 1e-12);
}

TEST(SpectralCore, DealiasKeepsTwoThirds) {
  auto g = make_grid(2, 12);
  int kept = 0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const auto k = g->wave_index(i);
    const bool keep = 3 * std::abs(k[0]) < 12 && 3 * std::abs(k[1]) < 12;
    EXPECT_EQ(static_cast<bool>(g->dealias_mask()[i]), keep);
    kept += keep;
  }
  EXPECT_EQ(kept, 7 * 7);
}

TEST(Norms, SineLpNormsMatchGammaFormula) {
  // mean |sin|^p = Gamma((p+1)/2) / (sqrt(pi) Gamma(p/2 + 1)).
  auto g = make_grid(1, 512);
  const auto s = ScalarField::from_function(g, [](std::span<const double> x) { return std::sin(2 * kPi * x[0]); });
  for (double p : {2.0, 3.0, 4.0, 6.0}) {
    const double exact = std::pow(std::tgamma((p + 1) / 2) / (std::sqrt(kPi) * std::tgamma(p / 2 + 1)), 1.0 / p);
    EXPECT_NEAR(lp_norm(s, p), exact, 1e-10) << "p=" << p;
  }
  EXPECT_NEAR(sup_norm(s), 1.0, 1e-4);
}

TEST(Norms, W2pOfSingleMode) {
  // |e|_p (1 + 2 pi |k| + 4 pi^2 |k|^2) for e = sin(2 pi k.x) in one dimension.
  auto g = make_grid(1, 256);
  const auto s = ScalarField::from_function(g, [](std::span<const double> x) { return std::sin(6 * kPi * x[0]); });
  const double p = 4.0;
  const double base = lp_norm(s, p);
  EXPECT_NEAR(w2p_norm(s, p), base * (1 + 6 * kPi + 36 * kPi * kPi), 1e-9);
  EXPECT_NEAR(gradient_power_norm(s, 2), 36 * kPi * kPi * std::sqrt(0.5), 1e-9);
}

TEST(Snapshot, RoundTripAndMalformedHeader) {
  const auto dir = std::filesystem::temp_directory_path() / ("mildns-unit-snap-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  auto g = make_grid({8, 10});
  const auto u = random_vector(g, 5, 0, 2, 0.0);
  write_snapshot(dir / "u.bin", u);
  const auto back = std::get<VectorField>(read_snapshot(dir / "u.bin"));
  EXPECT_EQ(max_abs_diff(back, u), 0.0);
  EXPECT_THROW((void)read_snapshot(dir / "u.bin", make_grid(2, 8)), ConfigError);
  {
    std::ofstream bad(dir / "bad.bin");
    bad << "not a snapshot\n";
  }
  EXPECT_THROW((void)read_snapshot(dir / "bad.bin"), InputError);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace mildns
