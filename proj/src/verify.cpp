#include "mildns/verify.hpp"

#include <algorithm>
#include <chrono>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <sstream>
#include <unistd.h>

#include "check_util.hpp"
#include "mildns/config.hpp"
#include "mildns/energy.hpp"
#include "mildns/errors.hpp"
#include "mildns/fixed_point.hpp"
#include "mildns/harness.hpp"
#include "mildns/norms.hpp"
#include "mildns/presets.hpp"
#include "mildns/rng.hpp"
#include "mildns/snapshot.hpp"
#include "mildns/spectral.hpp"
#include "mildns/stats.hpp"

namespace mildns {
namespace fs = std::filesystem;
using detail::kTwoPi;
using detail::sci;
using detail::Tally;
using detail::base_config;
using detail::constant_velocity;
using detail::steady_history;
using detail::mode_field;
using detail::rel;
using detail::rel_l2;
using detail::scratch_dir;

namespace {

NoiseModel single_mode(const ScalarField& s, int dim) {
  NoiseModel m;
  std::vector<ScalarField> comps{s};
  for (int a = 1; a < dim; ++a) comps.push_back(ScalarField::zeros(s.grid_ptr()));
  m.phi.push_back(VectorField(std::move(comps)));
  m.seed = 11;
  m.stream_id = substream_id("verify/single");
  return m;
}

std::shared_ptr<const Generator> constant_generator(const GridPtr& g, double mu) {
  return std::make_shared<const Generator>(mu, 1.0, DensityState(ScalarField::zeros(g)));
}

// ---------------------------------------------------------------- spectral

Outcome check_forward_transform() {
  Tally t;
  auto g = make_grid(2, 16);
  const double n = static_cast<double>(g->size());
  const auto c1 = forward_transform(ScalarField::constant(g, 1.0));
  double off = 0.0;
  for (std::size_t i = 1; i < c1.size(); ++i) off = std::max(off, std::abs(c1[i]));
  t.at_most("constant: |c0/N - 1|", std::abs(c1[0] / n - 1.0), 1e-14);
  t.at_most("constant: other modes", off / n, 1e-14);

  const auto cs = forward_transform(mode_field(g, {1, 0}, true));
  int nonzero = 0;
  bool placed = true;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (std::abs(cs[i]) / n > 1e-12) {
      ++nonzero;
      const auto k = g->wave_index(i);
      placed = placed && std::abs(k[0]) == 1 && k[1] == 0;
    }
  }
  t.require("sin(2 pi x): " + std::to_string(nonzero) + " nonzero modes at k = +-(1,0)", nonzero == 2 && placed);

  auto g32 = make_grid(2, 32);
  double roundtrip = 0.0, parseval = 0.0, symmetry = 0.0;
  for (std::uint32_t s = 0; s < 100; ++s) {
    const auto f = random_field(g32, 5, s, 12, 0.5, false);
    const auto c = forward_transform(f);
    if (s < 5) roundtrip = std::max(roundtrip, max_abs_diff(inverse_transform(g32, c), f) / sup_norm(f));
    double energy = 0.0;
    for (const auto& x : c) energy += std::norm(x);
    const double m = static_cast<double>(g32->size());
    parseval = std::max(parseval, rel(energy / (m * m), l2_norm(f) * l2_norm(f)));
    for (std::size_t i = 0; i < c.size(); ++i) {
      const auto k = g32->wave_index(i);
      const std::size_t j = g32->flatten(std::vector<int>{-k[0], -k[1]});
      symmetry = std::max(symmetry, std::abs(c[i] - std::conj(c[j])) / std::sqrt(m));
    }
  }
  t.at_most("round trip (5 random fields)", roundtrip, 1e-12);
  t.at_most("Parseval (100 random fields)", parseval, 1e-10);
  t.at_most("conjugate symmetry", symmetry, 1e-12);

  bool mismatch = false;
  try {
    (void)(ScalarField::zeros(g) + ScalarField::zeros(g32));
  } catch (const ConfigError&) {
    mismatch = true;
  }
  t.require("resolution mismatch raises a configuration error", mismatch);
  return t.finish();
}

Outcome check_laplacian_eigenvalue() {
  Tally t;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  t.at_most("lambda(0,0)", laplacian_eigenvalue({0, 0}), 0.0);
  t.at_most("|lambda(1,0) - 39.478418|", std::abs(laplacian_eigenvalue({1, 0}) - 39.478418), 1e-6);
  t.at_most("lambda(1,2,2) vs 36 pi^2", rel(laplacian_eigenvalue({1, 2, 2}), 36.0 * pi2), 1e-14);
  auto g = make_grid(3, 8);
  const auto e = mode_field(g, {1, 2, 2}, false);
  const auto le = apply_laplacian(e);
  t.at_most("spectral Laplacian on e_(1,2,2)", max_abs_diff(le, -laplacian_eigenvalue({1, 2, 2}) * e) / (36.0 * pi2),
            1e-12);
  return t.finish();
}

Outcome check_apply_laplacian() {
  Tally t;
  auto g = make_grid(2, 16);
  t.at_most("constant -> 0", sup_norm(apply_laplacian(ScalarField::constant(g, 3.0))), 1e-12);
  const double lam10 = 4.0 * std::numbers::pi * std::numbers::pi;
  t.at_most("e_(1,0) -> -4 pi^2 e_(1,0)",
            max_abs_diff(apply_laplacian(mode_field(g, {1, 0}, false)), -lam10 * mode_field(g, {1, 0}, false)) / lam10,
            1e-12);
  double worst = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const auto k = g->wave_index(i);
    const double lam = laplacian_eigenvalue(k);
    for (bool sine : {false, true}) {
      const auto e = mode_field(g, k, sine);
      if (sup_norm(e) < 0.5) continue;  // sine on the Nyquist line vanishes on the grid
      worst = std::max(worst, max_abs_diff(apply_laplacian(e), -lam * e) / std::max(1.0, lam));
    }
  }
  t.at_most("every lattice mode on M=16", worst, 1e-10);

  std::vector<double> hs, errs;
  for (int m : {32, 64, 128}) {
    auto gm = make_grid(2, m);
    const auto f = random_field(gm, 3, 0, 3, 2.0);
    const auto exact = apply_laplacian(f);
    const double h = 1.0 / m;
    double err = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        auto at = [&](int a, int b) { return f[gm->flatten(std::vector<int>{a, b})]; };
        const double fd = (at(i + 1, j) + at(i - 1, j) + at(i, j + 1) + at(i, j - 1) - 4.0 * at(i, j)) / (h * h);
        err = std::max(err, std::abs(fd - exact[gm->flatten(std::vector<int>{i, j})]));
      }
    hs.push_back(h);
    errs.push_back(err);
  }
  t.at_least("finite-difference agreement order", detail::observed_order(hs, errs), 1.8);
  return t.finish();
}

Outcome check_inverse_laplacian() {
  Tally t;
  auto g = make_grid(2, 32);
  t.at_most("zero -> zero", sup_norm(inverse_laplacian(ScalarField::zeros(g))), 0.0);
  const auto s = mode_field(g, {1, 0}, true);
  const double lam = 4.0 * std::numbers::pi * std::numbers::pi;
  t.at_most("sin(2 pi x) -> -sin(2 pi x)/(4 pi^2)", max_abs_diff(inverse_laplacian(s), (-1.0 / lam) * s), 1e-15);
  const auto f = random_field(g, 4, 0, 15, 0.0);
  t.at_most("Delta(Delta^-1 f) = f", rel_l2(apply_laplacian(inverse_laplacian(f)), f), 1e-10);
  t.require("result flagged mean-zero", inverse_laplacian(f).mean_zero());
  std::string message;
  try {
    (void)inverse_laplacian(f + ScalarField::constant(g, 0.1));
  } catch (const DomainError& e) {
    message = e.what();
  }
  t.require("field with mean raises 'inverse Laplacian requires zero mean'",
            message.find("inverse Laplacian requires zero mean") != std::string::npos);
  return t.finish();
}

Outcome check_inverse_sqrt_laplacian() {
  Tally t;
  auto g = make_grid(2, 32);
  const auto s = mode_field(g, {1, 0}, true);
  t.at_most("sin(2 pi x) -> sin(2 pi x)/(2 pi)", max_abs_diff(inverse_sqrt_laplacian(s), (1.0 / kTwoPi) * s), 1e-15);
  t.at_most("zero -> zero", sup_norm(inverse_sqrt_laplacian(ScalarField::zeros(g))), 0.0);
  const auto f = random_field(g, 6, 0, 15, 0.0);
  // The positive symbol lambda^{-1/2} composes to (-Delta)^{-1}.
  t.at_most("twice equals -inverse_laplacian",
            rel_l2(inverse_sqrt_laplacian(inverse_sqrt_laplacian(f)), -inverse_laplacian(f)), 1e-10);
  bool thrown = false;
  try {
    (void)inverse_sqrt_laplacian(ScalarField::constant(g, 1.0));
  } catch (const DomainError&) {
    thrown = true;
  }
  t.require("field with mean raises a domain error", thrown);
  return t.finish();
}

Outcome check_gradient_divergence() {
  Tally t;
  auto g = make_grid(2, 32);
  t.at_most("gradient(constant)", sup_norm(gradient(ScalarField::constant(g, 2.0))), 1e-13);
  const auto f = random_field(g, 7, 0, 15, 0.0);
  t.at_most("div grad f = Delta f", rel_l2(divergence(gradient(f)), apply_laplacian(f)), 1e-10);
  const auto c = mode_field(g, {1, 0}, false);
  t.at_most("d/dx sin(2 pi x) = 2 pi cos(2 pi x)", max_abs_diff(gradient(mode_field(g, {1, 0}, true))[0], kTwoPi * c) / kTwoPi,
            1e-14);
  return t.finish();
}

Outcome check_leray_project() {
  Tally t;
  auto g = make_grid(2, 32);
  const auto phi = random_field(g, 8, 0, 15, 0.0);
  const auto grad = gradient(phi);
  t.at_most("P grad(phi) / |grad phi|", l2_norm(leray_project(grad)) / l2_norm(grad), 1e-12);
  const auto w = random_divfree(g, 8, 1, 15, 0.0);
  t.at_most("divergence-free field unchanged", rel_l2(leray_project(w), w), 1e-12);
  const auto u = random_vector(g, 8, 2, 15, 0.0);
  const auto pu = leray_project(u);
  t.at_most("Helmholtz: Pu + grad Delta^-1 div u = u", rel_l2(pu + gradient(inverse_laplacian(divergence(u))), u), 1e-10);
  t.at_most("|div Pu| / |u|", l2_norm(divergence(pu)) / l2_norm(u), 1e-12);
  t.at_most("idempotence", rel_l2(leray_project(pu), pu), 1e-12);
  return t.finish();
}

Outcome check_snapshot() {
  Tally t;
  const auto dir = scratch_dir("snapshot");
  auto g = make_grid({8, 12});
  const auto f = random_field(g, 9, 0, 3, 1.0);
  const auto u = random_vector(g, 9, 1, 3, 1.0);
  write_snapshot(dir / "f.bin", f);
  write_snapshot(dir / "u.bin", u);
  const auto rf = std::get<ScalarField>(read_snapshot(dir / "f.bin"));
  const auto ru = std::get<VectorField>(read_snapshot(dir / "u.bin", g));
  t.require("scalar round trip bit-exact", rf.grid().same_shape(*g) && max_abs_diff(rf, ScalarField(rf.grid_ptr(), {f.values().begin(), f.values().end()})) == 0.0);
  t.require("vector round trip bit-exact", max_abs_diff(ru, u) == 0.0);
  const auto text = read_file(dir / "u.bin");
  t.require("header 'mildns-field v1; 2; 8,12; vector'", text.rfind("mildns-field v1; 2; 8,12; vector\n", 0) == 0);
  bool mismatch = false;
  try {
    (void)read_snapshot(dir / "u.bin", make_grid(2, 8));
  } catch (const ConfigError&) {
    mismatch = true;
  }
  t.require("shape mismatch raises a configuration error", mismatch);
  fs::remove_all(dir);
  return t.finish();
}

// ---------------------------------------------------------------- transport

Outcome check_backtrack_foot() {
  Tally t;
  auto g = make_grid(2, 64);
  const auto zero = steady_history(VectorField::zeros(g), 0.05, 10);
  const std::array<double, 2> x{0.3, 0.7};
  const auto f0 = backtrack_foot(x, zero, 0.5);
  t.at_most("u = 0: |foot - x|", std::hypot(f0[0] - x[0], f0[1] - x[1]), 0.0);

  const auto shift = steady_history(constant_velocity(g, {0.4, 0.0}), 0.05, 10);
  const auto f1 = backtrack_foot(std::array<double, 2>{0.1, 0.7}, shift, 0.35);
  t.at_most("u = (0.4, 0): foot = x - (0.14, 0) mod 1", std::hypot(f1[0] - 0.96, f1[1] - 0.7), 1e-14);

  // Steady cellular swirl against an RK4 reference of the backward characteristic.
  const auto swirl = taylor_green(g, 1.0);
  auto vel = [](double a, double b) {
    return std::array<double, 2>{std::sin(kTwoPi * a) * std::cos(kTwoPi * b), -std::cos(kTwoPi * a) * std::sin(kTwoPi * b)};
  };
  const double horizon = 0.2;
  std::array<double, 2> ref{0.31, 0.17};
  const int fine = 4000;
  const double hs = horizon / fine;
  for (int i = 0; i < fine; ++i) {
    auto k1 = vel(ref[0], ref[1]);
    auto k2 = vel(ref[0] - 0.5 * hs * k1[0], ref[1] - 0.5 * hs * k1[1]);
    auto k3 = vel(ref[0] - 0.5 * hs * k2[0], ref[1] - 0.5 * hs * k2[1]);
    auto k4 = vel(ref[0] - hs * k3[0], ref[1] - hs * k3[1]);
    for (int a = 0; a < 2; ++a)
      ref[static_cast<std::size_t>(a)] -= hs / 6.0 * (k1[static_cast<std::size_t>(a)] + 2 * k2[static_cast<std::size_t>(a)] +
                                                       2 * k3[static_cast<std::size_t>(a)] + k4[static_cast<std::size_t>(a)]);
  }
  std::vector<double> dts, errs;
  for (double dt : {0.04, 0.02, 0.01}) {
    const auto h = steady_history(swirl, dt, static_cast<int>(std::llround(horizon / dt)));
    const auto foot = backtrack_foot(std::array<double, 2>{0.31, 0.17}, h, horizon);
    dts.push_back(dt);
    errs.push_back(std::hypot(foot[0] - ref[0], foot[1] - ref[1]));
  }
  t.info("swirl error at dt=0.01", errs.back());
  t.at_least("swirl: order against RK4", detail::observed_order(dts, errs), 1.7);

  bool gap = false;
  try {
    (void)backtrack_foot(x, zero, 0.6);
  } catch (const InputError&) {
    gap = true;
  }
  t.require("history shorter than t raises an input error", gap);
  return t.finish();
}

Outcome check_advect_density() {
  Tally t;
  auto g = make_grid(2, 32);
  const auto a0 = density_random(g, 3, 0.4);
  const auto frozen = advect_density(a0, steady_history(VectorField::zeros(g), 0.1, 5), 0.5);
  t.at_most("u = 0: max |a - a0|", max_abs_diff(frozen.a, a0), 0.0);

  std::vector<double> hs, errs;
  for (int m : {32, 64, 128}) {
    auto gm = make_grid(2, m);
    auto fn = [](double x, double y) { return 0.3 * std::sin(kTwoPi * x) * std::cos(kTwoPi * y) + 0.1 * std::cos(kTwoPi * (2 * x + y)); };
    const auto init = ScalarField::from_function(gm, [&](std::span<const double> x) { return fn(x[0], x[1]); });
    const auto exact = ScalarField::from_function(gm, [&](std::span<const double> x) { return fn(x[0] - 0.075, x[1] + 0.0425); });
    const auto moved = advect_density(init, steady_history(constant_velocity(gm, {0.3, -0.17}), 0.05, 5), 0.25);
    hs.push_back(1.0 / m);
    errs.push_back(max_abs_diff(moved.a, exact));
  }
  t.info("translation error at M=128", errs.back());
  t.at_least("translation: interpolation order", detail::observed_order(hs, errs), 2.5);
  t.require("bounds track the field", frozen.lower == 1.0 + a0.min() && frozen.upper == 1.0 + a0.max());
  return t.finish();
}

Outcome check_sobolev_growth() {
  Tally t;
  auto g = make_grid(2, 64);
  const double p = 4.0;
  const double c6 = calibrate_embedding_constant(g, p);
  const auto a0 = density_wave(g, 0.3);

  const auto still = steady_history(VectorField::zeros(g), 0.01, 10);
  const auto r0 = sobolev_growth_diagnostic(advect_density(a0, still, 0.1), a0, still, 0.1, p, c6);
  t.at_most("u = 0: |measured - initial| / initial", rel(r0.measured, r0.initial), 1e-14);
  t.at_most("u = 0: |bound factor - 1|", std::abs(r0.bound_factor - 1.0), 0.0);

  const auto shift = steady_history(constant_velocity(g, {0.23, 0.11}), 0.01, 10);
  const auto r1 = sobolev_growth_diagnostic(advect_density(a0, shift, 0.1), a0, shift, 0.1, p, c6);
  t.at_most("translation: |measured - initial| / initial", rel(r1.measured, r1.initial), 1e-3);

  const auto shear = ScalarField::from_function(g, [](std::span<const double> x) { return 0.5 * std::sin(kTwoPi * x[1]); });
  const auto shear_flow = steady_history(VectorField({shear, ScalarField::zeros(g)}, true), 0.005, 10);
  const auto r2 = sobolev_growth_diagnostic(advect_density(a0, shear_flow, 0.05), a0, shear_flow, 0.05, p, c6);
  t.info("C6", c6);
  t.info("shear: bound factor", r2.bound_factor);
  t.at_most("shear, t=0.05: measured |a|_{2,p}", r2.measured, r2.bound);
  t.require("shear: not flagged", !r2.violated);
  return t.finish();
}

// ---------------------------------------------------------------- semigroup

Outcome check_apply_semigroup() {
  Tally t;
  auto g = make_grid(2, 32);
  const double mu = 0.05, dt = 0.01;
  const auto gen = constant_generator(g, mu);
  const auto exact = make_step(gen, dt);
  t.require("constant density selects the exact scheme", exact.scheme == Scheme::exact_constant);
  const auto e = mode_field(g, {1, 0}, false);
  const double lam = 4.0 * std::numbers::pi * std::numbers::pi;
  t.at_most("e_(1,0) -> exp(-4 pi^2 c dt) e_(1,0)", max_abs_diff(apply_semigroup(exact, e), std::exp(-lam * mu * dt) * e), 1e-15);

  const auto f = random_field(g, 12, 0, 6, 1.0, false);
  const auto df = apply_laplacian(f);
  for (double h : {1e-2, 1e-3, 1e-4}) {
    const auto s = apply_semigroup(PropagatorStep{gen, h, Scheme::exact_constant}, f);
    t.at_most("strong continuity dt=" + sci(h), l2_norm(s - f), mu * h * l2_norm(df) * (1.0 + 1e-12));
  }
  const auto s1 = apply_semigroup(PropagatorStep{gen, 0.03, Scheme::exact_constant},
                                  apply_semigroup(PropagatorStep{gen, 0.02, Scheme::exact_constant}, f));
  t.at_most("S(0.03) S(0.02) = S(0.05)", rel_l2(s1, apply_semigroup(PropagatorStep{gen, 0.05, Scheme::exact_constant}, f)), 1e-12);
  t.at_most("exact: mean preserved", std::abs(apply_semigroup(exact, f).mean() - f.mean()), 1e-15);

  const auto vgen = std::make_shared<const Generator>(mu, 1.0, DensityState(density_random(g, 4, 0.5)));
  const auto smooth = random_field(g, 13, 0, 4, 2.0, false);
  std::vector<double> dts, errs;
  for (double h : {0.02, 0.01}) {
    const auto coarse = apply_semigroup(PropagatorStep{vgen, h, Scheme::crank_nicolson}, smooth);
    auto fine = smooth;
    for (int i = 0; i < 4; ++i) fine = apply_semigroup(PropagatorStep{vgen, h / 4, Scheme::crank_nicolson}, fine);
    dts.push_back(h);
    errs.push_back(l2_norm(coarse - fine));
  }
  t.at_least("Crank-Nicolson vs 4x refined: order", detail::observed_order(dts, errs), 1.8);
  SolveStats stats;
  const auto w = apply_semigroup(PropagatorStep{vgen, 0.05, Scheme::crank_nicolson}, smooth, &stats);
  t.at_most("PCG residual", stats.residual, kSolveTolerance);
  t.info("PCG iterations", stats.iterations);
  const auto& inv = vgen->inverse_coefficient();
  t.at_most("CN: weighted norm non-increasing", weighted_l2_norm(w, inv), weighted_l2_norm(smooth, inv));
  t.at_most("CN: weighted mean preserved", std::abs(inner(w, inv) - inner(smooth, inv)) / std::abs(inner(smooth, inv)), 1e-10);
  return t.finish();
}

Outcome check_dissipativity() {
  Tally t;
  auto g = make_grid(2, 32);
  const auto gen = constant_generator(g, 0.05);
  const auto r0 = dissipativity_check(*gen, 2.0, {ScalarField::constant(g, 1.0)});
  t.at_most("constant probe: |ratio - 1|", std::abs(r0.min_ratio - 1.0), 1e-15);
  const auto e = mode_field(g, {2, 1}, false);
  const double lam_k = laplacian_eigenvalue({2, 1});
  const auto r1 = dissipativity_check(*gen, 3.0, {e});
  t.at_most("e_(2,1): ratio vs (lambda + c lambda_k)/lambda", rel(r1.min_ratio, (3.0 + 0.05 * lam_k) / 3.0), 1e-12);

  const auto vgen = Generator(0.05, 1.0, DensityState(density_random(g, 6, 0.5)));
  std::vector<ScalarField> probes;
  for (std::uint32_t i = 0; i < 50; ++i) probes.push_back(random_field(g, 21, i, 10, 0.5, false));
  const auto r2 = dissipativity_check(vgen, 0.7, probes);
  t.at_least("50 random probes, variable a", r2.min_ratio, 1.0 - 1e-9);
  t.info("unweighted min ratio", r2.min_unweighted_ratio);
  return t.finish();
}

std::vector<double> decay_times() {
  std::vector<double> ts;
  for (int i = 0; i <= 10; ++i) ts.push_back(1e-3 * std::pow(100.0, i / 10.0));
  return ts;
}

Outcome check_decay_probe() {
  Tally t;
  auto g = make_grid(2, 64);
  const auto gen = Generator(0.05, 1.0, DensityState(ScalarField::zeros(g)));
  const auto smooth = decay_probe(gen, mode_field(g, {1, 0}, false), decay_times(), 3.0, 6.0);
  t.within("smooth data: generator slope", smooth.generator_slope, -0.05, 0.0);
  const auto rough = decay_probe(gen, rough_field(g, 2.0), decay_times(), 3.0, 6.0);
  t.within("rough data, M=64: generator slope", rough.generator_slope, -1.1, -0.9);
  t.at_most("expected Lq slope -(N/2)(1/p - 1/q)", std::abs(rough.lq_expected_slope + 1.0 / 6.0), 1e-15);
  return t.finish();
}

Outcome check_commutation() {
  Tally t;
  auto g = make_grid(2, 32);
  const auto gen = constant_generator(g, 0.05);
  const auto f = random_field(g, 14, 0, 10, 1.0);
  const auto r0 = gradient_commutation_check(make_step(gen, 0.02), f);
  t.at_most("constant coefficient: relative commutator", r0.relative, 1e-10);
  t.require("constant coefficient: pass", r0.pass && r0.exact_scheme);

  const auto e = mode_field(g, {1, 2}, true);
  const auto step = make_step(gen, 0.02);
  const double decay = std::exp(-0.05 * laplacian_eigenvalue({1, 2}) * 0.02);
  const auto lhs = gradient(apply_semigroup(step, e));
  const auto expected = decay * gradient(e);
  t.at_most("e_k: grad S e = i 2 pi k exp(-c lambda t) e", max_abs_diff(lhs, expected), 1e-13);
  t.at_most("e_k: S grad e matches too", max_abs_diff(apply_semigroup(step, gradient(e)), expected), 1e-13);

  const auto vgen = std::make_shared<const Generator>(0.05, 1.0, DensityState(density_wave(g, 0.3)));
  const auto smooth = random_field(g, 14, 1, 3, 1.0);
  std::vector<double> dts, norms;
  for (double h : {4e-3, 2e-3, 1e-3}) {
    const auto r = gradient_commutation_check(PropagatorStep{vgen, h, Scheme::crank_nicolson}, smooth);
    dts.push_back(h);
    norms.push_back(r.commutator_norm);
  }
  t.at_least("variable coefficient: commutator order in dt", detail::observed_order(dts, norms), 0.8);
  return t.finish();
}

// ---------------------------------------------------------------- noise

Outcome check_C_Phi() {
  Tally t;
  auto g = make_grid(2, 32);
  NoiseModel none;
  t.at_most("Phi = 0", compute_C_Phi(none), 0.0);
  const auto one = single_mode(mode_field(g, {1, 0}, true), 2);
  const auto terms = compute_C_Phi_terms(one);
  const double pi = std::numbers::pi;
  t.at_most("sup term = 1", rel(terms.sup, 1.0), 1e-12);
  t.at_most("gradient term = 4 pi^2", rel(terms.gradient, 4 * pi * pi), 1e-12);
  t.at_most("Laplacian term = 16 pi^4", rel(terms.laplacian, 16 * std::pow(pi, 4)), 1e-12);
  t.at_most("C_Phi = 64 pi^6", rel(compute_C_Phi(one), 64 * std::pow(pi, 6)), 1e-12);
  auto two = one;
  two.phi.push_back(one.phi.front());
  const auto t2 = compute_C_Phi_terms(two);
  t.at_most("two equal modes double every sum",
            std::max({rel(t2.sup, 2 * terms.sup), rel(t2.gradient, 2 * terms.gradient), rel(t2.laplacian, 2 * terms.laplacian),
                      rel(t2.grad_laplacian, 2 * terms.grad_laplacian)}),
            1e-14);
  return t.finish();
}

Outcome check_sample_increments() {
  Tally t;
  auto g = make_grid(2, 16);
  auto model = eigenmode_noise(g, 4, 1.0, 1.0, 77);
  const double dt = 0.01;
  const auto a = sample_increments(model, 25000, dt, 3);
  const auto b = sample_increments(model, 25000, dt, 3);
  t.require("fixed seed: bit-identical path", a.increments == b.increments);
  const double n = static_cast<double>(a.increments.size());
  const double m = mean(a.increments);
  const double v = variance(a.increments);
  t.at_most("mean / (4 sigma)", std::abs(m) / (4.0 * std::sqrt(dt / n)), 1.0);
  t.at_most("|var - dt| / (4 sigma_var)", std::abs(v - dt) / (4.0 * dt * std::sqrt(2.0 / (n - 1))), 1.0);

  const auto c = sample_increments(model, 10000, dt, 4);
  std::vector<double> x, y;
  for (int j = 0; j < 10000; ++j) {
    x.push_back(a(j, 0));
    y.push_back(c(j, 0));
  }
  const double cov = mean(std::vector<double>([&] {
    std::vector<double> p;
    for (std::size_t i = 0; i < x.size(); ++i) p.push_back(x[i] * y[i]);
    return p;
  }()));
  const double r = cov / std::sqrt(variance(x) * variance(y));
  t.at_most("two sample indices: |correlation|", std::abs(r), 0.05);
  const auto tail = sample_increments(model, 10, dt, 3, 24990);
  t.require("windowed draws continue the global path", tail(0, 1) == a(24990, 1) && tail(9, 3) == a(24999, 3));
  return t.finish();
}

Outcome check_stochastic_convolution() {
  Tally t;
  auto g = make_grid(2, 16);
  const double mu = 0.05;
  const auto gen = constant_generator(g, mu);
  NoiseModel none;
  const WienerPath empty{0.1, 5, 0, {}};
  auto z = VectorField::zeros(g);
  for (int j = 0; j < 5; ++j) z = stochastic_convolution_step(z, make_step(gen, 0.1), none, empty, j);
  t.at_most("Phi = 0: z stays zero", sup_norm(z), 0.0);

  const auto model = eigenmode_noise(g, 1, 1.0, 0.0, 5);
  const double dt = 0.1;
  const auto path = sample_increments(model, 1, dt, 0);
  const auto z1 = stochastic_convolution_step(VectorField::zeros(g), make_step(gen, dt), model, path, 0);
  const double lam = 4.0 * std::numbers::pi * std::numbers::pi;  // lowest mode q = (1,0)
  t.at_most("one mode, one step: exp(-c lambda dt) Phi dW", max_abs_diff(z1, std::exp(-mu * lam * dt) * path(0, 0) * model.phi[0]),
            1e-15);
  t.require("divergence-free flag kept", z1.divergence_free());

  // Common-noise refinement: coarser paths sum the finest increments.
  const int finest = 64;
  const double horizon = 1.0;
  std::vector<double> dts, errs(3, 0.0);
  const int samples = 40;
  for (int s = 0; s < samples; ++s) {
    auto fine = sample_increments(model, finest, horizon / finest, static_cast<std::uint32_t>(s));
    auto run = [&](const WienerPath& p) {
      auto zz = VectorField::zeros(g);
      const auto step = make_step(gen, p.dt);
      for (int j = 0; j < p.steps; ++j) zz = stochastic_convolution_step(zz, step, model, p, j);
      return zz;
    };
    const auto ref = run(fine);
    auto p = fine.coarsened().coarsened();
    for (int level = 0; level < 3; ++level) {
      errs[static_cast<std::size_t>(level)] += std::pow(l2_norm(run(p) - ref), 2) / samples;
      p = p.coarsened();
    }
  }
  for (auto& e : errs) e = std::sqrt(e);
  dts = {horizon / 16, horizon / 8, horizon / 4};
  t.at_least("strong order with frozen W", detail::observed_order(dts, errs), 0.5);
  return t.finish();
}

Outcome check_ito_isometry() {
  Tally t;
  auto g = make_grid(2, 16);
  NoiseModel none;
  none.seed = 1;
  const auto r0 = ito_isometry_check(none, 0.1, 1000);
  t.at_most("Phi = 0: estimate and exact", std::max(std::abs(r0.estimate), std::abs(r0.exact_or_bound)), 0.0);
  const auto one = eigenmode_noise(g, 1, 1.0, 0.0, 31);
  const auto r1 = ito_isometry_check(one, 0.1, 10000);
  t.at_most("single mode, t=0.1: relative error", r1.rel_error, 0.05);
  const auto r2 = ito_isometry_check(one, 0.2, 10000);
  t.at_most("doubling t doubles the exact side", rel(r2.exact_or_bound, 2.0 * r1.exact_or_bound), 1e-14);
  t.require("doubled-t estimate inside its 95% interval", r2.ci_low <= r2.exact_or_bound && r2.exact_or_bound <= r2.ci_high);
  return t.finish();
}

Outcome check_moment_boundedness() {
  Tally t;
  auto g = make_grid(2, 16);
  const auto step = make_step(constant_generator(g, 0.01), 0.01);
  NoiseModel none;
  const auto r0 = moment_boundedness_check(none, step, 0.1, 2, 20);
  t.at_most("Phi = 0: envelope", *std::max_element(r0.sup_h3_sq.begin(), r0.sup_h3_sq.end()), 0.0);
  const auto one = eigenmode_noise(g, 1, 0.1, 0.0, 41);
  const auto r1 = moment_boundedness_check(one, step, 0.5, 4, 200);
  t.at_least("single mode, T=0.5: R^2 of mean ||z||_3^2 vs t", r1.r_squared, 0.9);
  t.require("E[X^2]^2 <= E[X^4]", r1.jensen_ordered);
  t.info("slope", r1.slope);
  return t.finish();
}

Outcome check_bdg_chebyshev() {
  Tally t;
  auto g = make_grid(2, 16);
  const auto model = eigenmode_noise(g, 4, 1.0, 1.0, 51);
  const auto b = bdg_check(model, 0.1, 50, 4000);
  t.require("BDG (Doob constant) at 95%: estimate " + sci(b.estimate) + " vs bound " + sci(b.exact_or_bound), b.pass);
  for (auto law : {SyntheticLaw::uniform, SyntheticLaw::truncated_normal, SyntheticLaw::two_point}) {
    const auto c = chebyshev_check(law, 2, 20000, 61);
    t.require(c.name + ": P=" + sci(c.estimate) + " vs 2^-r", c.pass);
  }
  return t.finish();
}

// ---------------------------------------------------------------- fixed point

Outcome check_bilinear() {
  Tally t;
  auto g = make_grid(2, 32);
  t.at_most("u = 0", sup_norm(bilinear_term(VectorField::zeros(g))), 0.0);
  t.at_most("constant u", sup_norm(bilinear_term(constant_velocity(g, {0.3, -0.2}))), 1e-13);
  const auto tg = taylor_green(g, 1.0);
  const auto b = bilinear_term(tg);
  t.at_most("Taylor-Green: |P B| / |B|", l2_norm(leray_project(b)) / l2_norm(b), 1e-10);
  const auto u = random_divfree(g, 15, 0, 8, 1.0);
  t.at_most("random div-free: |<B,u>| / (|u| |grad u|^2)",
            std::abs(inner(bilinear_term(u), u)) / (l2_norm(u) * std::pow(gradient_power_norm(u, 1), 2)), 1e-10);
  return t.finish();
}

Outcome check_pressure() {
  Tally t;
  auto g = make_grid(2, 32);
  auto cfg = base_config(0.01, 1e-3, 0.1);
  const DensityState flat(ScalarField::zeros(g));
  const auto zero = VectorField::zeros(g);
  t.at_most("u = v = 0", sup_norm(pressure_gradient(flat, zero, zero, cfg)), 0.0);
  const auto tg = taylor_green(g, 1.0);
  const auto gq = pressure_gradient(flat, tg, tg, cfg);
  t.at_most("Taylor-Green vs analytic pressure gradient", max_abs_diff(gq, taylor_green_pressure_gradient(g, 1.0, 0.01, 0.0)), 1e-12);
  t.at_most("gradient field: |P grad Q| / |grad Q|", l2_norm(leray_project(gq)) / l2_norm(gq), 1e-10);

  const auto u = random_divfree(g, 16, 0, 8, 1.0);
  const auto tendency = bilinear_term(u) - pressure_gradient(flat, u, u, cfg) + (cfg.mu / cfg.rho_bar) * apply_laplacian(u);
  t.at_most("random div-free: |div tendency| / |grad tendency|", l2_norm(divergence(tendency)) / gradient_power_norm(tendency, 1),
            1e-9);

  const DensityState bumpy(density_random(g, 17, 0.4));
  double ratio = 0.0;
  const auto gv = pressure_gradient(bumpy, u, u, cfg, &ratio);
  t.at_most("variable density: |<grad Q, u>| / (|grad Q| |u|)", std::abs(inner(gv, u)) / (l2_norm(gv) * l2_norm(u)), 1e-10);
  t.info("source mean ratio", ratio);
  return t.finish();
}

Outcome check_picard_level() {
  Tally t;
  auto g = make_grid(2, 16);
  auto cfg = base_config(0.01, 0.01, 0.1);
  const InitialData init{density_wave(g, 0.3), VectorField::zeros(g)};
  NoiseModel none;
  const WienerPath path{cfg.dt, 10, 0, {}};
  const auto l0 = initial_level(init, cfg, 10);
  const auto l1 = picard_level(l0, init, none, path, cfg);
  double vz = 0.0, da = 0.0;
  for (int j = 0; j <= l1.steps(); ++j) {
    vz = std::max({vz, sup_norm(l1.v[static_cast<std::size_t>(j)]), sup_norm(l1.z[static_cast<std::size_t>(j)])});
    da = std::max(da, max_abs_diff(l1.a[static_cast<std::size_t>(j)].a, init.a0));
  }
  t.at_most("zero velocity, no noise: sup |v|, |z| at level 1", vz, 0.0);
  t.at_most("zero velocity: a frozen", da, 0.0);

  // Small noise on a short fixed window: geometric contraction.
  auto gcfg = base_config(0.01, 1e-3, 0.02);
  const InitialData data{density_wave(g, 0.3), 0.3 * random_divfree(g, 18, 0, 3, 2.0)};
  const auto noise = eigenmode_noise(g, 4, 0.01, 2.0, 19);
  const auto npath = sample_increments(noise, 20, gcfg.dt, 0);
  const auto run = run_local(gcfg, data, noise, npath, 0.02);
  const auto ratios = run.report.ratios();
  t.require("converged in " + std::to_string(run.report.levels.size()) + " levels", run.report.converged);
  t.at_least("measured ratios", static_cast<double>(ratios.size()), 2.0);
  t.at_most("max ratio", ratios.empty() ? 1.0 : *std::max_element(ratios.begin(), ratios.end()), 0.5);
  t.require("v(0) = u0 and z(0) = 0", max_abs_diff(run.state.v.front(), data.u0) == 0.0 && sup_norm(run.state.z.front()) == 0.0);
  double div = 0.0;
  for (int j = 0; j <= run.state.steps(); ++j) {
    const auto u = run.state.u(j);
    const double gnorm = gradient_power_norm(u, 1);
    if (gnorm > 0.0) div = std::max(div, l2_norm(divergence(u)) / gnorm);
  }
  t.at_most("|div u| / |grad u| at every step", div, 1e-10);
  t.require("a-distance within the transported bound", run.report.a_bound_pass);
  return t.finish();
}

Outcome check_window_constants() {
  Tally t;
  auto g = make_grid(2, 32);
  SolverConfig cfg = base_config(0.01, 1e-3, 0.1);
  cfg.p = 6.0;
  const auto u = random_divfree(g, 20, 0, 2, 2.0);
  const auto a = density_wave(g, 1.0);
  const auto small_u = (0.45 / w2p_norm(u, cfg.p)) * u;
  const auto small_a = (0.45 / w2p_norm(a, cfg.p)) * a;
  const auto k = compute_K0(cfg, small_a, small_u, 0.5);
  t.at_most("norms <= 1/2, C5 <= 1: |K0 - 1|", std::abs(k.K0 - 1.0), 0.0);
  t.at_most("alpha(0)", alpha(cfg, k, 0.0), 0.0);
  bool increasing = true;
  double prev = 0.0;
  for (int i = 1; i <= 60; ++i) {
    const double v = alpha(cfg, k, std::pow(10.0, -12.0 + i * 0.2));
    increasing = increasing && v > prev;
    prev = v;
  }
  t.require("alpha strictly increasing on [1e-12, 1]", increasing);
  const auto sel = select_window(cfg, k);
  t.at_most("alpha at the root vs 1/2 - margin", std::abs(alpha(cfg, k, sel.alpha_root) - (0.5 - cfg.alpha_margin)) / 0.5, 1e-5);
  t.require("root brackets: alpha(T (1 + 1e-5)) > 1/2 - margin",
            alpha(cfg, k, sel.alpha_root * (1.0 + 1e-5)) > 0.5 - cfg.alpha_margin);
  t.info("window " + sci(sel.window) + " bound by " + sel.binding);
  const auto big = compute_K0(cfg, a, u, 0.0);
  t.at_most("K0 = 2 max norm for large data", rel(big.K0, 2.0 * std::max(w2p_norm(a, cfg.p), w2p_norm(u, cfg.p))), 1e-14);
  return t.finish();
}

Outcome check_run_local() {
  Tally t;
  auto g = make_grid(2, 32);
  auto cfg = base_config(0.01, 1e-3, 0.05);
  NoiseModel none;
  const WienerPath empty{cfg.dt, 50, 0, {}};
  const auto zero = run_local(cfg, InitialData{ScalarField::zeros(g), VectorField::zeros(g)}, none, empty, 0.05);
  t.require("zero data: converged at level 1 with d1 = 0",
            zero.report.converged && zero.report.levels.size() == 1 && zero.report.levels[0].distance == 0.0);
  const auto tg = run_local(cfg, InitialData{ScalarField::zeros(g), taylor_green(g, 1.0)}, none, empty, 0.05);
  t.require("Taylor-Green: converged in " + std::to_string(tg.report.levels.size()) + " <= 10 levels",
            tg.report.converged && tg.report.levels.size() <= 10);
  t.at_most("Taylor-Green: Duhamel residual", tg.report.duhamel_residual, 1e-7);
  t.at_most("Taylor-Green: error vs analytic at t=0.05",
            max_abs_diff(tg.state.u(tg.state.steps()), taylor_green_exact(g, 1.0, 0.01, 0.05)), 1e-4);

  const auto noise = eigenmode_noise(g, 4, 0.01, 2.0, 23);
  const auto path = sample_increments(noise, 50, cfg.dt, 2);
  const InitialData init{density_wave(g, 0.2), 0.2 * taylor_green(g, 1.0)};
  const auto a = run_local(cfg, init, noise, path, 0.05);
  const auto b = run_local(cfg, init, noise, sample_increments(noise, 50, cfg.dt, 2), 0.05);
  bool same = a.report.levels.size() == b.report.levels.size();
  for (std::size_t i = 0; same && i < a.report.levels.size(); ++i)
    same = a.report.levels[i].distance == b.report.levels[i].distance;
  same = same && max_abs_diff(a.state.u(a.state.steps()), b.state.u(b.state.steps())) == 0.0;
  t.require("same seed twice: identical report and fields", same);
  return t.finish();
}

Outcome check_global_march() {
  Tally t;
  auto g = make_grid(2, 16);
  auto cfg = base_config(0.01, 0.01, 1.0);
  cfg.fixed_window = 1.0;
  NoiseModel none;
  const InitialData tg{ScalarField::zeros(g), taylor_green(g, 1.0)};
  const auto stitched = global_march(cfg, tg, none, 2.0);
  auto single_cfg = cfg;
  single_cfg.fixed_window = 2.0;
  single_cfg.horizon = 2.0;
  const auto single = global_march(single_cfg, tg, none, 2.0);
  double diff = 0.0;
  for (std::size_t j = 0; j < single.u.size(); ++j) diff = std::max(diff, max_abs_diff(stitched.u[j], single.u[j]));
  t.require("two windows vs one", stitched.windows.size() == 2 && single.windows.size() == 1);
  t.at_most("Taylor-Green T=2: stitched vs single window", diff, 1e-6);
  t.at_most("seam jump", stitched.max_seam_jump, 1e-12);

  const auto trivial = global_march(cfg, InitialData{ScalarField::zeros(g), VectorField::zeros(g)}, none, 2.0);
  bool instant = true;
  for (const auto& w : trivial.windows) instant = instant && w.contraction.levels.size() == 1;
  t.require("zero data: every window converges at level 1", instant);

  auto scfg = base_config(0.01, 0.01, 0.1);
  const auto noise = eigenmode_noise(g, 4, 0.05, 2.0, 29);
  const InitialData small{ScalarField::zeros(g), 0.1 * taylor_green(g, 1.0)};
  const auto s1 = global_march(scfg, small, noise, 0.3, 5);
  const auto s2 = global_march(scfg, small, noise, 0.3, 5);
  bool same = s1.windows.size() == s2.windows.size() && series_csv(s1.series) == series_csv(s2.series);
  for (std::size_t i = 0; same && i < s1.windows.size(); ++i) same = s1.windows[i].length == s2.windows[i].length;
  t.require("stochastic, fixed seed: " + std::to_string(s1.windows.size()) + " windows reproduced", same);

  auto acfg = base_config(0.01, 1e-3, 0.1);
  acfg.window_mode = WindowMode::auto_formula;
  std::string message;
  try {
    (void)global_march(acfg, InitialData{density_wave(g, 0.3), random_divfree(g, 30, 0, 4, 1.0)}, none, 0.1);
  } catch (const MarchError& e) {
    message = e.what();
  }
  t.require("large data under the auto window: 'norm growth prevents marching'",
            message.find("norm growth prevents marching") != std::string::npos);
  return t.finish();
}

// ---------------------------------------------------------------- energy

Outcome check_energy_audit() {
  Tally t;
  auto g = make_grid(2, 32);
  auto cfg = base_config(0.01, 1e-3, 0.25);
  NoiseModel none;
  const auto zero = global_march(cfg, InitialData{ScalarField::zeros(g), VectorField::zeros(g)}, none, 0.25);
  const auto lz = energy_ledger(zero.u, zero.a, cfg.dt, cfg.mu, cfg.rho_bar);
  double biggest = 0.0;
  for (const auto& r : lz.rows) biggest = std::max({biggest, r.kinetic, r.dissipation_increment, std::abs(r.audited)});
  t.at_most("zero data: every ledger entry", biggest, 0.0);

  const auto tg = global_march(cfg, InitialData{ScalarField::zeros(g), taylor_green(g, 1.0)}, none, 0.25);
  const auto ledger = energy_ledger(tg.u, tg.a, cfg.dt, cfg.mu, cfg.rho_bar);
  const double decay = std::exp(-16.0 * std::numbers::pi * std::numbers::pi * cfg.mu * 0.25);
  t.at_most("Taylor-Green: kinetic(0.25) vs exp(-16 pi^2 nu t)", rel(ledger.rows.back().kinetic / ledger.rows.front().kinetic, decay),
            1e-4);
  // Brute-force |grad u|^2 from physical-space derivatives.
  const auto gm = gradient_magnitude(tg.u.front());
  const double brute = inner(gm, gm);
  t.at_most("int |grad u|^2 = 4 pi^2 A^2 (spectral and brute force)",
            std::max(rel(std::pow(gradient_power_norm(tg.u.front(), 1), 2), 4 * std::numbers::pi * std::numbers::pi),
                     rel(brute, 4 * std::numbers::pi * std::numbers::pi)),
            1e-12);
  const auto verdict = energy_audit(ledger);
  t.require("deterministic audit: worst rate " + sci(verdict.worst_rate) + " vs " + sci(verdict.tolerance_rate), verdict.pass);
  t.require("kinetic energy non-increasing", verdict.kinetic_non_increasing);
  return t.finish();
}

Outcome check_high_order_envelope() {
  Tally t;
  auto g = make_grid(2, 16);
  auto heat = base_config(0.05, 0.01, 0.2);
  heat.nonlinear = false;
  NoiseModel none;
  const auto u0 = random_divfree(g, 31, 0, 6, 0.5);
  const auto run = global_march(heat, InitialData{ScalarField::zeros(g), u0}, none, 0.2);
  bool dissipative = true;
  for (int k = 1; k <= 3; ++k) {
    const auto e = high_order_envelope(run.u, heat.dt, k);
    for (double n : e.norms) dissipative = dissipative && n <= e.initial * (1.0 + 1e-13);
    dissipative = dissipative && e.finite && e.constant_monotone;
  }
  t.require("heat-only: ||grad^k u(t)|| <= ||grad^k u0||, k = 1..3", dissipative);

  auto cfg = base_config(0.01, 0.01, 0.2);
  const auto tg = global_march(cfg, InitialData{ScalarField::zeros(g), taylor_green(g, 1.0)}, none, 0.2);
  bool monotone = true;
  for (int k = 1; k <= 3; ++k) monotone = monotone && high_order_envelope(tg.u, cfg.dt, k).norms_non_increasing;
  t.require("Taylor-Green: envelopes decay monotonically", monotone);

  auto envelope_slope = [&](double amp) {
    const auto noise = eigenmode_noise(g, 4, amp, 2.0, 37);
    const auto m = global_march(cfg, InitialData{ScalarField::zeros(g), VectorField::zeros(g)}, noise, 0.2, 0);
    const auto e = high_order_envelope(m.u, cfg.dt, 1);
    std::vector<double> ts, sq;
    for (std::size_t j = 0; j < e.norms.size(); ++j) {
      ts.push_back(static_cast<double>(j) * cfg.dt);
      sq.push_back(e.norms[j] * e.norms[j]);
    }
    return linear_fit(ts, sq).slope;
  };
  const double ratio = envelope_slope(0.02) / envelope_slope(0.01);
  t.within("doubling Phi scales the squared envelope slope", ratio, 3.9, 4.1);
  return t.finish();
}

// ---------------------------------------------------------------- cli

Outcome check_cli_config() {
  Tally t;
  std::string unknown;
  try {
    (void)RunConfig::parse("[physics]\nnu = 0.1\n");
  } catch (const ConfigError& e) {
    unknown = e.what();
  }
  t.require("unknown key names the key and the accepted keys",
            unknown.find("physics.nu") != std::string::npos && unknown.find("mu, rho_bar") != std::string::npos);
  std::string hypothesis;
  try {
    RunConfig::parse("[grid]\ndim = 2\n[lp]\np = 2\n").validate();
  } catch (const ConfigError& e) {
    hypothesis = e.what();
  }
  t.require("p = 2 at N = 2 rejected citing N < p <= 6", hypothesis.find("N < p <= 6") != std::string::npos);

  const auto sweep = RunConfig::parse(
      "[grid]\nresolution = 8\n[time]\nT = 0.01\ndt = 0.001\n[initial]\namplitude = 0.1\n[sweep]\nlp.p = 2.5, 3, 4\n");
  const auto dir = scratch_dir("sweep");
  const auto out = run_sweep(sweep, dir);
  std::size_t rows = 0;
  for (char c : out.summary_csv) rows += c == '\n';
  t.require("sweep p in {2.5, 3, 4}: three run directories and three summary rows",
            out.cells.size() == 3 && rows == 4 && fs::exists(dir / "cell_002" / "manifest.json"));
  t.require("every sweep cell passes", out.exit_code == kExitPass);
  bool rejected = false;
  try {
    (void)run_sweep(RunConfig::parse("[sweep]\nlp.p = 2, 3\n"), dir / "bad");
  } catch (const ConfigError&) {
    rejected = true;
  }
  t.require("sweep containing p = 2 at N = 2 rejected before running", rejected && !fs::exists(dir / "bad"));

  const auto first = run_to_directory(load_run_config(dir / "cell_000" / "manifest.json"), dir / "again");
  bool identical = true;
  for (const auto& f : first.manifest["outputs"])
    identical = identical && read_file(dir / "cell_000" / f["file"].get<std::string>()) ==
                                 read_file(dir / "again" / f["file"].get<std::string>());
  t.require("re-running from a manifest reproduces every output byte for byte", identical);
  fs::remove_all(dir);
  return t.finish();
}

}  // namespace

std::vector<Check> property_checks() {
  return {
      {"P01", "forward_transform", "constant, single mode, round trip, Parseval", 0, check_forward_transform},
      {"P02", "laplacian_eigenvalue", "zero mode, 4 pi^2, 36 pi^2", 0, check_laplacian_eigenvalue},
      {"P03", "apply_laplacian", "eigenfunctions and finite-difference order", 0, check_apply_laplacian},
      {"P04", "inverse_laplacian", "eigenfunction, round trip, zero-mean domain", 0, check_inverse_laplacian},
      {"P05", "inverse_sqrt_laplacian", "eigenfunction and composition", 0, check_inverse_sqrt_laplacian},
      {"P06", "gradient/divergence", "constant, div grad = Laplacian, analytic derivative", 0, check_gradient_divergence},
      {"P07", "leray_project", "gradients, idempotence, Helmholtz split", 0, check_leray_project},
      {"P08", "snapshot", "binary field snapshots", 0, check_snapshot},
      {"P09", "backtrack_foot", "zero, translation, swirl vs RK4", 0, check_backtrack_foot},
      {"P10", "advect_density", "zero velocity and translation order", 0, check_advect_density},
      {"P11", "sobolev_growth_diagnostic", "still, translated and sheared density", 0, check_sobolev_growth},
      {"P12", "apply_semigroup", "exact decay, continuity, semigroup law, CN order", 0, check_apply_semigroup},
      {"P13", "dissipativity_check", "constant, eigenfunction, random probes", 0, check_dissipativity},
      {"P14", "decay_probe", "smooth and rough generator decay", 0, check_decay_probe},
      {"P15", "gradient_commutation_check", "exact scheme and refinement", 0, check_commutation},
      {"P16", "compute_C_Phi", "zero, single mode, doubling", 0, check_C_Phi},
      {"P17", "sample_increments", "determinism, moments, independence", 0, check_sample_increments},
      {"P18", "stochastic_convolution_step", "zero noise, closed form, strong order", 0, check_stochastic_convolution},
      {"P19", "ito_isometry_check", "zero noise, single mode, linearity in t", 0, check_ito_isometry},
      {"P20", "moment_boundedness_check", "zero noise, linear envelope, Jensen", 0, check_moment_boundedness},
      {"P21", "moment_boundedness_check", "BDG and Chebyshev sanity", 0, check_bdg_chebyshev},
      {"P22", "bilinear_term", "zero, constant, Taylor-Green, orthogonality", 0, check_bilinear},
      {"P23", "pressure_gradient", "zero, Taylor-Green, divergence-free tendency", 0, check_pressure},
      {"P24", "picard_level", "zero solution and geometric contraction", 0, check_picard_level},
      {"P25", "compute_K0_and_alpha", "K0 floor, alpha(0), monotone root", 0, check_window_constants},
      {"P26", "run_local", "zero data, Taylor-Green, determinism", 0, check_run_local},
      {"P27", "global_march", "stitching, trivial march, reproducibility, window floor", 0, check_global_march},
      {"P28", "energy_audit", "zero data and Taylor-Green decay", 0, check_energy_audit},
      {"P29", "high_order_envelope", "heat-only, Taylor-Green, noise scaling", 0, check_high_order_envelope},
      {"P30", "cli", "config errors, sweep fan-out, manifest replay", 0, check_cli_config},
  };
}

CheckResult run_check(const Check& check) {
  CheckResult r{check.id, check.op, check.title, false, "", 0.0, check.budget_seconds};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const auto o = check.run();
    r.pass = o.pass;
    r.detail = o.detail;
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (check.budget_seconds > 0.0 && r.seconds > check.budget_seconds) {
    r.pass = false;
    r.detail += "; FAIL runtime " + sci(r.seconds) + " s over budget " + sci(check.budget_seconds) + " s";
  }
  return r;
}

std::string format_result(const CheckResult& r) {
  char head[160];
  std::snprintf(head, sizeof head, "%-5s %-4s %-28s %8.2fs  ", r.id.c_str(), r.pass ? "PASS" : "FAIL", r.op.c_str(), r.seconds);
  return head + r.title + "\n      " + r.detail + '\n';
}

std::string format_results(const std::vector<CheckResult>& results) {
  std::ostringstream os;
  int passed = 0;
  double total = 0.0;
  for (const auto& r : results) {
    os << format_result(r);
    passed += r.pass ? 1 : 0;
    total += r.seconds;
  }
  char tail[96];
  std::snprintf(tail, sizeof tail, "%d/%zu checks passed in %.1f s\n", passed, results.size(), total);
  os << tail;
  return os.str();
}

std::vector<Check> filter_checks(std::vector<Check> checks, const std::string& filter) {
  if (filter.empty()) return checks;
  std::erase_if(checks, [&](const Check& c) {
    return c.id.find(filter) == std::string::npos && c.op.find(filter) == std::string::npos;
  });
  return checks;
}

}  // namespace mildns
