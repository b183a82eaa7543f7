#include <algorithm>
#include <filesystem>
#include <numbers>
#include <optional>
#include <set>

#include "check_util.hpp"
#include "mildns/config.hpp"
#include "mildns/energy.hpp"
#include "mildns/fixed_point.hpp"
#include "mildns/harness.hpp"
#include "mildns/norms.hpp"
#include "mildns/presets.hpp"
#include "mildns/rng.hpp"
#include "mildns/spectral.hpp"
#include "mildns/stats.hpp"
#include "mildns/verify.hpp"

namespace mildns {
namespace fs = std::filesystem;
using detail::base_config;
using detail::constant_velocity;
using detail::kTwoPi;
using detail::mode_field;
using detail::rel;
using detail::sci;
using detail::scratch_dir;
using detail::steady_history;
using detail::Tally;

namespace {

constexpr double kPi = std::numbers::pi;

Outcome spectral_core() {
  Tally t;
  auto g = make_grid(2, 32);
  double roundtrip = 0.0;
  for (std::uint32_t s = 0; s < 10; ++s) {
    const auto f = random_field(g, 101, s, 15, 0.0, false);
    roundtrip = std::max(roundtrip, max_abs_diff(inverse_transform(g, forward_transform(f)), f) / sup_norm(f));
  }
  t.at_most("round trip, 10 random fields", roundtrip, 1e-12);

  double worst = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const auto k = g->wave_index(i);
    const double lambda = laplacian_eigenvalue(k);
    const auto e = mode_field(g, k, false);
    worst = std::max(worst, sup_norm(apply_laplacian(e) + lambda * e) / std::max(1.0, lambda));
  }
  t.at_most("every lattice mode: |Delta e + lambda e|_inf / max(1, lambda)", worst, 1e-10);
  t.at_most("lambda(1,0) vs 4 pi^2", rel(laplacian_eigenvalue({1, 0}), 4.0 * kPi * kPi), 1e-10);

  double idempotent = 0.0, annihilate = 0.0;
  for (std::uint32_t s = 0; s < 10; ++s) {
    const auto u = random_vector(g, 102, s, 10, 1.0);
    const auto pu = leray_project(u);
    idempotent = std::max(idempotent, max_abs_diff(leray_project(pu), pu) / sup_norm(pu));
    const auto grad = gradient(random_field(g, 103, s, 10, 1.0));
    annihilate = std::max(annihilate, sup_norm(leray_project(grad)) / sup_norm(grad));
  }
  t.at_most("Leray: |P P u - P u| / |P u|", idempotent, 1e-12);
  t.at_most("Leray: |P grad phi| / |grad phi|", annihilate, 1e-12);
  return t.finish();
}

Outcome taylor_green_decay() {
  Tally t;
  auto g = make_grid(2, 64);
  auto cfg = base_config(0.01, 1e-3, 0.5);
  cfg.fixed_window = 0.5;
  const auto m = global_march(cfg, InitialData{ScalarField::zeros(g), taylor_green(g, 1.0)}, NoiseModel{}, 0.5);
  double err = 0.0;
  for (std::size_t j = 0; j < m.u.size(); ++j)
    err = std::max(err, max_abs_diff(m.u[j], taylor_green_exact(g, 1.0, cfg.mu, m.times[j])));
  const auto ledger = energy_ledger(m.u, m.a, cfg.dt, cfg.mu, cfg.rho_bar);
  double energy = 0.0;
  const double e0 = ledger.rows.front().kinetic;
  for (const auto& r : ledger.rows)
    energy = std::max(energy, rel(r.kinetic / e0, std::exp(-16.0 * kPi * kPi * cfg.mu * r.t)));
  t.require("one window", m.windows.size() == 1);
  t.at_most("max velocity error vs exact, every step", err, 1e-4);
  t.at_most("kinetic energy ratio vs exp(-16 pi^2 nu t), every step", energy, 1e-4);
  return t.finish();
}

double swirl_density(double x, double y) {
  return 0.3 * std::sin(kTwoPi * x) * std::cos(kTwoPi * y) + 0.1 * std::cos(kTwoPi * (2 * x + y));
}

// Backward characteristic foot of the steady swirl A (sin 2pi x cos 2pi y, -cos 2pi x sin 2pi y), RK4.
std::array<double, 2> swirl_foot(double x, double y, double amplitude, double horizon) {
  auto vel = [&](const std::array<double, 2>& p) {
    return std::array<double, 2>{amplitude * std::sin(kTwoPi * p[0]) * std::cos(kTwoPi * p[1]),
                                 -amplitude * std::cos(kTwoPi * p[0]) * std::sin(kTwoPi * p[1])};
  };
  auto shift = [](const std::array<double, 2>& p, const std::array<double, 2>& v, double h) {
    return std::array<double, 2>{p[0] - h * v[0], p[1] - h * v[1]};
  };
  constexpr int kSteps = 1000;
  const double h = horizon / kSteps;
  std::array<double, 2> p{x, y};
  for (int i = 0; i < kSteps; ++i) {
    const auto k1 = vel(p);
    const auto k2 = vel(shift(p, k1, 0.5 * h));
    const auto k3 = vel(shift(p, k2, 0.5 * h));
    const auto k4 = vel(shift(p, k3, h));
    for (std::size_t a = 0; a < 2; ++a) p[a] -= h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
  }
  return p;
}

Outcome transport() {
  Tally t;
  auto g = make_grid(2, 32);
  const auto a0 = ScalarField::from_function(g, [](std::span<const double> x) { return swirl_density(x[0], x[1]); });
  const auto frozen = advect_density(a0, steady_history(VectorField::zeros(g), 0.1, 5), 0.5);
  t.at_most("zero velocity: max |a - a0|", max_abs_diff(frozen.a, a0), 0.0);

  std::vector<double> hs, errs;
  for (int m : {32, 64, 128}) {
    auto gm = make_grid(2, m);
    const auto init = ScalarField::from_function(gm, [](std::span<const double> x) { return swirl_density(x[0], x[1]); });
    const auto exact =
        ScalarField::from_function(gm, [](std::span<const double> x) { return swirl_density(x[0] - 0.1, x[1] + 0.05); });
    const auto moved = advect_density(init, steady_history(constant_velocity(gm, {0.4, -0.2}), 0.05, 5), 0.25);
    hs.push_back(1.0 / m);
    errs.push_back(max_abs_diff(moved.a, exact));
  }
  t.at_least("translation: observed order over M = 32, 64, 128", detail::observed_order(hs, errs), 2.5);

  // Time-dependent rotating mixture of two random divergence-free flows.
  const auto u1 = random_divfree(g, 104, 0, 3, 1.0);
  const auto u2 = random_divfree(g, 104, 1, 3, 1.0);
  VelocityHistory mix;
  mix.dt = 0.01;
  for (int j = 0; j <= 50; ++j) {
    const double s = kTwoPi * j * mix.dt;
    mix.samples.push_back(std::cos(s) * u1 + std::sin(s) * u2);
  }
  const auto rough = density_random(g, 105, 0.5);
  const auto traj = advect_trajectory(rough, mix);
  bool inside = true;
  for (const auto& st : traj) inside = inside && st.a.min() >= rough.min() && st.a.max() <= rough.max();
  t.require("range preserved at all " + std::to_string(traj.size()) + " steps", inside);

  // Forward then backward along a steady swirl. Each stage is one bounded
  // interpolation; its error is measured on exact input against RK4 feet.
  constexpr double kSwirl = 0.5, kHorizon = 0.2;
  const auto swirl = steady_history(taylor_green(g, kSwirl), 1e-3, 200);
  const auto there = advect_density(a0, swirl, kHorizon);
  const auto back = advect_density(there.a, swirl.reversed(), kHorizon);
  const auto exact_there = ScalarField::from_function(g, [&](std::span<const double> x) {
    const auto foot = swirl_foot(x[0], x[1], kSwirl, kHorizon);
    return swirl_density(foot[0], foot[1]);
  });
  const double stage = std::max(max_abs_diff(there.a, exact_there),
                                max_abs_diff(advect_density(exact_there, swirl.reversed(), kHorizon).a, a0));
  t.at_most("reversibility error vs 2x single-stage interpolation error " + sci(stage), max_abs_diff(back.a, a0),
            2.0 * stage);
  return t.finish();
}

Outcome dissipativity() {
  Tally t;
  auto g = make_grid(2, 32);
  const Generator gen(1.0, 1.0, DensityState(density_random(g, 106, 0.5)));
  std::vector<ScalarField> probes;
  for (std::uint32_t s = 0; s < 50; ++s) probes.push_back(random_field(g, 107, s, 12, 0.5, false));
  SequentialRng rng(108, substream_id("acceptance/lambda"));
  double worst = 1e300, plain = 1e300;
  for (int i = 0; i < 5; ++i) {
    const double lambda = 10.0 * rng.uniform();
    const auto r = dissipativity_check(gen, lambda, probes);
    worst = std::min(worst, r.min_ratio);
    plain = std::min(plain, r.min_unweighted_ratio);
  }
  t.at_least("min ||(lambda - A) g|| / (lambda ||g||), 1/c-weighted", worst, 1.0 - 1e-9);
  t.info("unweighted minimum", plain);
  return t.finish();
}

Outcome decay() {
  Tally t;
  std::vector<double> times;
  for (int i = 0; i <= 10; ++i) times.push_back(1e-3 * std::pow(100.0, i / 10.0));
  auto g128 = make_grid(2, 128);
  const Generator gen128(0.05, 1.0, DensityState(ScalarField::zeros(g128)));
  const auto gen_probe = decay_probe(gen128, rough_field(g128, 2.0), times, 3.0, 6.0);
  t.within("||A S(t) f||_2 slope, rough data, M=128", gen_probe.generator_slope, -1.1, -0.9);

  auto g256 = make_grid(2, 256);
  const Generator gen256(0.01, 1.0, DensityState(ScalarField::zeros(g256)));
  const auto lq = decay_probe(gen256, power_singularity(g256, 2.0 / 3.0, 0.25), times, 3.0, 6.0);
  t.at_most("|S(t) f|_6 slope vs -1/6 (relative), p=3, M=256", std::abs(lq.lq_slope / lq.lq_expected_slope - 1.0), 0.15);
  t.info("slope", lq.lq_slope);
  return t.finish();
}

Outcome ito_bdg() {
  Tally t;
  auto g = make_grid(2, 32);
  const auto model = eigenmode_noise(g, 8, 1.0, 1.0, 109);
  const auto ito = ito_isometry_check(model, 0.1, 10000);
  t.at_most("Ito isometry, K=8, t=0.1, 1e4 samples: relative error", ito.rel_error, 0.05);
  const auto b = bdg_check(model, 0.1, 50, 4000);
  t.require("BDG at 95%: " + sci(b.estimate) + " vs bound " + sci(b.exact_or_bound), b.pass);
  for (auto law : {SyntheticLaw::uniform, SyntheticLaw::truncated_normal, SyntheticLaw::two_point}) {
    const auto c = chebyshev_check(law, 4, 20000, 110);
    t.require(c.name + " Chebyshev at 95%: P=" + sci(c.estimate), c.pass);
  }
  return t.finish();
}

Outcome moment_envelope() {
  Tally t;
  auto g = make_grid(2, 32);
  const auto model = eigenmode_noise(g, 8, 0.1, 2.0, 111);
  const auto gen = std::make_shared<const Generator>(0.01, 1.0, DensityState(ScalarField::zeros(g)));
  const auto step = make_step(gen, 0.01);
  const auto r = moment_boundedness_check(model, step, 0.5, 4, 200);
  const double c5 = default_C5(model);
  double worst = 0.0;
  for (std::size_t j = 1; j < r.times.size(); ++j) worst = std::max(worst, r.mean_h3_sq[j] / (c5 * r.times[j]));
  t.require("exact propagator", step.scheme == Scheme::exact_constant);
  t.at_least("R^2 of mean ||z||_{H3}^2 against t", r.r_squared, 0.9);
  t.at_most("max_t mean ||z||_{H3}^2 / (C5 t)", worst, 1.0);
  t.require("E[X^2]^2 <= E[X^4]", r.jensen_ordered);
  return t.finish();
}

// Data with |u0|_{2,6} = |a0|_{2,6} = 0.49, so K0 is set by C5 or 1.
InitialData unit_data(const GridPtr& g) {
  const auto u = random_divfree(g, 7, 1, 2, 2.0);
  const auto a = density_wave(g, 1.0);
  return InitialData{(0.49 / w2p_norm(a, 6.0)) * a, (0.49 / w2p_norm(u, 6.0)) * u};
}

void contraction_case(Tally& t, const std::string& label, SolverConfig cfg, const InitialData& init, const NoiseModel& noise) {
  cfg.p = 6.0;
  cfg.window_mode = WindowMode::auto_formula;
  const auto k = compute_K0(cfg, init.a0, init.u0, default_C5(noise));
  const auto sel = select_window(cfg, k);
  constexpr int kSteps = 20;
  cfg.dt = sel.window / kSteps;
  cfg.horizon = sel.window;
  cfg.window_mode = WindowMode::fixed;
  const auto path = noise.modes() > 0 ? sample_increments(noise, kSteps, cfg.dt, 0) : WienerPath{cfg.dt, kSteps, 0, {}};
  const auto run = run_local(cfg, init, noise, path, sel.window);
  const auto ratios = run.report.ratios();
  t.info(label + ": K0", k.K0);
  t.info(label + ": window", sel.window);
  t.require(label + ": converged in " + std::to_string(run.report.levels.size()) + " <= 20 levels", run.report.converged);
  t.at_least(label + ": measured ratios", static_cast<double>(ratios.size()), 1.0);
  t.at_most(label + ": max ratio", ratios.empty() ? 1.0 : *std::max_element(ratios.begin(), ratios.end()), 1.0 - 1e-12);
  double tail = 0.0;
  for (std::size_t i = ratios.size() - std::min<std::size_t>(3, ratios.size()); i < ratios.size(); ++i)
    tail = std::max(tail, ratios[i]);
  t.at_most(label + ": last ratios", ratios.empty() ? 1.0 : tail, 0.5);
  t.at_most(label + ": Duhamel residual", run.report.duhamel_residual, 1e-7);
}

Outcome picard_contraction() {
  Tally t;
  auto g = make_grid(2, 32);
  const auto init = unit_data(g);
  contraction_case(t, "deterministic mu=1", base_config(1.0, 1e-3, 0.1), init, NoiseModel{});
  contraction_case(t, "stochastic mu=0.01", base_config(0.01, 1e-3, 0.1), init, eigenmode_noise(g, 8, 1e-3, 2.0, 112));
  return t.finish();
}

Outcome skew_symmetry() {
  Tally t;
  auto g = make_grid(2, 32);
  const auto cfg = base_config(0.01, 1e-3, 0.1);
  double bilinear = 0.0, pressure = 0.0;
  for (std::uint32_t s = 0; s < 100; ++s) {
    const auto u = random_divfree(g, 113, s, 8, 1.0);
    const double grad = gradient_power_norm(u, 1);
    bilinear = std::max(bilinear, std::abs(inner(bilinear_term(u), u)) / (l2_norm(u) * grad * grad));
    const auto gq = pressure_gradient(DensityState(density_random(g, 114 + s, 0.4)), u, u, cfg);
    pressure = std::max(pressure, std::abs(inner(gq, u)) / (l2_norm(gq) * l2_norm(u)));
  }
  t.at_most("|<B(u), u>| / (|u| |grad u|^2), 100 fields", bilinear, 1e-10);
  t.at_most("|<grad Q, u>| / (|grad Q| |u|), 100 fields", pressure, 1e-10);
  return t.finish();
}

Outcome energy_balance() {
  Tally t;
  for (int m : {32, 64}) {
    auto g = make_grid(2, m);
    auto cfg = base_config(0.01, 1e-3, 0.25);
    const auto run = global_march(cfg, InitialData{ScalarField::zeros(g), taylor_green(g, 1.0)}, NoiseModel{}, 0.25);
    const auto v = energy_audit(energy_ledger(run.u, run.a, cfg.dt, cfg.mu, cfg.rho_bar));
    const std::string tag = "Taylor-Green M=" + std::to_string(m);
    t.at_most(tag + ": worst drift rate / (1e-6 E0)", v.worst_rate / v.tolerance_rate, 1.0);
    t.require(tag + ": kinetic energy non-increasing", v.kinetic_non_increasing);
  }

  auto g = make_grid(2, 16);
  auto cfg = base_config(0.01, 0.005, 0.1);
  cfg.fixed_window = 0.1;
  const auto noise = eigenmode_noise(g, 4, 0.05, 2.0, 115);
  const InitialData init{ScalarField::zeros(g), 0.1 * taylor_green(g, 1.0)};
  constexpr std::size_t kSamples = 200;
  std::vector<EnergyLedger> ledgers(kSamples);
  parallel_for(kSamples, [&](std::size_t s) {
    const auto m = global_march(cfg, init, noise, 0.1, static_cast<std::uint32_t>(s));
    const auto path = sample_increments(noise, cfg.steps_for(0.1), cfg.dt, static_cast<std::uint32_t>(s));
    ledgers[s] = energy_ledger(m.u, m.a, cfg.dt, cfg.mu, cfg.rho_bar, &noise, &path);
  });
  const auto e = energy_audit_ensemble(ledgers);
  t.require("stochastic, 200 samples: final drift z-score " + sci(e.final_z_score) + " inside the 95% interval", e.pass);
  return t.finish();
}

Outcome reproducibility() {
  Tally t;
  auto g = make_grid(2, 32);
  auto cfg = base_config(0.01, 1e-3, 0.1);
  cfg.fixed_window = 0.1;
  const InitialData tg{ScalarField::zeros(g), taylor_green(g, 1.0)};
  const auto split = global_march(cfg, tg, NoiseModel{}, 0.2);
  auto whole_cfg = cfg;
  whole_cfg.horizon = 0.2;
  whole_cfg.fixed_window = 0.2;
  const auto whole = global_march(whole_cfg, tg, NoiseModel{}, 0.2);
  double overlap = 0.0;
  for (std::size_t j = 0; j < whole.u.size(); ++j) overlap = std::max(overlap, max_abs_diff(split.u[j], whole.u[j]));
  t.require("two windows vs one", split.windows.size() == 2 && whole.windows.size() == 1);
  t.at_most("two windows vs one: max difference", overlap, 1e-6);
  t.at_most("seam jump", split.max_seam_jump, 1e-12);

  const auto dir = scratch_dir("acceptance");
  const auto text = "[grid]\nresolution = 32\n[time]\nT = 0.1\ndt = 0.001\ntotal = 0.2\n[picard]\nwindow_length = 0.1\n";
  const auto first = run_to_directory(RunConfig::parse(text), dir / "first");
  const auto again = run_to_directory(load_run_config(dir / "first" / "manifest.json"), dir / "again");
  bool identical = first.manifest["config_hash"] == again.manifest["config_hash"];
  std::set<std::string> expected{"manifest.json"};
  for (const auto& f : first.manifest["outputs"]) {
    const auto name = f["file"].get<std::string>();
    expected.insert(name);
    identical = identical && read_file(dir / "first" / name) == read_file(dir / "again" / name) &&
                f["fnv1a64"].get<std::string>() == file_digest(dir / "again" / name);
  }
  t.require("re-run from the manifest: " + std::to_string(expected.size() - 1) + " outputs byte-identical", identical);
  std::set<std::string> present;
  for (const auto& e : fs::directory_iterator(dir / "again")) present.insert(e.path().filename().string());
  t.require("no orphan files", present == expected);
  fs::remove_all(dir);
  return t.finish();
}

}  // namespace

std::vector<Check> acceptance_checks() {
  return {
      {"AC1", "spectral_core", "round trip, Laplacian eigenpairs, Leray projector", 5, spectral_core},
      {"AC2", "global_march", "Taylor-Green decay, M=64, T=0.5", 60, taylor_green_decay},
      {"AC3", "advect_density", "identity, translation order, range, reversibility", 10, transport},
      {"AC4", "dissipativity_check", "weighted resolvent bound, 50 fields x 5 lambdas", 10, dissipativity},
      {"AC5", "decay_probe", "generator and Lq smoothing rates", 30, decay},
      {"AC6", "ito_isometry_check", "Ito isometry, BDG and Chebyshev", 120, ito_bdg},
      {"AC7", "moment_boundedness_check", "linear H3 envelope of the stochastic convolution", 180, moment_envelope},
      {"AC8", "run_local", "Picard contraction on the auto window", 720, picard_contraction},
      {"AC9", "bilinear_term", "skew-symmetry of advection and pressure", 20, skew_symmetry},
      {"AC10", "energy_audit", "deterministic and ensemble energy balance", 120, energy_balance},
      {"AC11", "run_to_directory", "window stitching and manifest replay", 60, reproducibility},
  };
}

}  // namespace mildns
