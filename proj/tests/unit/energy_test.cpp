#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mildns/energy.hpp"
#include "mildns/norms.hpp"
#include "mildns/presets.hpp"

namespace mildns {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Energy, LedgerOfExactTaylorGreen) {
  // E = rho |u|^2 / 2 averaged = A^2 e^{-16 pi^2 nu t} / 4; dissipation mu |grad u|^2 = 8 pi^2 mu E.
  auto g = make_grid(2, 16);
  const double nu = 0.01, dt = 0.01;
  std::vector<VectorField> u;
  std::vector<ScalarField> a;
  for (int j = 0; j <= 10; ++j) {
    u.push_back(taylor_green_exact(g, 1.0, nu, j * dt));
    a.push_back(ScalarField::zeros(g));
  }
  const auto ledger = energy_ledger(u, a, dt, nu, 1.0);
  ASSERT_EQ(ledger.rows.size(), 11u);
  for (std::size_t j = 0; j < ledger.rows.size(); ++j)
    EXPECT_NEAR(ledger.rows[j].kinetic, 0.25 * std::exp(-16 * kPi * kPi * nu * j * dt), 1e-14);
  // Trapezoid of 2 mu * 8 pi^2 E over one step, E(t) at the ends.
  const double e0 = 0.25, e1 = 0.25 * std::exp(-16 * kPi * kPi * nu * dt);
  EXPECT_NEAR(ledger.rows[1].dissipation_increment, 0.5 * dt * 16 * kPi * kPi * nu * (e0 + e1), 1e-14);
  EXPECT_TRUE(energy_audit(ledger, 1e-3).pass);
}

TEST(Energy, AuditFlagsAnInjectedJump) {
  EnergyLedger l;
  for (int j = 0; j <= 4; ++j) {
    EnergyRow r;
    r.t = 0.1 * j;
    r.kinetic = 1.0;
    r.audited = j == 3 ? 1.1 : 1.0;
    l.rows.push_back(r);
  }
  const auto v = energy_audit(l);
  EXPECT_FALSE(v.pass);
  ASSERT_TRUE(v.offending_row.has_value());
  EXPECT_EQ(*v.offending_row, 3u);
}

TEST(Energy, EnsembleOfZeroDriftPasses) {
  std::vector<EnergyLedger> ls(20);
  for (std::size_t s = 0; s < ls.size(); ++s) {
    for (int j = 0; j <= 2; ++j) {
      EnergyRow r;
      r.t = 0.5 * j;
      r.audited = 1.0 + (j == 0 ? 0.0 : (s % 2 == 0 ? 1e-3 : -1e-3));
      ls[s].rows.push_back(r);
    }
  }
  const auto v = energy_audit_ensemble(ls);
  EXPECT_TRUE(v.pass);
  EXPECT_NEAR(v.mean_drift.back(), 0.0, 1e-15);
}

TEST(Energy, EnvelopeConstantForExactDecay) {
  // For the heat flow of a single mode, sup |grad u|^2 + int |grad^2 u|^2 over |grad u0|^2
  // is 1 + (1 - e^{-2 nu lambda t}) / (2 nu) exactly; the discrete integral uses the trapezoid rule.
  auto g = make_grid(2, 16);
  std::vector<VectorField> u;
  for (int j = 0; j <= 100; ++j) u.push_back(taylor_green_exact(g, 1.0, 0.01, j * 1e-3));
  const auto env = high_order_envelope(u, 1e-3, 1);
  EXPECT_TRUE(env.finite);
  EXPECT_TRUE(env.constant_monotone);
  EXPECT_TRUE(env.norms_non_increasing);
  const double lambda = 8 * kPi * kPi;
  const double expected = 1.0 + lambda * (1.0 - std::exp(-2 * 0.01 * lambda * 0.1)) / (2 * 0.01 * lambda);
  EXPECT_NEAR(env.fitted_constant.back(), expected, 1e-4 * expected);
}

}  // namespace
}  // namespace mildns
