#include "mildns/energy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mildns/errors.hpp"
#include "mildns/norms.hpp"
#include "mildns/stats.hpp"

namespace mildns {
namespace {

double kinetic_energy(const VectorField& u, const ScalarField& a, double rho_bar) {
  auto av = a.values();
  double acc = 0.0;
  for (const auto& c : u.components()) {
    auto v = c.values();
    for (std::size_t i = 0; i < v.size(); ++i) acc += (1.0 + av[i]) * v[i] * v[i];
  }
  return 0.5 * rho_bar * acc / static_cast<double>(a.size());
}

double squared_gradient(const VectorField& u) {
  const double g = gradient_power_norm(u, 1);
  return g * g;
}

}  // namespace

EnergyLedger energy_ledger(const std::vector<VectorField>& u, const std::vector<ScalarField>& a, double dt, double mu,
                           double rho_bar, const NoiseModel* noise, const WienerPath* path) {
  if (u.size() != a.size() || u.empty()) throw InputError("energy ledger needs matching non-empty u and a trajectories");
  const bool noisy = noise && path && noise->modes() > 0;
  if (noisy && path->steps + 1 < static_cast<int>(u.size())) throw InputError("Wiener path shorter than trajectory");

  ScalarField phi_sq = ScalarField::zeros(u.front().grid_ptr());
  if (noisy) {
    std::vector<double> acc(phi_sq.size(), 0.0);
    for (const auto& f : noise->phi) {
      const auto m = magnitude(f);
      auto v = m.values();
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i] * v[i];
    }
    phi_sq = ScalarField(phi_sq.grid_ptr(), std::move(acc));
  }

  EnergyLedger ledger;
  double g_prev = squared_gradient(u.front());
  EnergyRow row;
  row.kinetic = kinetic_energy(u.front(), a.front(), rho_bar);
  row.audited = row.kinetic;
  ledger.rows.push_back(row);
  for (std::size_t j = 0; j + 1 < u.size(); ++j) {
    EnergyRow next;
    next.t = static_cast<double>(j + 1) * dt;
    next.kinetic = kinetic_energy(u[j + 1], a[j + 1], rho_bar);
    const double g_next = squared_gradient(u[j + 1]);
    next.dissipation_increment = mu * 0.5 * (g_prev + g_next) * dt;
    g_prev = g_next;
    if (noisy) {
      const auto rho = a[j].map([rho_bar](double x) { return rho_bar * (1.0 + x); });
      next.noise_increment = 0.5 * dt * inner(rho, phi_sq);
      const auto rho_u = product(rho, u[j]);
      double m = 0.0;
      for (int k = 0; k < noise->modes(); ++k)
        m += inner(rho_u, noise->phi[static_cast<std::size_t>(k)]) * (*path)(static_cast<int>(j), k);
      next.martingale_increment = m;
    }
    const auto& prev = ledger.rows.back();
    next.cumulative_dissipation = prev.cumulative_dissipation + next.dissipation_increment;
    next.cumulative_noise = prev.cumulative_noise + next.noise_increment;
    next.audited = next.kinetic + next.cumulative_dissipation - next.cumulative_noise;
    ledger.rows.push_back(next);
  }
  for (const auto& r : ledger.rows)
    for (double x : {r.kinetic, r.dissipation_increment, r.noise_increment, r.martingale_increment})
      ledger.finite = ledger.finite && std::isfinite(x);
  return ledger;
}

EnergyVerdict energy_audit(const EnergyLedger& ledger, double relative_rate) {
  EnergyVerdict v;
  if (ledger.rows.empty()) return v;
  const auto& first = ledger.rows.front();
  v.tolerance_rate = relative_rate * first.kinetic;
  const double floor = 1e-14 * std::max(first.kinetic, 1e-300);
  v.entries_valid = ledger.finite;
  for (std::size_t j = 0; j < ledger.rows.size(); ++j) {
    const auto& r = ledger.rows[j];
    v.entries_valid = v.entries_valid && r.kinetic >= 0.0 && r.dissipation_increment >= 0.0;
    if (j > 0 && r.kinetic > ledger.rows[j - 1].kinetic * (1.0 + 1e-14)) v.kinetic_non_increasing = false;
    if (j == 0) continue;
    const double drift = std::abs(r.audited - first.audited);
    v.worst_rate = std::max(v.worst_rate, drift / (r.t - first.t));
    if (drift > v.tolerance_rate * (r.t - first.t) + floor && !v.offending_row) v.offending_row = j;
  }
  v.pass = v.entries_valid && !v.offending_row;
  return v;
}

EnsembleVerdict energy_audit_ensemble(const std::vector<EnergyLedger>& ledgers) {
  EnsembleVerdict v;
  v.samples = ledgers.size();
  if (ledgers.empty()) return v;
  const std::size_t rows = ledgers.front().rows.size();
  std::vector<double> drift(ledgers.size());
  for (std::size_t j = 0; j < rows; ++j) {
    for (std::size_t s = 0; s < ledgers.size(); ++s)
      drift[s] = ledgers[s].rows.at(j).audited - ledgers[s].rows.front().audited;
    v.times.push_back(ledgers.front().rows[j].t);
    v.mean_drift.push_back(mean(drift));
    v.std_error.push_back(standard_error(drift));
    const double se = v.std_error.back();
    const double z = se > 0.0 ? std::abs(v.mean_drift.back()) / se : (v.mean_drift.back() == 0.0 ? 0.0 : INFINITY);
    v.max_z_score = std::max(v.max_z_score, z);
    v.final_z_score = z;
  }
  v.pass = v.final_z_score <= 1.96;
  return v;
}

EnvelopeSummary high_order_envelope(const std::vector<VectorField>& u, double dt, int order) {
  if (order < 1 || order > 3) throw ConfigError("envelope order must be 1, 2 or 3");
  EnvelopeSummary e;
  e.order = order;
  if (u.empty()) return e;
  double integral = 0.0;
  double sup_sq = 0.0;
  double h_prev = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double n = gradient_power_norm(u[j], order);
    const double h = std::pow(gradient_power_norm(u[j], order + 1), 2);
    if (j > 0) integral += 0.5 * (h_prev + h) * dt;
    h_prev = h;
    e.norms.push_back(n);
    sup_sq = std::max(sup_sq, n * n);
    e.finite = e.finite && std::isfinite(n) && std::isfinite(h);
    if (j > 0 && n > e.norms[j - 1] * (1.0 + 1e-12)) e.norms_non_increasing = false;
    e.fitted_constant.push_back(sup_sq + integral);
  }
  e.initial = e.norms.front();
  e.sup = std::sqrt(sup_sq);
  e.integral = integral;
  const double scale = e.initial > 0.0 ? e.initial * e.initial : 1.0;
  for (auto& c : e.fitted_constant) c /= scale;
  for (std::size_t j = 1; j < e.fitted_constant.size(); ++j)
    if (e.fitted_constant[j] < e.fitted_constant[j - 1]) e.constant_monotone = false;
  return e;
}

std::string ledger_csv(const EnergyLedger& ledger) {
  std::ostringstream os;
  os.precision(17);
  os << "t,kinetic,dissipation,noise_input,martingale,cumulative_dissipation,cumulative_noise,audited\n";
  for (const auto& r : ledger.rows)
    os << r.t << ',' << r.kinetic << ',' << r.dissipation_increment << ',' << r.noise_increment << ','
       << r.martingale_increment << ',' << r.cumulative_dissipation << ',' << r.cumulative_noise << ',' << r.audited
       << '\n';
  return os.str();
}

nlohmann::json to_json(const EnergyVerdict& v) {
  nlohmann::json j = {{"pass", v.pass},
                      {"tolerance_rate", v.tolerance_rate},
                      {"worst_rate", v.worst_rate},
                      {"kinetic_non_increasing", v.kinetic_non_increasing},
                      {"entries_valid", v.entries_valid}};
  j["offending_row"] = v.offending_row ? nlohmann::json(*v.offending_row) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const EnsembleVerdict& v) {
  return {{"pass", v.pass},
          {"samples", v.samples},
          {"final_mean_drift", v.mean_drift.empty() ? 0.0 : v.mean_drift.back()},
          {"final_std_error", v.std_error.empty() ? 0.0 : v.std_error.back()},
          {"final_z_score", v.final_z_score},
          {"max_z_score", v.max_z_score}};
}

}  // namespace mildns
