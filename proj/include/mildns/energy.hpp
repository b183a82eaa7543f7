#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mildns/noise.hpp"

namespace mildns {

struct EnergyRow {
  double t = 0.0;
  double kinetic = 0.0;                // int rho |u|^2 / 2
  double dissipation_increment = 0.0;  // mu int |grad u|^2 over the step ending at t (trapezoid)
  double noise_increment = 0.0;        // dt/2 int rho sum_k |Phi_k|^2
  double martingale_increment = 0.0;   // sum_k <rho u, Phi_k> dW_k
  double cumulative_dissipation = 0.0;
  double cumulative_noise = 0.0;
  double audited = 0.0;                // kinetic + cumulative_dissipation - cumulative_noise
};

struct EnergyLedger {
  std::vector<EnergyRow> rows;
  bool finite = true;
};

/// Ledger of a trajectory u_j, a_j at t_j = j dt. The noise columns stay zero
/// without a model; increments at row j+1 use the state at t_j.
EnergyLedger energy_ledger(const std::vector<VectorField>& u, const std::vector<ScalarField>& a, double dt, double mu,
                           double rho_bar, const NoiseModel* noise = nullptr, const WienerPath* path = nullptr);

struct EnergyVerdict {
  bool pass = false;
  double tolerance_rate = 0.0;       // 1e-6 E(0) per unit time
  double worst_rate = 0.0;           // max |audited(t) - audited(0)| / t
  std::optional<std::size_t> offending_row;
  bool kinetic_non_increasing = true;
  bool entries_valid = true;         // finite, kinetic >= 0, dissipation >= 0
};

/// Deterministic audit: |audited(t) - audited(0)| <= 1e-6 E(0) t for every row.
EnergyVerdict energy_audit(const EnergyLedger& ledger, double relative_rate = 1e-6);

struct EnsembleVerdict {
  std::vector<double> times;
  std::vector<double> mean_drift;   // mean over samples of audited(t) - audited(0)
  std::vector<double> std_error;
  double final_z_score = 0.0;
  double max_z_score = 0.0;
  std::size_t samples = 0;
  bool pass = false;                // final drift within the 95% interval of zero
};

EnsembleVerdict energy_audit_ensemble(const std::vector<EnergyLedger>& ledgers);

struct EnvelopeSummary {
  int order = 1;
  double initial = 0.0;              // ||grad^k u_0||_2
  double sup = 0.0;                  // sup_t ||grad^k u||_2
  double integral = 0.0;             // int_0^T ||grad^{k+1} u||_2^2
  std::vector<double> norms;         // ||grad^k u(t_j)||_2
  std::vector<double> fitted_constant;  // C(t_j)
  bool finite = true;
  bool constant_monotone = true;     // C(t) non-decreasing
  bool norms_non_increasing = true;
};

/// C(t) = (sup_{s<=t} ||grad^k u||^2 + int_0^t ||grad^{k+1} u||^2) / ||grad^k u_0||^2.
EnvelopeSummary high_order_envelope(const std::vector<VectorField>& u, double dt, int order);

std::string ledger_csv(const EnergyLedger& ledger);
nlohmann::json to_json(const EnergyVerdict& v);
nlohmann::json to_json(const EnsembleVerdict& v);

}  // namespace mildns
