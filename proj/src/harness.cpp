#include "mildns/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "mildns/energy.hpp"
#include "mildns/errors.hpp"
#include "mildns/stats.hpp"

namespace mildns {
namespace fs = std::filesystem;
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json level_json(const LevelRecord& r) {
  nlohmann::json j = {{"level", r.level},
                      {"distance", r.distance},
                      {"v_distance", r.v_distance},
                      {"z_distance", r.z_distance}};
  j["ratio"] = r.ratio ? nlohmann::json(*r.ratio) : nlohmann::json(nullptr);
  if (r.a_distance) {
    j["a_distance"] = *r.a_distance;
    j["a_bound"] = *r.a_bound;
    j["implied_M"] = *r.implied_M;
  }
  return j;
}

nlohmann::json window_json(const WindowReport& w, WindowMode mode) {
  const auto& c = w.contraction;
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& l : c.levels) levels.push_back(level_json(l));
  nlohmann::json j = {{"index", w.index},
                      {"t_start", w.t_start},
                      {"length", w.length},
                      {"steps", w.steps},
                      {"seam_jump", w.seam_jump},
                      {"K0", c.constants.K0},
                      {"a0_w2p", c.constants.a0_w2p},
                      {"u0_w2p", c.constants.u0_w2p},
                      {"C5", c.constants.C5},
                      {"C6", c.constants.C6},
                      {"alpha_at_window", c.alpha_bound},
                      {"alpha_terms",
                       {{"leading", c.alpha_parts.leading},
                        {"viscous", c.alpha_parts.viscous},
                        {"quadratic", c.alpha_parts.quadratic}}},
                      {"converged", c.converged},
                      {"contraction_pass", c.contraction_pass},
                      {"a_bound_pass", c.a_bound_pass},
                      {"max_ratio", c.max_ratio},
                      {"duhamel_residual", c.duhamel_residual},
                      {"levels", levels},
                      {"warnings", c.warnings}};
  if (mode == WindowMode::auto_formula) {
    j["selection"] = {{"alpha_root", w.selection.alpha_root},
                      {"t0_root", w.selection.t0_root},
                      {"window", w.selection.window},
                      {"binding", w.selection.binding},
                      {"beta_at_window", w.selection.beta_at_window}};
  }
  return j;
}

std::string ensemble_csv(const EnsembleVerdict& v) {
  std::ostringstream os;
  os.precision(17);
  os << "t,mean_drift,std_error\n";
  for (std::size_t j = 0; j < v.times.size(); ++j) os << v.times[j] << ',' << v.mean_drift[j] << ',' << v.std_error[j] << '\n';
  return os.str();
}

bool is_constant(const ScalarField& a) { return a.min() == a.max(); }

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InputError*>(&e) ||
      dynamic_cast<const DomainError*>(&e))
    return kExitConfig;
  if (dynamic_cast<const BlowupError*>(&e) || dynamic_cast<const NumericalError*>(&e) ||
      dynamic_cast<const DivergenceError*>(&e) || dynamic_cast<const MarchError*>(&e) ||
      dynamic_cast<const DensityBandError*>(&e))
    return kExitBlowup;
  return kExitVerifyFail;
}

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot write " + tmp.string());
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw ConfigError("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string file_digest(const fs::path& path) { return fnv1a_hex(read_file(path)); }

RunOutcome run_to_directory(const RunConfig& cfg, const fs::path& dir) {
  const auto t_start = Clock::now();
  cfg.validate();
  const auto solver = cfg.solver();
  const auto grid = cfg.grid();
  const auto init = cfg.initial(grid);
  const auto noise = cfg.noise(grid);
  const double total = cfg.total_time();
  const int samples = cfg.samples();
  const int total_steps = solver.steps_for(total);
  fs::create_directories(dir);

  std::vector<std::optional<MarchResult>> marches(static_cast<std::size_t>(samples));
  std::vector<std::optional<EnergyLedger>> ledgers(static_cast<std::size_t>(samples));
  const auto t_march = Clock::now();
  parallel_for(static_cast<std::size_t>(samples), [&](std::size_t s) {
    auto m = global_march(solver, init, noise, total, static_cast<std::uint32_t>(s));
    if (!all_finite(m.u.back())) throw BlowupError("non-finite velocity at the end of the march", total_steps);
    const WienerPath path = noise.modes() > 0
                                ? sample_increments(noise, total_steps, solver.dt, static_cast<std::uint32_t>(s))
                                : WienerPath{solver.dt, total_steps, 0, {}};
    ledgers[s] = energy_ledger(m.u, m.a, solver.dt, solver.mu, solver.rho_bar, &noise, &path);
    // Only sample 0 keeps its fields; the others contribute ledgers.
    if (s != 0) {
      m.u.clear();
      m.a.clear();
    }
    marches[s] = std::move(m);
  });
  const double march_seconds = seconds_since(t_march);
  const auto& first = *marches.front();

  nlohmann::json report;
  report["config_hash"] = cfg.hash();
  report["grid"] = grid->describe();
  report["samples"] = samples;
  report["total_time"] = total;
  report["steps"] = total_steps;

  bool pass = true;
  nlohmann::json windows = nlohmann::json::array();
  std::size_t window_count = 0;
  for (const auto& m : marches) {
    for (const auto& w : m->windows) {
      pass = pass && w.contraction.converged && w.contraction.contraction_pass;
      ++window_count;
    }
  }
  for (const auto& w : first.windows) windows.push_back(window_json(w, solver.window_mode));
  report["windows"] = windows;
  report["window_count_all_samples"] = window_count;
  report["max_seam_jump"] = first.max_seam_jump;

  const std::string energy_text = ledger_csv(*ledgers.front());
  const bool deterministic = noise.zero();
  nlohmann::json energy;
  bool ensemble_written = false;
  if (deterministic && is_constant(init.a0)) {
    const auto v = energy_audit(*ledgers.front());
    energy = to_json(v);
    energy["mode"] = "deterministic";
    pass = pass && v.pass;
  } else if (!deterministic && samples > 1 && is_constant(init.a0)) {
    std::vector<EnergyLedger> all;
    for (auto& l : ledgers) all.push_back(std::move(*l));
    const auto v = energy_audit_ensemble(all);
    energy = to_json(v);
    energy["mode"] = "ensemble";
    pass = pass && v.pass;
    write_atomic(dir / "energy_ensemble.csv", ensemble_csv(v));
    ensemble_written = true;
  } else {
    energy["mode"] = "recorded";
    energy["reason"] = deterministic ? "variable density: the ledger is recorded, not audited"
                                     : "a single stochastic sample cannot be audited in expectation";
  }
  report["energy"] = energy;

  nlohmann::json envelopes = nlohmann::json::array();
  for (int k = 1; k <= 3; ++k) {
    const auto e = high_order_envelope(first.u, solver.dt, k);
    envelopes.push_back({{"order", k},
                         {"initial", e.initial},
                         {"sup", e.sup},
                         {"integral", e.integral},
                         {"final_constant", e.fitted_constant.empty() ? 0.0 : e.fitted_constant.back()},
                         {"finite", e.finite},
                         {"constant_monotone", e.constant_monotone}});
  }
  report["envelopes"] = envelopes;
  report["pass"] = pass;

  std::vector<std::string> outputs = {"timeseries.csv", "energy.csv"};
  if (ensemble_written) outputs.push_back("energy_ensemble.csv");
  outputs.push_back("report.json");
  write_atomic(dir / "timeseries.csv", series_csv(first.series));
  write_atomic(dir / "energy.csv", energy_text);
  write_atomic(dir / "report.json", report.dump(2) + "\n");

  nlohmann::json files = nlohmann::json::array();
  for (const auto& name : outputs)
    files.push_back({{"file", name}, {"bytes", fs::file_size(dir / name)}, {"fnv1a64", file_digest(dir / name)}});
  nlohmann::json manifest = {{"tool", "mildns"},
                             {"version", kVersion},
                             {"config_hash", cfg.hash()},
                             {"seed", cfg.seed()},
                             {"grid", grid->describe()},
                             {"samples", samples},
                             {"timings", {{"march_seconds", march_seconds}, {"total_seconds", seconds_since(t_start)}}},
                             {"outputs", files},
                             {"pass", pass},
                             {"config", cfg.normalized()}};
  write_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
  return RunOutcome{pass ? kExitPass : kExitVerifyFail, std::move(report), std::move(manifest)};
}

RunConfig load_run_config(const fs::path& path) {
  if (path.extension() == ".json") {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("cannot parse manifest " + path.string() + ": " + e.what());
    }
    if (!j.contains("config") || !j["config"].is_string())
      throw ConfigError("manifest " + path.string() + " has no config text");
    auto cfg = RunConfig::parse(j["config"].get<std::string>());
    cfg.set_base_directory(path.parent_path());
    return cfg;
  }
  return RunConfig::load(path);
}

SweepOutcome run_sweep(const RunConfig& cfg, const fs::path& dir) {
  const auto cells = cfg.sweep_cells();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    try {
      cells[i].first.validate();
    } catch (const ConfigError& e) {
      std::string where;
      for (const auto& a : cells[i].second) where += (where.empty() ? "" : ", ") + a;
      throw ConfigError("sweep cell " + std::to_string(i) + " (" + where + "): " + e.what());
    }
  }
  fs::create_directories(dir);

  SweepOutcome out;
  std::vector<std::string> rows(cells.size());
  std::vector<int> codes(cells.size(), kExitPass);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "cell_%03zu", i);
    out.cells.push_back(dir / name);
  }
  // Cells run one after another; each march parallelizes over its own samples.
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::string assigned;
    for (const auto& a : cells[i].second) assigned += (assigned.empty() ? "" : " ") + a;
    std::ostringstream row;
    row.precision(10);
    row << out.cells[i].filename().string() << ",\"" << assigned << "\"," << cells[i].first.hash() << ',';
    try {
      const auto r = run_to_directory(cells[i].first, out.cells[i]);
      codes[i] = r.exit_code;
      const auto& w = r.report["windows"];
      double max_ratio = 0.0, residual = 0.0;
      for (const auto& x : w) {
        max_ratio = std::max(max_ratio, x["max_ratio"].get<double>());
        residual = std::max(residual, x["duhamel_residual"].get<double>());
      }
      row << r.exit_code << ',' << w.size() << ',' << max_ratio << ',' << residual << ','
          << (r.report["pass"].get<bool>() ? "pass" : "fail");
    } catch (const std::exception& e) {
      codes[i] = exit_code_for(e);
      row << codes[i] << ",0,,," << "error";
    }
    rows[i] = row.str();
  }
  std::ostringstream summary;
  summary << "cell,assignments,config_hash,exit_code,windows,max_ratio,duhamel_residual,verdict\n";
  for (const auto& r : rows) summary << r << '\n';
  out.summary_csv = summary.str();
  write_atomic(dir / "summary.csv", out.summary_csv);
  out.exit_code = *std::max_element(codes.begin(), codes.end());
  return out;
}

std::string manifest_table(const std::vector<fs::path>& paths) {
  std::vector<fs::path> manifests;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      for (const auto& e : fs::recursive_directory_iterator(p))
        if (e.is_regular_file() && e.path().filename() == "manifest.json") manifests.push_back(e.path());
    } else if (fs::is_regular_file(p)) {
      manifests.push_back(p);
    } else {
      throw InputError("no such manifest or directory: " + p.string());
    }
  }
  std::sort(manifests.begin(), manifests.end());

  std::ostringstream os;
  os << "run,config_hash,grid,samples,windows,max_ratio,energy,verdict,seconds\n";
  for (const auto& m : manifests) {
    const auto man = nlohmann::json::parse(read_file(m));
    const auto dir = m.parent_path();
    nlohmann::json rep = nlohmann::json::object();
    if (fs::exists(dir / "report.json")) rep = nlohmann::json::parse(read_file(dir / "report.json"));
    double max_ratio = 0.0;
    std::size_t windows = 0;
    if (rep.contains("windows")) {
      windows = rep["windows"].size();
      for (const auto& w : rep["windows"]) max_ratio = std::max(max_ratio, w["max_ratio"].get<double>());
    }
    std::string energy = "-";
    if (rep.contains("energy")) {
      energy = rep["energy"].value("mode", "-");
      if (rep["energy"].contains("pass")) energy += rep["energy"]["pass"].get<bool>() ? ":pass" : ":fail";
    }
    os << dir.string() << ',' << man.value("config_hash", "") << ',' << man.value("grid", "") << ','
       << man.value("samples", 0) << ',' << windows << ',' << max_ratio << ',' << energy << ','
       << (man.value("pass", false) ? "pass" : "fail") << ','
       << man["timings"].value("total_seconds", 0.0) << '\n';
  }
  return os.str();
}

}  // namespace mildns
