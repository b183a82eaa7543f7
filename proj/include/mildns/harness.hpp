#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mildns/config.hpp"

namespace mildns {

inline constexpr const char* kVersion = "0.1.0";

/// Process exit statuses shared by every subcommand.
enum ExitCode : int { kExitPass = 0, kExitVerifyFail = 1, kExitConfig = 2, kExitBlowup = 3 };

/// Maps an exception escaping a run to its exit status.
int exit_code_for(const std::exception& e);

/// Writes through a sibling temporary file and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);
/// 64-bit FNV-1a digest of a file's bytes, hex.
std::string file_digest(const std::filesystem::path& path);

struct RunOutcome {
  int exit_code = kExitPass;
  nlohmann::json report;
  nlohmann::json manifest;
};

/// Marches every configured sample and writes report.json, timeseries.csv,
/// energy.csv (plus energy_ensemble.csv for several samples) and finally
/// manifest.json into `dir`. report.json and the CSV files depend only on the
/// configuration; wall-clock timings live in the manifest.
/// Configuration problems and numerical failures propagate as exceptions.
RunOutcome run_to_directory(const RunConfig& cfg, const std::filesystem::path& dir);

/// Accepts a config file or a manifest.json written by run_to_directory.
RunConfig load_run_config(const std::filesystem::path& path);

struct SweepOutcome {
  int exit_code = kExitPass;
  std::vector<std::filesystem::path> cells;
  std::string summary_csv;
};

/// Validates every cell before running any, then runs them into
/// dir/cell_000, dir/cell_001, ... and writes dir/summary.csv.
SweepOutcome run_sweep(const RunConfig& cfg, const std::filesystem::path& dir);

/// One row per manifest found under the given paths (directories are searched
/// recursively), sorted by path.
std::string manifest_table(const std::vector<std::filesystem::path>& paths);

}  // namespace mildns
