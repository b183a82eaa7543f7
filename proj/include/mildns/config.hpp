#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mildns/fixed_point.hpp"

namespace mildns {

/// Key/value run configuration with sections [grid] [physics] [lp] [time]
/// [noise] [initial] [picard] and the optional fan-out section [sweep].
///
/// Every key has a default; unknown keys and malformed values raise
/// ConfigError naming the key and its accepted values.
class RunConfig {
 public:
  RunConfig();

  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::filesystem::path& path);

  /// `section.key=value`.
  void set_override(const std::string& assignment);
  void set(const std::string& section, const std::string& key, const std::string& value);
  std::string get(const std::string& section, const std::string& key) const;

  /// Canonical text form: every known key in schema order, sweep last.
  std::string normalized() const;
  /// 64-bit FNV-1a of normalized() in hex.
  std::string hash() const;

  /// Typed views; each validates the whole configuration first.
  SolverConfig solver() const;
  GridPtr grid() const;
  InitialData initial(const GridPtr& grid) const;
  NoiseModel noise(const GridPtr& grid) const;
  double total_time() const;
  std::uint64_t seed() const;
  int samples() const;

  /// Throws ConfigError for any invalid value or violated hypothesis.
  void validate() const;

  /// Cartesian product of the [sweep] axes (section.key -> comma list); one
  /// config per cell, each with its assignments.
  std::vector<std::pair<RunConfig, std::vector<std::string>>> sweep_cells() const;

  /// Relative file paths in [initial] resolve against this directory.
  void set_base_directory(std::filesystem::path dir) { base_ = std::move(dir); }

 private:
  std::map<std::string, std::map<std::string, std::string>> values_;
  std::vector<std::pair<std::string, std::string>> sweep_;
  std::filesystem::path base_;
};

/// Accepted keys of one section, in schema order.
std::vector<std::string> config_keys(const std::string& section);
std::vector<std::string> config_sections();

}  // namespace mildns
