#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mildns/errors.hpp"
#include "mildns/harness.hpp"
#include "mildns/stats.hpp"
#include "mildns/verify.hpp"

namespace fs = std::filesystem;
using namespace mildns;

namespace {

RunConfig configured(const fs::path& path, const std::vector<std::string>& overrides) {
  auto cfg = load_run_config(path);
  for (const auto& o : overrides) cfg.set_override(o);
  return cfg;
}

int cmd_run(const fs::path& config, const std::vector<std::string>& overrides, const fs::path& out) {
  const auto outcome = run_to_directory(configured(config, overrides), out);
  const auto& r = outcome.report;
  std::printf("%s: %zu window(s), energy %s, %s\n", out.string().c_str(), r["windows"].size(),
              r["energy"]["mode"].get<std::string>().c_str(), outcome.exit_code == kExitPass ? "pass" : "FAIL");
  return outcome.exit_code;
}

int cmd_sweep(const fs::path& config, const std::vector<std::string>& overrides, const fs::path& out) {
  const auto outcome = run_sweep(configured(config, overrides), out);
  std::fputs(outcome.summary_csv.c_str(), stdout);
  return outcome.exit_code;
}

int cmd_verify(bool properties_only, bool acceptance_only, const std::string& filter) {
  std::vector<Check> checks;
  if (!acceptance_only) checks = property_checks();
  if (!properties_only)
    for (auto& c : acceptance_checks()) checks.push_back(std::move(c));
  checks = filter_checks(std::move(checks), filter);
  if (checks.empty()) throw ConfigError("no check matches '" + filter + "'");
  std::vector<CheckResult> results;
  for (const auto& c : checks) {
    results.push_back(run_check(c));
    std::fputs(format_result(results.back()).c_str(), stdout);
    std::fflush(stdout);
  }
  const auto table = format_results(results);
  std::fputs(table.substr(table.rfind('\n', table.size() - 2) + 1).c_str(), stdout);
  for (const auto& r : results)
    if (!r.pass) return kExitVerifyFail;
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral stochastic inhomogeneous Navier-Stokes simulator and verification harness"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  unsigned workers = 0;
  app.add_option("--workers", workers, "worker threads for samples and sweep cells (0: hardware)");

  fs::path config, out;
  std::vector<std::string> overrides;
  auto* run = app.add_subcommand("run", "march one configuration and write its outputs");
  run->add_option("config", config, "config file or manifest.json")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--out", out, "output directory")->required();
  run->add_option("--set", overrides, "override one key: section.key=value");

  auto* sweep = app.add_subcommand("sweep", "run every cell of the [sweep] grid");
  sweep->add_option("config", config, "config file with a [sweep] section")->required()->check(CLI::ExistingFile);
  sweep->add_option("-o,--out", out, "output directory")->required();
  sweep->add_option("--set", overrides, "override one key: section.key=value");

  bool properties_only = false, acceptance_only = false;
  std::string filter;
  auto* verify = app.add_subcommand("verify", "run the property and acceptance checks");
  verify->add_flag("--properties", properties_only, "property checks only");
  verify->add_flag("--acceptance", acceptance_only, "acceptance criteria only");
  verify->add_option("--filter", filter, "keep checks whose id or operation contains this text");

  std::vector<fs::path> paths;
  auto* report = app.add_subcommand("report", "tabulate the manifests found under the given paths");
  report->add_option("paths", paths, "run directories, sweep directories or manifest files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }
  set_worker_limit(workers);

  try {
    if (*run) return cmd_run(config, overrides, out);
    if (*sweep) return cmd_sweep(config, overrides, out);
    if (*verify) return cmd_verify(properties_only, acceptance_only, filter);
    std::fputs(manifest_table(paths).c_str(), stdout);
    return kExitPass;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  }
}
