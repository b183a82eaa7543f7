#include <filesystem>
#include <set>
#include <string>

#include <gtest/gtest.h>
#include <unistd.h>

#include "mildns/config.hpp"
#include "mildns/errors.hpp"
#include "mildns/harness.hpp"
#include "mildns/verify.hpp"

namespace mildns {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& tag) {
  const auto d = fs::temp_directory_path() / ("mildns-unit-" + tag + "-" + std::to_string(::getpid()));
  fs::remove_all(d);
  return d;
}

constexpr const char* kSmallRun = "[grid]\nresolution = 8\n[time]\nT = 0.01\ndt = 0.001\n[initial]\namplitude = 0.1\n";

TEST(Config, NormalizedFormIsCanonical) {
  const auto a = RunConfig::parse("[time]\ndt = 0.01\nT = 0.02\n[grid]\nresolution = 8\n");
  const auto b = RunConfig::parse("# comment\n[grid]\nresolution=8\n\n[time]\nT=0.02\ndt=0.01\n");
  EXPECT_EQ(a.normalized(), b.normalized());
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  EXPECT_EQ(RunConfig::parse(a.normalized()).normalized(), a.normalized());
}

TEST(Config, OverridesAndErrors) {
  auto c = RunConfig::parse(kSmallRun);
  c.set_override("physics.mu=0.5");
  EXPECT_EQ(c.get("physics", "mu"), "0.5");
  EXPECT_THROW(c.set_override("physics.nu=1"), ConfigError);
  EXPECT_THROW(c.set_override("no-equals-sign"), ConfigError);
  EXPECT_THROW(RunConfig::parse("[noise]\npreset = gaussian\n").validate(), ConfigError);
  EXPECT_THROW(RunConfig::parse("[time]\nT = 0.1\ndt = 0.03\n").validate(), ConfigError);
  EXPECT_THROW(RunConfig::parse("[grid]\nresolution = 7\n").validate(), ConfigError);
}

TEST(Config, SweepCellsAreTheCartesianProduct) {
  const auto c = RunConfig::parse(std::string(kSmallRun) + "[sweep]\nlp.p = 3, 4\nphysics.mu = 0.1, 0.2, 0.3\n");
  const auto cells = c.sweep_cells();
  ASSERT_EQ(cells.size(), 6u);
  std::set<std::string> hashes;
  for (const auto& [cell, assignments] : cells) {
    EXPECT_EQ(assignments.size(), 2u);
    hashes.insert(cell.hash());
  }
  EXPECT_EQ(hashes.size(), 6u);
}

TEST(Harness, ExitCodesFollowTheErrorKind) {
  EXPECT_EQ(exit_code_for(ConfigError("x")), kExitConfig);
  EXPECT_EQ(exit_code_for(DomainError("x")), kExitConfig);
  EXPECT_EQ(exit_code_for(BlowupError("x", 3)), kExitBlowup);
  EXPECT_EQ(exit_code_for(MarchError("x", 4.0)), kExitBlowup);
  EXPECT_EQ(exit_code_for(std::runtime_error("x")), kExitVerifyFail);
}

TEST(Harness, RunWritesExactlyTheManifestOutputs) {
  const auto dir = fresh_dir("run");
  const auto out = run_to_directory(RunConfig::parse(kSmallRun), dir);
  EXPECT_EQ(out.exit_code, kExitPass);
  std::set<std::string> listed{"manifest.json"}, present;
  for (const auto& f : out.manifest["outputs"]) {
    const auto name = f["file"].get<std::string>();
    listed.insert(name);
    EXPECT_EQ(f["fnv1a64"].get<std::string>(), file_digest(dir / name));
    EXPECT_EQ(f["bytes"].get<std::uintmax_t>(), fs::file_size(dir / name));
  }
  for (const auto& e : fs::directory_iterator(dir)) present.insert(e.path().filename().string());
  EXPECT_EQ(listed, present);
  EXPECT_EQ(out.manifest["config_hash"], RunConfig::parse(kSmallRun).hash());
  EXPECT_EQ(load_run_config(dir / "manifest.json").hash(), RunConfig::parse(kSmallRun).hash());
  fs::remove_all(dir);
}

TEST(Harness, ReportTabulatesManifests) {
  const auto dir = fresh_dir("report");
  (void)run_sweep(RunConfig::parse(std::string(kSmallRun) + "[sweep]\nlp.p = 3, 4\n"), dir);
  const auto table = manifest_table({dir});
  EXPECT_EQ(table.substr(0, table.find('\n')), "run,config_hash,grid,samples,windows,max_ratio,energy,verdict,seconds");
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 3);
  fs::remove_all(dir);
}

TEST(Harness, AtomicWriteLeavesNoTemporary) {
  const auto dir = fresh_dir("atomic");
  fs::create_directories(dir);
  write_atomic(dir / "a.txt", "one");
  write_atomic(dir / "a.txt", "two");
  EXPECT_EQ(read_file(dir / "a.txt"), "two");
  EXPECT_EQ(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}), 1);
  fs::remove_all(dir);
}

TEST(Verify, EveryOperationHasAPropertyCheck) {
  const std::vector<std::string> operations{
      "forward_transform", "laplacian_eigenvalue", "apply_laplacian", "inverse_laplacian", "inverse_sqrt_laplacian",
      "gradient", "divergence", "leray_project", "backtrack_foot", "advect_density", "sobolev_growth_diagnostic",
      "apply_semigroup", "dissipativity_check", "decay_probe", "gradient_commutation_check", "compute_C_Phi",
      "sample_increments", "stochastic_convolution_step", "ito_isometry_check", "moment_boundedness_check",
      "bilinear_term", "pressure_gradient", "picard_level", "compute_K0_and_alpha", "run_local", "global_march",
      "energy_audit", "high_order_envelope", "cli"};
  const auto checks = property_checks();
  for (const auto& op : operations) {
    bool found = false;
    for (const auto& c : checks) {
      std::size_t start = 0;
      while (!found && start <= c.op.size()) {
        const auto end = std::min(c.op.find('/', start), c.op.size());
        found = c.op.substr(start, end - start) == op;
        start = end + 1;
      }
    }
    EXPECT_TRUE(found) << op;
  }
}

TEST(Verify, FilterAndFailureReporting) {
  EXPECT_EQ(filter_checks(acceptance_checks(), "AC5").size(), 1u);
  const Check boom{"X1", "none", "throws", 0, []() -> Outcome { throw std::runtime_error("bad"); }};
  const auto r = run_check(boom);
  EXPECT_FALSE(r.pass);
  EXPECT_NE(r.detail.find("bad"), std::string::npos);
  const auto table = format_results({r});
  EXPECT_NE(table.find("0/1"), std::string::npos);
}

}  // namespace
}  // namespace mildns
