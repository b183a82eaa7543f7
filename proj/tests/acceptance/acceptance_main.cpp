// Runs AC1..AC11 and prints one line per criterion; exits 1 if any fails.
#include <cstdio>
#include <string>

#include "mildns/verify.hpp"

int main(int argc, char** argv) {
  const std::string filter = argc > 1 ? argv[1] : "";
  std::vector<mildns::CheckResult> results;
  for (const auto& check : mildns::filter_checks(mildns::acceptance_checks(), filter)) {
    results.push_back(mildns::run_check(check));
    const auto& r = results.back();
    std::printf("%-4s %s  %s (%.1fs)\n     %s\n", r.id.c_str(), r.pass ? "PASS" : "FAIL", r.title.c_str(), r.seconds,
                r.detail.c_str());
    std::fflush(stdout);
  }
  int failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  std::printf("%zu/%zu acceptance criteria passed\n", results.size() - failed, results.size());
  return failed == 0 ? 0 : 1;
}
