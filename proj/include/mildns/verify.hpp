#pragma once

#include <functional>
#include <string>
#include <vector>

namespace mildns {

struct Outcome {
  bool pass = false;
  std::string detail;
};

/// A named property or acceptance check. `op` names the operation it exercises;
/// a check fails when it exceeds its runtime budget (0 disables the budget).
struct Check {
  std::string id;
  std::string op;
  std::string title;
  double budget_seconds = 0.0;
  std::function<Outcome()> run;
};

struct CheckResult {
  std::string id;
  std::string op;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

/// One or more worked examples for every public operation.
std::vector<Check> property_checks();
/// The acceptance criteria AC1..AC11 with their pinned tolerances.
std::vector<Check> acceptance_checks();

/// Runs a check, converting escaped exceptions into failures.
CheckResult run_check(const Check& check);

/// One fixed-width row and its indented detail line.
std::string format_result(const CheckResult& r);

/// Fixed-width table, one line per result, and a closing tally line.
std::string format_results(const std::vector<CheckResult>& results);

/// Keeps checks whose id or op contains `filter` (empty keeps all).
std::vector<Check> filter_checks(std::vector<Check> checks, const std::string& filter);

}  // namespace mildns
