#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace mildns {

double mean(std::span<const double> x);
/// Unbiased sample variance; 0 for fewer than two samples.
double variance(std::span<const double> x);
/// sqrt(variance / n).
double standard_error(std::span<const double> x);
/// Linear-interpolated quantile, q in [0,1].
double quantile(std::span<const double> x, double q);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double rms_residual = 0.0;
};

/// Ordinary least squares y ~ intercept + slope * x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);
/// Fit of log y against log x; entries must be positive.
LinearFit loglog_fit(std::span<const double> x, std::span<const double> y);

/// Runs body(i) for i in [0, count) on a bounded pool. Callers write results
/// into slot i so reductions can proceed in index order afterwards.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Worker cap for parallel_for; 0 restores the hardware default.
void set_worker_limit(unsigned workers);
unsigned worker_limit();

}  // namespace mildns
