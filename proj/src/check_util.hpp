#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "mildns/fixed_point.hpp"
#include "mildns/norms.hpp"
#include "mildns/verify.hpp"

namespace mildns::detail {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline std::string sci(double x) {
  std::ostringstream os;
  os << std::setprecision(3) << std::scientific << x;
  return os.str();
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline double rel_l2(const ScalarField& a, const ScalarField& b) {
  const double n = l2_norm(b);
  return l2_norm(a - b) / (n > 0.0 ? n : 1.0);
}

inline double rel_l2(const VectorField& a, const VectorField& b) {
  const double n = l2_norm(b);
  return l2_norm(a - b) / (n > 0.0 ? n : 1.0);
}

/// cos or sin of 2 pi k.x on the grid.
inline ScalarField mode_field(const GridPtr& g, const WaveIndex& k, bool sine) {
  return ScalarField::from_function(g, [&](std::span<const double> x) {
    double phase = 0.0;
    for (int a = 0; a < k.dim(); ++a) phase += kTwoPi * k[a] * x[static_cast<std::size_t>(a)];
    return sine ? std::sin(phase) : std::cos(phase);
  });
}

inline SolverConfig base_config(double mu, double dt, double horizon) {
  SolverConfig c;
  c.mu = mu;
  c.dt = dt;
  c.horizon = horizon;
  return c;
}

inline VectorField constant_velocity(const GridPtr& g, std::vector<double> c) {
  std::vector<ScalarField> comps;
  for (int a = 0; a < g->dim(); ++a) comps.push_back(ScalarField::constant(g, c[static_cast<std::size_t>(a)]));
  return VectorField(std::move(comps), true);
}

inline VelocityHistory steady_history(const VectorField& u, double dt, int steps) {
  VelocityHistory h;
  h.dt = dt;
  h.samples.assign(static_cast<std::size_t>(steps + 1), u);
  return h;
}

/// Fresh per-process directory under the system temporary path.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  const auto d = std::filesystem::temp_directory_path() / ("mildns-" + tag + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

/// Accumulates measured quantities against limits; the first failure marks
/// the whole check failed but every measurement stays in the detail line.
class Tally {
 public:
  void at_most(const std::string& what, double value, double limit) {
    add(value <= limit, what + "=" + sci(value) + " (<= " + sci(limit) + ")");
  }
  void at_least(const std::string& what, double value, double limit) {
    add(value >= limit, what + "=" + sci(value) + " (>= " + sci(limit) + ")");
  }
  void within(const std::string& what, double value, double lo, double hi) {
    add(value >= lo && value <= hi, what + "=" + sci(value) + " (in [" + sci(lo) + ", " + sci(hi) + "])");
  }
  void require(const std::string& what, bool ok) { add(ok, what); }
  void info(const std::string& what, double value) { notes_.push_back(what + "=" + sci(value)); }
  void info(const std::string& text) { notes_.push_back(text); }

  Outcome finish() const {
    std::string d;
    for (const auto& n : notes_) d += (d.empty() ? "" : "; ") + n;
    return Outcome{pass_, d};
  }

 private:
  void add(bool ok, std::string note) {
    pass_ = pass_ && ok;
    notes_.push_back(ok ? std::move(note) : "FAIL " + note);
  }

  bool pass_ = true;
  std::vector<std::string> notes_;
};

/// Least-squares order of err ~ h^order.
inline double observed_order(const std::vector<double>& h, const std::vector<double>& err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace mildns::detail
