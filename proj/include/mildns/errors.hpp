#pragma once

#include <stdexcept>
#include <string>

namespace mildns {

/// Invalid configuration: bad key, grid mismatch, violated hypothesis.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operator applied outside its domain (e.g. inverse Laplacian of a field with mean).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed input data such as a velocity history with gaps.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative solve failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// NaN or overflow in a time-stepping loop.
class BlowupError : public std::runtime_error {
 public:
  BlowupError(const std::string& what, int step) : std::runtime_error(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

/// Density left the configured band |a| <= 1/2.
class DensityBandError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Picard iteration stopped contracting.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Global time marching could not continue.
class MarchError : public std::runtime_error {
 public:
  MarchError(const std::string& what, double k0) : std::runtime_error(what), k0_(k0) {}
  double k0() const { return k0_; }

 private:
  double k0_;
};

}  // namespace mildns
