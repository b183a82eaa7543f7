#pragma once

#include <span>

#include <fftw3.h>

#include "mildns/grid.hpp"

namespace mildns {

// Complex-to-complex FFTW plans for one grid shape. Execution goes through the
// new-array interface and is safe to call concurrently; planning is serialized.
class FftPlans {
 public:
  explicit FftPlans(std::span<const int> dims);
  ~FftPlans();
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

  // Unnormalized in both directions.
  void forward(const Complex* in, Complex* out) const;
  void backward(const Complex* in, Complex* out) const;

 private:
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace mildns
