#include "fft.hpp"

#include <mutex>
#include <vector>

namespace mildns {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }
fftw_complex* as_fftw(const Complex* p) {
  // FFTW's new-array execute does not write to the input of an out-of-place plan.
  return reinterpret_cast<fftw_complex*>(const_cast<Complex*>(p));
}

}  // namespace

FftPlans::FftPlans(std::span<const int> dims) {
  std::size_t n = 1;
  for (int d : dims) n *= static_cast<std::size_t>(d);
  std::vector<Complex> in(n), out(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(planner_mutex());
  forward_ = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), as_fftw(in.data()),
                           as_fftw(out.data()), FFTW_FORWARD, flags);
  backward_ = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), as_fftw(in.data()),
                            as_fftw(out.data()), FFTW_BACKWARD, flags);
}

FftPlans::~FftPlans() {
  std::lock_guard lock(planner_mutex());
  if (forward_) fftw_destroy_plan(forward_);
  if (backward_) fftw_destroy_plan(backward_);
}

void FftPlans::forward(const Complex* in, Complex* out) const {
  fftw_execute_dft(forward_, as_fftw(in), as_fftw(out));
}

void FftPlans::backward(const Complex* in, Complex* out) const {
  fftw_execute_dft(backward_, as_fftw(in), as_fftw(out));
}

}  // namespace mildns
