#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace mildns {

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// 32-bit FNV-1a hash; maps a substream name to its id.
std::uint32_t substream_id(std::string_view name);

/// Counter-based Gaussian/uniform source addressed by
/// (seed, stream, sample, step, slot). Draws depend only on their address, so
/// results are independent of evaluation order and worker partitioning.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint32_t stream, std::uint32_t sample);

  /// Two uniforms in (0,1) with 53-bit resolution.
  std::array<double, 2> uniform_pair(std::uint32_t step, std::uint32_t slot) const;
  /// Standard normal via Box-Muller on uniform_pair.
  double normal(std::uint32_t step, std::uint32_t slot) const;

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t stream_;
  std::uint32_t sample_;
};

/// Sequential wrapper: successive calls walk the step counter.
class SequentialRng {
 public:
  SequentialRng(std::uint64_t seed, std::uint32_t stream, std::uint32_t sample = 0)
      : rng_(seed, stream, sample) {}
  double uniform();
  double normal();

 private:
  CounterRng rng_;
  std::uint32_t next_ = 0;
};

}  // namespace mildns
