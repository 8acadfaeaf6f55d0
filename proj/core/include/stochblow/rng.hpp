#pragma once

#include <cstdint>
#include <random>

namespace stochblow {

/// One step of SplitMix64; advances `state` and returns a well-mixed word.
constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Private random stream of one simulated path. Streams are derived from
/// (master seed, path index, substream) only, so an ensemble draws the same
/// numbers no matter how paths are scheduled across threads.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t path_index, std::uint64_t substream = 0);

  double normal() { return normal_(engine_); }
  /// Uniform on the open interval (0, 1).
  double uniform();
  double exponential(double rate);
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace stochblow
