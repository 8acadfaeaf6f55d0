#include "stochblow/rng.hpp"

#include <cmath>

namespace stochblow {

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t path_index, std::uint64_t substream) {
  std::uint64_t state = master_seed;
  std::uint64_t key = splitmix64(state);
  state = key ^ (path_index * 0xD1B54A32D192ED03ULL);
  key = splitmix64(state);
  state = key ^ (substream * 0x8CB92BA72F3D8DD7ULL);
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state))};
  engine_.seed(seq);
}

double RngStream::uniform() {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::exponential(double rate) { return -std::log(uniform()) / rate; }

}  // namespace stochblow
