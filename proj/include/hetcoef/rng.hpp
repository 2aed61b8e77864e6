#ifndef HETCOEF_RNG_HPP_
#define HETCOEF_RNG_HPP_

#include <array>
#include <cstdint>
#include <vector>

namespace hetcoef {

// Philox4x32-10 counter-based generator (Salmon, Moraes, Dror, Shaw, 2011).
// The key is derived from the seed and the stream id occupies the high
// counter words, so (seed, stream) pairs index statistically independent
// sequences without any shared state. Draws are reproducible bit-for-bit
// for a given (seed, stream).
class Philox {
 public:
  explicit Philox(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on [0,1) with 53 random bits.
  double uniform();
  // Uniform strictly inside (0,1); safe as a log or quantile argument.
  double uniform_open();
  // Standard normal via Box-Muller; one spare value is cached.
  double normal();
  // Index draw from a probability vector that sums to one.
  int categorical(const std::vector<double>& probs);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> ctr_;
  std::array<std::uint32_t, 4> buf_{};
  int buf_pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hetcoef

#endif  // HETCOEF_RNG_HPP_
