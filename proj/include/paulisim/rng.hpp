#pragma once

#include <array>
#include <cstdint>

namespace paulisim {

// Stream-id layout for CounterRng. Substreams are addressed structurally
// (domain, lane, index), never by hashing, so distinct sampling tasks can
// never collide: importance-sampling shards and shadow snapshots live in
// disjoint domains, and the lane separates e.g. the real and imaginary
// estimators of one run.
enum class RngDomain : std::uint8_t {
  kImportance = 1,
  kShadow = 2,
};

constexpr std::uint64_t rng_stream(RngDomain domain, std::uint8_t lane,
                                   std::uint64_t index) {
  return (static_cast<std::uint64_t>(domain) << 56) |
         (static_cast<std::uint64_t>(lane) << 48) |
         (index & ((std::uint64_t{1} << 48) - 1));
}

// Counter-based generator: Philox4x32-10. A (key, counter) pair maps through
// a fixed keyed bijection to four 32-bit words, so draws are addressable and
// substreams are free: the 64-bit stream id occupies half the counter block
// and the draw counter the other half. Two generators with the same seed and
// different streams are independent; the same (seed, stream) always yields
// the same sequence, on any platform and any thread.
//
// The implementation matches the published Random123 test vectors (see the
// unit tests for the frozen known-answer values).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  std::uint64_t seed_lo32_hi32() const {
    return key_[0] | (static_cast<std::uint64_t>(key_[1]) << 32);
  }
  std::uint64_t stream() const { return stream_; }

  std::uint32_t next_u32() {
    if (pos_ == 4) {
      fill_block();
    }
    return block_[pos_++];
  }

  std::uint64_t next_u64() {
    std::uint64_t lo = next_u32();
    return lo | (static_cast<std::uint64_t>(next_u32()) << 32);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound), unbiased via rejection. bound >= 1.
  std::uint32_t uniform_below(std::uint32_t bound) {
    std::uint32_t threshold = (-bound) % bound;
    for (;;) {
      std::uint32_t r = next_u32();
      if (r >= threshold) return r % bound;
    }
  }

  bool bernoulli(double p) { return next_double() < p; }

 private:
  void fill_block();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  unsigned pos_ = 4;
};

}  // namespace paulisim
