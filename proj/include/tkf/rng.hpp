#pragma once

#include <cmath>
#include <cstdint>

namespace tkf {

// Philox4x32-10 counter-based generator (Salmon et al. constants).
// Key = the 64-bit seed; counter = [block_lo, block_hi, replicate, stream].
// A (seed, stream, replicate) triple fully determines the draw sequence, so
// replicate-partitioned parallel runs match serial runs draw for draw.
class Philox {
 public:
  Philox(std::uint64_t seed, std::uint32_t stream, std::uint32_t replicate)
      : key0_{static_cast<std::uint32_t>(seed)},
        key1_{static_cast<std::uint32_t>(seed >> 32)},
        replicate_{replicate},
        stream_{stream} {}

  std::uint32_t next_u32() {
    if (have_ == 0) refill();
    return buf_[--have_];
  }

  // Jump directly to a 128-bit counter block; discards buffered draws.
  void seek(std::uint64_t block) {
    block_ = block;
    have_ = 0;
  }

  std::uint64_t next_u64() {
    std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // Strictly inside (0,1); safe as a log() argument.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double exponential(double rate) { return -std::log(uniform01()) / rate; }

  bool bernoulli(double p) { return uniform01() < p; }

  // Geometric on {0,1,...} with P(K >= k) = ratio^k, parameterized by
  // ln(ratio) <= 0 so callers can supply a cancellation-safe log.
  std::int64_t geometric(double ln_ratio) {
    if (ln_ratio == 0.0) return 0;  // degenerate ratio 1 never requested
    double v = std::log(uniform01()) / ln_ratio;
    return static_cast<std::int64_t>(v);  // v >= 0
  }

 private:
  static void round_once(std::uint32_t c[4], const std::uint32_t k[2]) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    std::uint64_t p0 = static_cast<std::uint64_t>(M0) * c[0];
    std::uint64_t p1 = static_cast<std::uint64_t>(M1) * c[2];
    std::uint32_t lo0 = static_cast<std::uint32_t>(p0), hi0 = static_cast<std::uint32_t>(p0 >> 32);
    std::uint32_t lo1 = static_cast<std::uint32_t>(p1), hi1 = static_cast<std::uint32_t>(p1 >> 32);
    std::uint32_t r0 = hi1 ^ c[1] ^ k[0];
    std::uint32_t r1 = lo1;
    std::uint32_t r2 = hi0 ^ c[3] ^ k[1];
    std::uint32_t r3 = lo0;
    c[0] = r0; c[1] = r1; c[2] = r2; c[3] = r3;
  }

  void refill() {
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    std::uint32_t c[4] = {static_cast<std::uint32_t>(block_),
                          static_cast<std::uint32_t>(block_ >> 32),
                          replicate_, stream_};
    std::uint32_t k[2] = {key0_, key1_};
    for (int i = 0; i < 10; ++i) {
      round_once(c, k);
      if (i < 9) { k[0] += W0; k[1] += W1; }
    }
    // Served in index order via buf_[--have_].
    buf_[3] = c[0]; buf_[2] = c[1]; buf_[1] = c[2]; buf_[0] = c[3];
    have_ = 4;
    ++block_;
  }

  std::uint32_t key0_, key1_;
  std::uint32_t replicate_, stream_;
  std::uint64_t block_ = 0;
  std::uint32_t buf_[4] = {};
  int have_ = 0;
};

}  // namespace tkf
