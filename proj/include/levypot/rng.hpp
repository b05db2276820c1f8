#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

namespace levypot {

/// Philox4x32-10 counter-based block cipher (Salmon et al., Random123).
/// Maps a 128-bit counter and a 64-bit key to 128 random bits.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter encrypt(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// FNV-1a, used to turn experiment names into stream identifiers.
inline std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Identifies an independent family of random streams: (seed, stream id).
/// Individual samples inside the family are addressed by a substream index.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  [[nodiscard]] StreamKey derive(std::uint64_t child) const {
    return {seed, splitmix64(stream ^ splitmix64(child + 0x632BE59BD9B4E019ull))};
  }
  [[nodiscard]] StreamKey derive(std::string_view label) const { return derive(fnv1a(label)); }

  [[nodiscard]] Philox4x32::Key cipher_key() const {
    const std::uint64_t k = splitmix64(seed ^ splitmix64(stream));
    return {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  }
};

/// Random stream for one sample path. Satisfies UniformRandomBitGenerator, so the
/// standard distributions can be driven from it; the draw sequence depends only
/// on (key, substream), never on scheduling.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(const StreamKey& key, std::uint64_t substream)
      : key_(key.cipher_key()),
        substream_lo_(static_cast<std::uint32_t>(substream)),
        substream_hi_(static_cast<std::uint32_t>(substream >> 32)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (cursor_ == 2) refill();
    return buffer_[cursor_++];
  }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }
  double normal() { return normal_(*this); }
  double exponential(double rate) { return -std::log(uniform()) / rate; }
  long poisson(double mean) {
    if (mean <= 0.0) return 0;
    std::poisson_distribution<long> dist(mean);
    return dist(*this);
  }

  [[nodiscard]] std::uint64_t blocks_used() const { return block_; }

 private:
  void refill() {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_),
                                  static_cast<std::uint32_t>(block_ >> 32), substream_lo_,
                                  substream_hi_};
    const auto out = Philox4x32::encrypt(ctr, key_);
    buffer_[0] = (std::uint64_t{out[1]} << 32) | out[0];
    buffer_[1] = (std::uint64_t{out[3]} << 32) | out[2];
    ++block_;
    cursor_ = 0;
  }

  Philox4x32::Key key_;
  std::uint32_t substream_lo_;
  std::uint32_t substream_hi_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int cursor_ = 2;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Identifier reported in run records.
inline constexpr std::string_view kRngAlgorithm = "philox4x32-10/splitmix64-key";

}  // namespace levypot
