#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "decaywatch/errors.hpp"

namespace decaywatch {

// Philox4x32-10 counter-based generator (Salmon, Moraes, Dror, Shaw 2011).
//
// A keyed bijection of a 128-bit counter: no generator state has to be
// carried between draws, so any (key, stream, block) triple can be evaluated
// out of order.  That is what makes ensemble runs reproducible independent of
// thread count: trial i always reads the same substream no matter which
// worker executes it.
struct Philox4x32 {
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }
};

// splitmix64 finalizer; used to derive independent keys for different
// purposes (trajectory draws, oracle draws, reservoir priorities) from one
// master seed.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_key(std::uint64_t master_seed, std::uint64_t domain) {
  return mix64(master_seed ^ mix64(domain));
}

// Domain tags for derive_key.  run_ensemble trajectories use the master seed
// directly; everything else gets its own key space.
inline constexpr std::uint64_t kDomainGillespie = 1;
inline constexpr std::uint64_t kDomainReservoir = 2;

// Stream of doubles in the open interval (0,1), indexed by (key, stream_id).
// Each Philox block yields two doubles.  The +0.5 offset keeps the mapped
// value strictly inside (0,1): 0 and 1 are never produced.
class UniformStream {
 public:
  UniformStream(std::uint64_t key, std::uint64_t stream_id)
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
        stream_id_(stream_id) {}

  double operator()() {
    if (have_buffered_) {
      have_buffered_ = false;
      return buffered_;
    }
    const auto words = Philox4x32::block(
        {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
         static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)},
        key_);
    ++block_;
    buffered_ = to_unit_interval(words[2], words[3]);
    have_buffered_ = true;
    return to_unit_interval(words[0], words[1]);
  }

 private:
  static double to_unit_interval(std::uint32_t lo, std::uint32_t hi) {
    const std::uint64_t bits = (std::uint64_t{hi} << 32) | lo;
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_id_ = 0;
  std::uint64_t block_ = 0;
  double buffered_ = 0.0;
  bool have_buffered_ = false;
};

// Fixed, finite uniform source for forcing specific trajectories in tests.
// Throws once exhausted, which is how stream-contract violations surface.
class FixedStream {
 public:
  explicit FixedStream(std::vector<double> values) : values_(std::move(values)) {}

  double operator()() {
    if (next_ >= values_.size()) {
      throw StreamExhaustedError("uniform stream exhausted after " +
                                 std::to_string(values_.size()) + " draws");
    }
    return values_[next_++];
  }

  std::size_t consumed() const { return next_; }

 private:
  std::vector<double> values_;
  std::size_t next_ = 0;
};

}  // namespace decaywatch
