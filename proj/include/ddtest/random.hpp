// Copyright 2026 The ddtest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

#include <boost/math/special_functions/erf.hpp>

namespace ddtest {

/// Philox4x32-10 counter-based block cipher (Salmon et al., Random123).
/// Maps a 128-bit counter and a 64-bit key to 128 pseudo-random bits.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) {
    for (int r = 0; r < 10; ++r) {
      if (r > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      ctr = round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static Counter round(const Counter& c, const Key& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Folds a tuple of indices (purpose tag, size, replication, ...) into one
/// stream identifier.
inline constexpr std::uint64_t stream_id(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x6A09E667F3BCC908ull;
  for (auto p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

/// Sequential draws from the substream (seed, stream). Two streams with the
/// same seed and different ids never share a counter value, so any number of
/// replications can be generated independently and in any order.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t lo = next32();
    const std::uint64_t hi = next32();
    return (hi << 32) | lo;
  }

  /// Uniform on the open interval (0, 1) with 53 bits of resolution.
  double uniform() {
    const std::uint64_t bits = (*this)() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal by inversion of the uniform draw.
  double normal() { return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * uniform()); }

  /// Unbiased integer in [0, bound) (Lemire's multiply-and-reject).
  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    unsigned __int128 prod = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(prod);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        prod = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(prod);
      }
    }
    return static_cast<std::uint64_t>(prod >> 64);
  }

 private:
  std::uint32_t next32() {
    if (pos_ == 4) {
      buffer_ = Philox4x32::block({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                   static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                                  key_);
      ++block_;
      pos_ = 0;
    }
    return buffer_[pos_++];
  }

  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buffer_{};
  int pos_ = 4;
};

}  // namespace ddtest
