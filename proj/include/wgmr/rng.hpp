#pragma once

#include <cmath>
#include <cstdint>

namespace wgmr {

// Philox4x32-10 counter-based generator. A stream is addressed by
// (seed, stream id, substream id); draws consume the 128-bit counter
// sequentially, so independently keyed streams can be generated in any
// order or in parallel with identical results.
class CounterRng {
public:
  // Stream ids used by the simulator; substream is a mode/pulse/channel
  // index. Recorded in stream metadata.
  enum Stream : std::uint32_t {
    kPairSeeds = 1,
    kPairDelays = 2,
    kDetectorSignal = 3,
    kDetectorIdler = 4,
    kDarkSignal = 5,
    kDarkIdler = 6,
    kSplit = 7,
    kBandpass = 8,
    kTest = 100,
  };

  CounterRng(std::uint64_t seed, std::uint32_t stream, std::uint64_t substream)
      : ctr0_(0), ctr1_(0) {
    key0_ = mix32(static_cast<std::uint32_t>(seed) ^ (0x9e3779b9u + stream));
    key1_ = mix32(static_cast<std::uint32_t>(seed >> 32) ^
                  mix32(stream * 0x85ebca6bu + 1u));
    ctr1_ = substream;
    have_spare_ = false;
  }

  std::uint32_t next_u32() {
    if (idx_ == 4) {
      block();
      idx_ = 0;
    }
    return out_[idx_++];
  }

  std::uint64_t next_u64() {
    std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; safe under log().
  double uniform_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double exponential(double mean) { return -mean * std::log(uniform_open()); }

  double gaussian(double sigma) {
    if (have_spare_) {
      have_spare_ = false;
      return spare_ * sigma;
    }
    double u = uniform_open(), v = uniform();
    double r = std::sqrt(-2.0 * std::log(u));
    spare_ = r * std::sin(6.283185307179586 * v);
    have_spare_ = true;
    return r * std::cos(6.283185307179586 * v) * sigma;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Geometric on {1, 2, ...} with P(G=g) = (1-s) s^(g-1).
  int geometric_from_one(double s) {
    if (s <= 0.0) return 1;
    double u = uniform_open();
    return 1 + static_cast<int>(std::floor(std::log(u) / std::log(s)));
  }

private:
  static std::uint32_t mix32(std::uint32_t x) {
    x ^= x >> 16;
    x *= 0x7feb352du;
    x ^= x >> 15;
    x *= 0x846ca68bu;
    x ^= x >> 16;
    return x;
  }

  static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                      std::uint32_t& lo) {
    std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(prod >> 32);
    lo = static_cast<std::uint32_t>(prod);
  }

  void block() {
    std::uint32_t c0 = static_cast<std::uint32_t>(ctr0_);
    std::uint32_t c1 = static_cast<std::uint32_t>(ctr0_ >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(ctr1_);
    std::uint32_t c3 = static_cast<std::uint32_t>(ctr1_ >> 32);
    std::uint32_t k0 = key0_, k1 = key1_;
    for (int round = 0; round < 10; ++round) {
      std::uint32_t hi0, lo0, hi1, lo1;
      mulhilo(0xD2511F53u, c0, hi0, lo0);
      mulhilo(0xCD9E8D57u, c2, hi1, lo1);
      std::uint32_t n0 = hi1 ^ c1 ^ k0;
      std::uint32_t n1 = lo1;
      std::uint32_t n2 = hi0 ^ c3 ^ k1;
      std::uint32_t n3 = lo0;
      c0 = n0;
      c1 = n1;
      c2 = n2;
      c3 = n3;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    out_[0] = c0;
    out_[1] = c1;
    out_[2] = c2;
    out_[3] = c3;
    ++ctr0_;
  }

  std::uint32_t key0_, key1_;
  std::uint64_t ctr0_, ctr1_;
  std::uint32_t out_[4] = {0, 0, 0, 0};
  int idx_ = 4;
  bool have_spare_ = false;
  double spare_ = 0;
};

} // namespace wgmr
