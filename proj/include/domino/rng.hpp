#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>

#include <cmath>

namespace domino {

/// Counter-based Philox4x32-10. Used here as a keyed bijection on 128-bit
/// counters: it turns (master_seed, sample_index) into well-mixed seed
/// material, so a sample's noise never depends on which worker draws it.
class Philox4x32 {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(Key key, std::uint64_t stream) noexcept
      : key_(key), counter_{0u, 0u, static_cast<std::uint32_t>(stream),
                            static_cast<std::uint32_t>(stream >> 32)} {}

  /// The bare bijection: ten rounds of Philox on one 128-bit counter.
  static Block encrypt(Block counter, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * counter[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * counter[2];
      counter = {static_cast<std::uint32_t>(p1 >> 32) ^ counter[1] ^ key[0],
                 static_cast<std::uint32_t>(p1),
                 static_cast<std::uint32_t>(p0 >> 32) ^ counter[3] ^ key[1],
                 static_cast<std::uint32_t>(p0)};
    }
    return counter;
  }

  result_type operator()() noexcept {
    if (used_ == 2) refill();
    const auto lo = static_cast<std::uint64_t>(buffer_[2 * used_]);
    const auto hi = static_cast<std::uint64_t>(buffer_[2 * used_ + 1]);
    ++used_;
    return lo | (hi << 32);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  void refill() noexcept {
    buffer_ = encrypt(counter_, key_);
    // Low 64 bits are the block index; the high 64 bits hold the stream id.
    if (++counter_[0] == 0) ++counter_[1];
    used_ = 0;
  }

  Key key_;
  Block counter_;
  Block buffer_{};
  int used_ = 2;
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// xoshiro256++ (Blackman & Vigna). Fast enough that the ziggurat normal
/// sampler, not the bit source, dominates the per-step cost.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(const std::array<std::uint64_t, 4>& state) noexcept : s_(state) {
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x9E3779B97F4A7C15ull;
  }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_;
};

/// 256 bits of generator state for one sample: two Philox blocks keyed by the
/// master seed, with the sample index in the high counter words.
std::array<std::uint64_t, 4> sample_state(std::uint64_t master_seed, std::uint64_t sample_index);

/// Ziggurat standard-normal sampler (Marsaglia & Tsang layout, 128 layers,
/// Doornik's constants). The fast path consumes one 64-bit draw: the low 7 bits
/// pick the layer, the top 53 bits give a signed uniform.
class ZigguratNormal {
 public:
  ZigguratNormal() : tab_(&tables()) {}

  template <class Engine>
  double operator()(Engine& engine) const {
    const Tables& tab = *tab_;
    for (;;) {
      const std::uint64_t bits = engine();
      const auto layer = static_cast<std::size_t>(bits & 0x7F);
      const double u = 2.0 * unit(bits) - 1.0;
      if (std::fabs(u) < tab.ratio[layer]) return u * tab.x[layer];
      if (layer == 0) return tail(engine, u < 0.0);
      const double x = u * tab.x[layer];
      const double f0 = std::exp(-0.5 * (tab.x[layer] * tab.x[layer] - x * x));
      const double f1 = std::exp(-0.5 * (tab.x[layer + 1] * tab.x[layer + 1] - x * x));
      if (f1 + unit(engine()) * (f0 - f1) < 1.0) return x;
    }
  }

 private:
  static constexpr std::size_t kLayers = 128;
  static constexpr double kTailStart = 3.442619855899;
  static constexpr double kLayerArea = 9.91256303526217e-3;

  struct Tables {
    std::array<double, kLayers + 1> x;
    std::array<double, kLayers> ratio;
  };

  static const Tables& tables();

  const Tables* tab_;

  // Uniform on [0, 1) from the top 53 bits.
  static double unit(std::uint64_t bits) noexcept {
    return static_cast<double>(static_cast<std::int64_t>(bits >> 11)) * 0x1.0p-53;
  }

  template <class Engine>
  static double tail(Engine& engine, bool negative) {
    double x = 0.0;
    double y = 0.0;
    do {
      x = std::log(1.0 - unit(engine())) / kTailStart;
      y = std::log(1.0 - unit(engine()));
    } while (-2.0 * y < x * x);
    return negative ? x - kTailStart : kTailStart - x;
  }
};

/// Standard-normal stream for one Monte Carlo sample; a pure function of
/// (master_seed, sample_index).
class SampleNoise {
 public:
  SampleNoise(std::uint64_t master_seed, std::uint64_t sample_index)
      : engine_(sample_state(master_seed, sample_index)) {}

  double operator()() { return normal_(engine_); }

 private:
  Xoshiro256pp engine_;
  ZigguratNormal normal_;
};

}  // namespace domino
