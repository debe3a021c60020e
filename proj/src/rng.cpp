#include "domino/rng.hpp"

namespace domino {

std::array<std::uint64_t, 4> sample_state(std::uint64_t master_seed, std::uint64_t sample_index) {
  const std::uint64_t k = mix64(master_seed + 0x9E3779B97F4A7C15ull);
  const Philox4x32::Key key{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  const auto lo = static_cast<std::uint32_t>(sample_index);
  const auto hi = static_cast<std::uint32_t>(sample_index >> 32);
  const auto a = Philox4x32::encrypt({0u, 0u, lo, hi}, key);
  const auto b = Philox4x32::encrypt({1u, 0u, lo, hi}, key);
  auto join = [](std::uint32_t l, std::uint32_t h) {
    return static_cast<std::uint64_t>(l) | (static_cast<std::uint64_t>(h) << 32);
  };
  return {join(a[0], a[1]), join(a[2], a[3]), join(b[0], b[1]), join(b[2], b[3])};
}

const ZigguratNormal::Tables& ZigguratNormal::tables() {
  static const Tables tab = [] {
    Tables t{};
    double f = std::exp(-0.5 * kTailStart * kTailStart);
    t.x[0] = kLayerArea / f;
    t.x[1] = kTailStart;
    t.x[kLayers] = 0.0;
    for (std::size_t i = 2; i < kLayers; ++i) {
      t.x[i] = std::sqrt(-2.0 * std::log(kLayerArea / t.x[i - 1] + f));
      f = std::exp(-0.5 * t.x[i] * t.x[i]);
    }
    for (std::size_t i = 0; i < kLayers; ++i) t.ratio[i] = t.x[i + 1] / t.x[i];
    return t;
  }();
  return tab;
}

}  // namespace domino
