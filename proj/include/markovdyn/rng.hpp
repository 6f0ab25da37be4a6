#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace markovdyn::rng {

// SplitMix64 mixing step. Advances `state` and returns a well-mixed word.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed for an independent substream. Streams are identified by (seed, index);
// the same pair always yields the same stream, on every platform.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  return splitmix64(s);
}

// Deterministic random stream: mt19937_64 (bit-stable per the standard) with
// explicit bit-to-double conversion and Box-Muller gaussians, so no
// implementation-defined std::*_distribution enters any result.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  static RandomStream substream(std::uint64_t seed, std::uint64_t index) {
    return RandomStream(derive_stream_seed(seed, index));
  }

  // Uniform on [0,1), 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; draws are produced in pairs.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;          // [0,1)
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Index drawn from the distribution whose cumulative weights are given
  // (cumulative.back() ~ 1). Zero-weight points are never selected, also
  // when u falls into the rounding sliver above cumulative.back().
  int categorical(std::span<const double> cumulative) {
    if (cumulative.empty()) throw std::invalid_argument("categorical: empty distribution");
    const double u = uniform();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    int idx = it == cumulative.end() ? static_cast<int>(cumulative.size()) - 1
                                     : static_cast<int>(it - cumulative.begin());
    while (idx > 0 && cumulative[static_cast<std::size_t>(idx)] ==
                          cumulative[static_cast<std::size_t>(idx) - 1]) {
      --idx;
    }
    return idx;
  }

private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Cumulative weights for categorical sampling.
inline std::vector<double> cumulative_weights(std::span<const double> weights) {
  std::vector<double> cdf(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    cdf[i] = acc;
  }
  return cdf;
}

}  // namespace markovdyn::rng
