// Copyright 2026 The catrep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CATREP_RNG_HPP
#define CATREP_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>

namespace catrep {

inline uint64_t splitmix64(uint64_t &state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Derives the per-shot seed from (experiment seed, shot index).
inline uint64_t shot_seed(uint64_t experiment_seed, uint64_t shot_index) {
  uint64_t s = experiment_seed ^ 0x6A09E667F3BCC909ull;
  uint64_t a = splitmix64(s);
  uint64_t t = shot_index + a;
  return splitmix64(t);
}

/// xoshiro256** keyed by a 64-bit seed. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = uint64_t;

  explicit Rng(uint64_t seed) {
    uint64_t s = seed;
    for (auto &w : s_) w = splitmix64(s);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<uint64_t>::max(); }

  result_type operator()() {
    const uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Number of failures before the first success of a Bernoulli(p) process.
  /// Returns max() when p == 0.
  uint64_t geometric(double p) {
    if (p <= 0.0) return max();
    if (p >= 1.0) return 0;
    double u = 1.0 - uniform();  // (0, 1]
    double k = std::floor(std::log(u) / std::log1p(-p));
    if (!(k < 1.8e19)) return max();
    return static_cast<uint64_t>(k);
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t s_[4];
};

}  // namespace catrep

#endif
