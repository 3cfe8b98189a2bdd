// Copyright 2026 The mtfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MTFUZZ_RNG_HPP_
#define MTFUZZ_RNG_HPP_

#include <cstdint>

namespace mtfuzz {

// SplitMix64 (Steele, Lea, Flood 2014). The output stream for a given seed
// is part of the replay contract: campaigns, synthetic filters and noise all
// draw from it, so changing it invalidates recorded experiments.
class SplitMix64 {
 public:
  static constexpr int kVersion = 1;

  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform-ish in [0, n). Modulo bias is negligible for the small n used here.
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

  // Uniform in [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) {
    return lo + below(hi - lo + 1);
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

// Stateless mix of a value; used to derive per-run streams.
inline std::uint64_t mix64(std::uint64_t x) { return SplitMix64(x).next(); }

}  // namespace mtfuzz

#endif  // MTFUZZ_RNG_HPP_
