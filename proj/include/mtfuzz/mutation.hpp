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

// Havoc-style byte mutator. Each call stacks 1-4 operators drawn from a
// seeded SplitMix64 stream, so a (seed, input) pair always yields the same
// output.

#ifndef MTFUZZ_MUTATION_HPP_
#define MTFUZZ_MUTATION_HPP_

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>

#include "mtfuzz/corpus.hpp"
#include "mtfuzz/rng.hpp"

namespace mtfuzz {

using MutationRng = SplitMix64;

enum class MutationOp : std::uint8_t {
  kBitFlip,
  kRandomByte,
  kArith,
  kInteresting,
  kTruncate,
  kAppend,
};
inline constexpr std::size_t kMutationOpCount = 6;

// Index 4 is the 32-bit constant, stored little-endian.
inline constexpr std::array<std::uint32_t, 5> kInterestingValues = {
    0x00, 0xff, 0x7f, 0x80, 0xdeadbeef};
inline constexpr std::size_t kDeadbeefIndex = 4;

inline constexpr std::size_t kDefaultMaxLen = 256;

namespace mutate_ops {

inline void bit_flip(Bytes& data, std::size_t bit) {
  data[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
}

inline void set_byte(Bytes& data, std::size_t offset, std::uint8_t value) {
  data[offset] = value;
}

// delta in [-16, 16] \ {0}; wraps mod 256.
inline void arith(Bytes& data, std::size_t offset, int delta) {
  data[offset] = static_cast<std::uint8_t>(data[offset] + delta);
}

// Single-byte constants fill `width` bytes; the 32-bit constant writes its
// little-endian bytes. Writes are clipped at the end of the buffer.
inline void interesting(Bytes& data, std::size_t offset, std::size_t which,
                        std::size_t width) {
  std::uint32_t v = kInterestingValues[which];
  for (std::size_t i = 0; i < width && offset + i < data.size(); ++i) {
    data[offset + i] = which == kDeadbeefIndex
                           ? static_cast<std::uint8_t>(v >> (8 * i))
                           : static_cast<std::uint8_t>(v);
  }
}

inline void truncate(Bytes& data, std::size_t remove) {
  remove = std::min(remove, data.size() - 1);
  data.resize(data.size() - remove);
}

}  // namespace mutate_ops

class Mutator {
 public:
  explicit Mutator(std::uint64_t seed, std::size_t max_len = kDefaultMaxLen)
      : rng_(seed), max_len_(std::max<std::size_t>(max_len, 1)) {}

  Bytes mutate(std::span<const std::uint8_t> input) {
    Bytes data(input.begin(), input.end());
    if (data.empty()) data.push_back(0);
    if (data.size() > max_len_) data.resize(max_len_);
    int ops = static_cast<int>(rng_.between(1, 4));
    for (int i = 0; i < ops; ++i) {
      apply(static_cast<MutationOp>(rng_.below(kMutationOpCount)), data);
    }
    return data;
  }

  std::size_t max_len() const { return max_len_; }
  MutationRng& rng() { return rng_; }

 private:
  void apply(MutationOp op, Bytes& data) {
    // Ops that cannot apply at the current length degrade to a bit flip.
    if (op == MutationOp::kTruncate && data.size() <= 1) op = MutationOp::kBitFlip;
    if (op == MutationOp::kAppend && data.size() >= max_len_) op = MutationOp::kBitFlip;
    switch (op) {
      case MutationOp::kBitFlip:
        mutate_ops::bit_flip(data, rng_.below(data.size() * 8));
        break;
      case MutationOp::kRandomByte:
        mutate_ops::set_byte(data, rng_.below(data.size()),
                             static_cast<std::uint8_t>(rng_.next()));
        break;
      case MutationOp::kArith: {
        int magnitude = static_cast<int>(rng_.between(1, 16));
        mutate_ops::arith(data, rng_.below(data.size()),
                          rng_.below(2) ? magnitude : -magnitude);
        break;
      }
      case MutationOp::kInteresting: {
        std::size_t which = rng_.below(kInterestingValues.size());
        std::size_t width = which == kDeadbeefIndex ? 4 : rng_.between(1, 4);
        mutate_ops::interesting(data, rng_.below(data.size()), which, width);
        break;
      }
      case MutationOp::kTruncate:
        mutate_ops::truncate(data, rng_.between(1, std::max<std::size_t>(1, data.size() / 2)));
        break;
      case MutationOp::kAppend: {
        std::size_t n = std::min<std::size_t>(rng_.between(1, 8),
                                              max_len_ - data.size());
        for (std::size_t i = 0; i < n; ++i) {
          data.push_back(static_cast<std::uint8_t>(rng_.next()));
        }
        break;
      }
    }
  }

  MutationRng rng_;
  std::size_t max_len_;
};

}  // namespace mtfuzz

#endif  // MTFUZZ_MUTATION_HPP_
