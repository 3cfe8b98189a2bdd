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

#ifndef MTFUZZ_COVERAGE_HPP_
#define MTFUZZ_COVERAGE_HPP_

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <unordered_map>
#include <vector>

#include "mtfuzz/trace.hpp"

namespace mtfuzz {

// AFL-style edge coverage: each block XORs its location with the (shifted)
// previous one to index a shared hit map. Counters are 8-bit and wrap.
class EdgeHasher {
 public:
  static constexpr unsigned kDefaultMapBits = 16;

  explicit EdgeHasher(unsigned map_size_bits = kDefaultMapBits)
      : bits_(map_size_bits), hit_map_(std::size_t{1} << map_size_bits, 0) {}

  // `cur_location` must already be reduced below map_size().
  std::uint32_t step(std::uint32_t cur_location) {
    std::uint32_t index = (cur_location ^ prev_location_) & mask();
    ++hit_map_[index];
    prev_location_ = cur_location >> 1;
    return index;
  }

  void reset() {
    prev_location_ = 0;
    std::fill(hit_map_.begin(), hit_map_.end(), 0);
  }

  std::uint32_t prev_location() const { return prev_location_; }
  void set_prev_location(std::uint32_t prev) { prev_location_ = prev; }
  unsigned map_size_bits() const { return bits_; }
  std::size_t map_size() const { return hit_map_.size(); }
  std::uint32_t mask() const {
    return static_cast<std::uint32_t>(hit_map_.size() - 1);
  }
  std::span<const std::uint8_t> hit_map() const { return hit_map_; }

 private:
  unsigned bits_;
  std::uint32_t prev_location_ = 0;
  std::vector<std::uint8_t> hit_map_;
};

// QEMU-mode block id: only blocks strictly inside the text section are
// instrumented. Shifts are plain 64-bit, then masked to the map.
inline std::optional<std::uint32_t> qemu_block_location(
    Pc block_address, Pc text_start, Pc text_end,
    unsigned map_size_bits = EdgeHasher::kDefaultMapBits) {
  if (block_address <= text_start || block_address >= text_end) {
    return std::nullopt;
  }
  std::uint64_t loc = (block_address >> 4) ^ (block_address << 8);
  return static_cast<std::uint32_t>(loc & ((std::uint64_t{1} << map_size_bits) - 1));
}

// Union of per-component pc sets over every execution of a campaign.
struct UnifiedCoverage {
  std::set<Pc> kernel_pcs;
  std::set<Pc> firmware_pcs;

  std::size_t total() const { return kernel_pcs.size() + firmware_pcs.size(); }
  bool operator==(const UnifiedCoverage&) const = default;
};

// In-place union; returns how many pcs were new.
inline std::size_t merge_into(UnifiedCoverage& acc,
                              std::span<const Pc> exec_kernel,
                              std::span<const Pc> exec_firmware) {
  std::size_t before = acc.total();
  acc.kernel_pcs.insert(exec_kernel.begin(), exec_kernel.end());
  acc.firmware_pcs.insert(exec_firmware.begin(), exec_firmware.end());
  return acc.total() - before;
}

inline UnifiedCoverage merge_coverage(UnifiedCoverage acc,
                                      std::span<const Pc> exec_kernel,
                                      std::span<const Pc> exec_firmware) {
  merge_into(acc, exec_kernel, exec_firmware);
  return acc;
}

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

// FNV-1a 64 over the trace-log encoding of `observed`, computed without
// materializing the text.
inline std::uint64_t flow_hash(std::span<const Pc> observed) {
  std::uint64_t h = kFnvOffsetBasis;
  auto feed = [&h](char c) {
    h ^= static_cast<std::uint8_t>(c);
    h *= kFnvPrime;
  };
  char buf[2 + 16];
  buf[0] = '0';
  buf[1] = 'x';
  for (Pc pc : observed) {
    char* end = std::to_chars(buf + 2, buf + sizeof(buf), pc, 16).ptr;
    for (char* c = buf; c != end; ++c) feed(*c);
    feed('\n');
  }
  return h;
}

}  // namespace mtfuzz

#endif  // MTFUZZ_COVERAGE_HPP_
