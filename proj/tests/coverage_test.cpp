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

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "mtfuzz/coverage.hpp"
#include "mtfuzz/trace.hpp"
#include "test_util.hpp"

namespace mtfuzz {
namespace {

TEST(EdgeHasher, WorkedExample) {
  // BB_i at 0x1000 then BB_j at 0x3000, then BB_i again.
  EdgeHasher h;
  h.set_prev_location(0x1000);
  EXPECT_EQ(h.step(0x4000), 0x5000u);
  EXPECT_EQ(h.prev_location(), 0x2000u);
  EXPECT_EQ(h.step(0x3000), 0x1000u);
  EXPECT_EQ(h.prev_location(), 0x1800u);
  EXPECT_EQ(h.step(0x4000), 0x5800u);
  EXPECT_EQ(0x4000u ^ 0x1800u, 0x5800u);
}

TEST(EdgeHasher, SelfXorIsZero) {
  EdgeHasher h;
  for (std::uint32_t x : {0u, 1u, 0x1234u, 0xffffu}) {
    h.set_prev_location(x);
    EXPECT_EQ(h.step(x), 0u);
  }
}

TEST(EdgeHasher, DirectionMatters) {
  EdgeHasher a, b;
  a.set_prev_location(0x4000 >> 1);
  b.set_prev_location(0x3000 >> 1);
  EXPECT_EQ(a.step(0x3000), 0x1000u);
  EXPECT_EQ(b.step(0x4000), 0x5800u);
}

TEST(EdgeHasher, HitMapCountsAndWraps) {
  EdgeHasher h(8);
  EXPECT_EQ(h.map_size(), 256u);
  for (int i = 0; i < 257; ++i) {
    h.set_prev_location(0);
    h.step(7);
  }
  EXPECT_EQ(h.hit_map()[7], 1u);  // 257 mod 256
  h.reset();
  EXPECT_EQ(h.prev_location(), 0u);
  EXPECT_EQ(h.hit_map()[7], 0u);
}

TEST(EdgeHasherProperty, IndicesInRangeAndReplayable) {
  std::mt19937_64 rng(17);
  for (unsigned bits : {8u, 12u, 16u}) {
    EdgeHasher a(bits), b(bits);
    std::vector<std::uint32_t> locs(5000);
    for (auto& l : locs) l = static_cast<std::uint32_t>(rng()) & a.mask();
    for (auto l : locs) {
      std::uint32_t idx = a.step(l);
      ASSERT_LT(idx, a.map_size());
      ASSERT_EQ(a.prev_location(), l >> 1);
    }
    for (auto l : locs) b.step(l);
    ASSERT_TRUE(std::equal(a.hit_map().begin(), a.hit_map().end(), b.hit_map().begin()));
  }
}

TEST(QemuBlockLocation, StrictTextBounds) {
  EXPECT_FALSE(qemu_block_location(0x100, 0x100, 0x2000).has_value());
  EXPECT_FALSE(qemu_block_location(0x2000, 0x100, 0x2000).has_value());
  EXPECT_FALSE(qemu_block_location(0x50, 0x100, 0x2000).has_value());
  EXPECT_TRUE(qemu_block_location(0x101, 0x100, 0x2000).has_value());
}

TEST(QemuBlockLocation, FormulaWith64BitShifts) {
  auto loc = qemu_block_location(0x1000, 0x0, 0x10000);
  ASSERT_TRUE(loc.has_value());
  EXPECT_EQ(*loc, ((0x1000u >> 4) ^ (0x1000u << 8)) & 0xffffu);
  EXPECT_EQ(*loc, 0x0100u);
  // High bits shifted past bit 63 are dropped before masking.
  Pc high = 0xff00000000001230ULL;
  auto h = qemu_block_location(high, 0, ~Pc{0});
  ASSERT_TRUE(h.has_value());
  EXPECT_EQ(*h, static_cast<std::uint32_t>(((high >> 4) ^ (high << 8)) & 0xffff));
}

TEST(MergeCoverage, Basics) {
  UnifiedCoverage acc;
  Trace k = {0xa}, f = {0xb};
  UnifiedCoverage once = merge_coverage(acc, k, f);
  EXPECT_EQ(once.kernel_pcs, (std::set<Pc>{0xa}));
  EXPECT_EQ(once.firmware_pcs, (std::set<Pc>{0xb}));
  UnifiedCoverage twice = merge_coverage(once, k, f);
  EXPECT_EQ(twice, once);
  EXPECT_EQ(merge_into(twice, k, f), 0u);
  EXPECT_EQ(twice.total(), 2u);
}

TEST(MergeCoverageProperty, EqualsBruteForceUnion) {
  std::mt19937_64 rng(23);
  for (int iter = 0; iter < 200; ++iter) {
    UnifiedCoverage acc;
    std::vector<Pc> all_k, all_f;
    for (int step = 0, n = static_cast<int>(rng() % 10); step < n; ++step) {
      Trace k(rng() % 8), f(rng() % 8);
      for (auto& pc : k) pc = rng() % 32;
      for (auto& pc : f) pc = 100 + rng() % 32;
      all_k.insert(all_k.end(), k.begin(), k.end());
      all_f.insert(all_f.end(), f.begin(), f.end());
      acc = merge_coverage(acc, k, f);
    }
    // Brute force: dedupe by linear search.
    std::vector<Pc> uk, uf;
    for (Pc pc : all_k) if (std::find(uk.begin(), uk.end(), pc) == uk.end()) uk.push_back(pc);
    for (Pc pc : all_f) if (std::find(uf.begin(), uf.end(), pc) == uf.end()) uf.push_back(pc);
    ASSERT_EQ(acc.kernel_pcs.size(), uk.size());
    ASSERT_EQ(acc.firmware_pcs.size(), uf.size());
    for (Pc pc : uk) ASSERT_TRUE(acc.kernel_pcs.contains(pc));
    for (Pc pc : uf) ASSERT_TRUE(acc.firmware_pcs.contains(pc));
  }
}

TEST(MergeCoverageProperty, CommutativeAndAssociative) {
  std::mt19937_64 rng(29);
  auto random_set = [&rng] {
    Trace t(rng() % 10);
    for (auto& pc : t) pc = rng() % 40;
    return t;
  };
  for (int iter = 0; iter < 200; ++iter) {
    Trace a = random_set(), b = random_set(), c = random_set();
    Trace none;
    UnifiedCoverage ab = merge_coverage(merge_coverage({}, a, none), b, none);
    UnifiedCoverage ba = merge_coverage(merge_coverage({}, b, none), a, none);
    ASSERT_EQ(ab, ba);
    UnifiedCoverage left = merge_coverage(ab, c, none);
    UnifiedCoverage bc = merge_coverage(merge_coverage({}, b, none), c, none);
    UnifiedCoverage right = merge_coverage(bc, a, none);
    ASSERT_EQ(left, right);
  }
}

TEST(FlowHash, EmptyIsOffsetBasis) {
  EXPECT_EQ(flow_hash(Trace{}), 0xcbf29ce484222325ULL);
}

TEST(FlowHash, LoopCountMatters) {
  EXPECT_NE(flow_hash(Trace{0x10}), flow_hash(Trace{0x10, 0x10}));
}

TEST(FlowHash, MatchesReferenceFnv) {
  EXPECT_EQ(flow_hash(Trace{0x10, 0x20}), testing::reference_fnv1a64("0x10\n0x20\n"));
  Trace big = {0xffffffff80010100ULL, 0x80000100ULL, 0x0};
  EXPECT_EQ(flow_hash(big), testing::reference_fnv1a64(encode_trace(big)));
}

TEST(FlowHashProperty, EqualIffEncodingsEqual) {
  std::mt19937_64 rng(31);
  for (int iter = 0; iter < 5000; ++iter) {
    Trace a(rng() % 4), b(rng() % 4);
    for (auto& pc : a) pc = rng() % 3;
    for (auto& pc : b) pc = rng() % 3;
    ASSERT_EQ(flow_hash(a) == flow_hash(b), encode_trace(a) == encode_trace(b));
  }
}

}  // namespace
}  // namespace mtfuzz
