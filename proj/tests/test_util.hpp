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

// Shared helpers and independent reference implementations for the tests.

#ifndef MTFUZZ_TESTS_TEST_UTIL_HPP_
#define MTFUZZ_TESTS_TEST_UTIL_HPP_

#include <cstdint>
#include <filesystem>
#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "mtfuzz/filter.hpp"
#include "mtfuzz/trace.hpp"

namespace mtfuzz::testing {

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "mtfuzz") {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Linear scan over every filter, no sorting assumptions.
inline bool linear_in_filters(Pc pc, const std::vector<AddressFilter>& filters) {
  for (const auto& f : filters) {
    if (f.lower <= pc && pc <= f.upper) return true;
  }
  return false;
}

struct NaiveResult {
  Trace observed;
  std::uint64_t new_kernel = 0;
  std::uint64_t new_firmware = 0;
};

// Classification without memoization: every pc is checked against the raw
// filter lists, kernel first.
inline NaiveResult naive_classify(const Trace& trace, const std::vector<AddressFilter>& kernel,
                                  const std::vector<AddressFilter>& firmware,
                                  CoverageState& state) {
  NaiveResult r;
  state.kernel_found = false;
  state.firmware_found = false;
  for (Pc pc : trace) {
    if (linear_in_filters(pc, kernel)) {
      if (state.kernel_cov[pc]++ == 0) {
        state.kernel_found = true;
        ++r.new_kernel;
      }
      r.observed.push_back(pc);
    } else if (linear_in_filters(pc, firmware)) {
      if (state.firmware_cov[pc]++ == 0) {
        state.firmware_found = true;
        ++r.new_firmware;
      }
      r.observed.push_back(pc);
    }
  }
  return r;
}

// Disjoint random ranges inside [base, base + span).
inline std::vector<AddressFilter> random_disjoint_filters(std::mt19937_64& rng, std::size_t n,
                                                          Pc base, Pc span) {
  std::vector<AddressFilter> out;
  Pc slot = span / (n == 0 ? 1 : n);
  for (std::size_t i = 0; i < n; ++i) {
    Pc start = base + i * slot;
    Pc lo = start + rng() % (slot / 2);
    Pc hi = lo + rng() % (slot / 2);
    out.push_back({"f" + std::to_string(i), lo, hi});
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

// FNV-1a 64 written out byte by byte from the published constants.
inline std::uint64_t reference_fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace mtfuzz::testing

#endif  // MTFUZZ_TESTS_TEST_UTIL_HPP_
