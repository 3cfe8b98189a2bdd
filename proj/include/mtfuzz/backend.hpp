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

// Contract between the campaign loop and whatever executes test cases.

#ifndef MTFUZZ_BACKEND_HPP_
#define MTFUZZ_BACKEND_HPP_

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "mtfuzz/trace.hpp"

namespace mtfuzz {

enum class Outcome { kOk, kCrash, kTimeout };

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::kOk:
      return "ok";
    case Outcome::kCrash:
      return "crash";
    case Outcome::kTimeout:
      return "timeout";
  }
  return "ok";
}

// Tag of the baseline snapshot taken once per campaign.
inline constexpr std::string_view kSnapshotTag = "mtcfuzz-snapshot";

struct ExecutionResult {
  Trace trace;
  Outcome outcome = Outcome::kOk;
  std::string crash_reason;
  std::chrono::microseconds exec_time{0};
};

struct Capabilities {
  bool supports_snapshot = false;
};

// One execution = trace start, run harness, trace stop; `run` covers all
// three. Implementations must be deterministic given (state, input).
class TargetBackend {
 public:
  virtual ~TargetBackend() = default;

  virtual Capabilities capabilities() const = 0;
  virtual ExecutionResult run(std::span<const std::uint8_t> input) = 0;
  // Both throw CapabilityError when snapshots are unsupported;
  // load_snapshot throws NotFoundError for an unknown tag.
  virtual void save_snapshot(const std::string& tag) = 0;
  virtual void load_snapshot(const std::string& tag) = 0;
  virtual void restart() = 0;
};

}  // namespace mtfuzz

#endif  // MTFUZZ_BACKEND_HPP_
