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

// Seed corpus, power schedule and the interestingness judgment.

#ifndef MTFUZZ_CORPUS_HPP_
#define MTFUZZ_CORPUS_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "mtfuzz/error.hpp"

namespace mtfuzz {

using Bytes = std::vector<std::uint8_t>;
using Micros = std::chrono::microseconds;

enum class Mode { kMulti, kSingle };

inline std::string_view to_string(Mode m) {
  return m == Mode::kMulti ? "multi" : "single";
}

inline Mode parse_mode(std::string_view s) {
  if (s == "multi") return Mode::kMulti;
  if (s == "single") return Mode::kSingle;
  throw ValidationError("unknown mode '" + std::string(s) +
                        "' (expected multi or single)");
}

// Single mode is the kernel-only baseline: firmware novelty never counts.
inline bool is_interesting(bool kernel_found, bool firmware_found, Mode mode) {
  return mode == Mode::kMulti ? (kernel_found || firmware_found) : kernel_found;
}

struct Seed {
  std::uint64_t id = 0;
  Bytes input;
  std::uint64_t flow = 0;
  std::uint64_t new_coverage_at_discovery = 0;
  Micros exec_time{0};
  std::uint64_t discovered_at = 0;
  std::optional<std::uint64_t> parent;

  bool operator==(const Seed&) const = default;
};

struct Crash {
  Bytes input;
  std::string reason;
  std::uint64_t discovered_at = 0;
  std::optional<std::uint64_t> parent;

  bool operator==(const Crash&) const = default;
};

// Power-schedule constants; energy is
//   clamp(round(base * time * cov * rarity), min_energy, max_energy).
struct EnergyParams {
  double base = 8.0;
  int min_energy = 1;
  int max_energy = 128;
  double time_factor_min = 0.25;
  double time_factor_max = 4.0;
  double cov_factor_cap = 3.0;
  double rare_flow_bonus = 2.0;
  std::uint64_t flow_count_cap = 4;
};

enum class Verdict { kCrash, kRetained, kDiscarded };

class Corpus {
 public:
  explicit Corpus(EnergyParams params = {}) : params_(params) {}

  // Seeds loaded before fuzzing. They skip the interestingness check.
  const Seed& add_initial(Bytes input, std::uint64_t flow,
                          std::uint64_t new_coverage, Micros exec_time) {
    if (input.empty()) throw ValidationError("seed input must be non-empty");
    note_execution(exec_time);
    ++flow_counts_[flow];
    Seed s;
    s.id = next_id_++;
    s.input = std::move(input);
    s.flow = flow;
    s.new_coverage_at_discovery = new_coverage;
    s.exec_time = exec_time;
    seeds_.push_back(std::move(s));
    return seeds_.back();
  }

  // Round robin in insertion order.
  const Seed& choose_next() {
    if (seeds_.empty()) throw ValidationError("choose_next: corpus is empty");
    if (cursor_ >= seeds_.size()) cursor_ = 0;
    return seeds_[cursor_++];
  }

  int assign_energy(const Seed& seed) const {
    double mean = mean_exec_time();
    double own = static_cast<double>(seed.exec_time.count());
    double time_factor =
        own > 0 ? std::clamp(mean / own, params_.time_factor_min,
                             params_.time_factor_max)
                : params_.time_factor_max;
    double cov_factor =
        1.0 + std::min(std::log2(1.0 + static_cast<double>(
                                           seed.new_coverage_at_discovery)),
                       params_.cov_factor_cap);
    std::uint64_t seen = flow_count(seed.flow);
    double rarity =
        seen <= 1 ? params_.rare_flow_bonus
                  : 1.0 / static_cast<double>(std::min(seen, params_.flow_count_cap));
    long p = std::lround(params_.base * time_factor * cov_factor * rarity);
    return static_cast<int>(std::clamp<long>(p, params_.min_energy,
                                             params_.max_energy));
  }

  struct Execution {
    const Bytes& input;
    std::uint64_t flow = 0;
    std::uint64_t new_coverage = 0;
    bool interesting = false;
    bool crashed = false;
    std::string crash_reason;
    Micros exec_time{0};
    std::uint64_t exec_index = 0;
    std::optional<std::uint64_t> parent;
  };

  Verdict retain(const Execution& e) {
    note_execution(e.exec_time);
    if (e.crashed) {
      crashes_.push_back({e.input, e.crash_reason, e.exec_index, e.parent});
      return Verdict::kCrash;
    }
    ++flow_counts_[e.flow];
    if (!e.interesting) return Verdict::kDiscarded;
    Seed s;
    s.id = next_id_++;
    s.input = e.input;
    s.flow = e.flow;
    s.new_coverage_at_discovery = e.new_coverage;
    s.exec_time = e.exec_time;
    s.discovered_at = e.exec_index;
    s.parent = e.parent;
    seeds_.push_back(std::move(s));
    return Verdict::kRetained;
  }

  std::uint64_t flow_count(std::uint64_t flow) const {
    auto it = flow_counts_.find(flow);
    return it == flow_counts_.end() ? 0 : it->second;
  }

  double mean_exec_time() const {
    return exec_count_ == 0 ? 0.0
                            : exec_time_sum_ / static_cast<double>(exec_count_);
  }

  const std::vector<Seed>& seeds() const { return seeds_; }
  const std::vector<Crash>& crashes() const { return crashes_; }
  std::size_t cursor() const { return cursor_; }
  bool empty() const { return seeds_.empty(); }
  const EnergyParams& params() const { return params_; }

  // For tests and tooling that need to stage aggregate state directly.
  void set_flow_count(std::uint64_t flow, std::uint64_t count) {
    flow_counts_[flow] = count;
  }
  void note_execution(Micros exec_time) {
    exec_time_sum_ += static_cast<double>(exec_time.count());
    ++exec_count_;
  }

  // One raw file plus a JSON sidecar per seed; crashes under `crash_dir`.
  void save(const std::filesystem::path& seed_dir,
            const std::filesystem::path& crash_dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(seed_dir);
    fs::create_directories(crash_dir);
    for (const auto& s : seeds_) {
      std::string stem = "id_" + pad6(s.id);
      write_bytes(seed_dir / stem, s.input);
      nlohmann::ordered_json meta = {
          {"id", s.id},
          {"flow", s.flow},
          {"new_coverage_at_discovery", s.new_coverage_at_discovery},
          {"exec_time_us", s.exec_time.count()},
          {"discovered_at", s.discovered_at},
          {"parent", s.parent ? nlohmann::ordered_json(*s.parent)
                              : nlohmann::ordered_json(nullptr)}};
      write_text(seed_dir / (stem + ".json"), meta.dump(2) + "\n");
    }
    for (std::size_t i = 0; i < crashes_.size(); ++i) {
      const auto& c = crashes_[i];
      std::string stem = "crash_" + pad6(i);
      write_bytes(crash_dir / stem, c.input);
      nlohmann::ordered_json meta = {
          {"reason", c.reason},
          {"discovered_at", c.discovered_at},
          {"parent", c.parent ? nlohmann::ordered_json(*c.parent)
                              : nlohmann::ordered_json(nullptr)}};
      write_text(crash_dir / (stem + ".json"), meta.dump(2) + "\n");
    }
  }

  static Bytes read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read " + p.string());
    return Bytes(std::istreambuf_iterator<char>(in),
                 std::istreambuf_iterator<char>());
  }

 private:
  static std::string pad6(std::uint64_t n) {
    std::string s = std::to_string(n);
    return std::string(s.size() < 6 ? 6 - s.size() : 0, '0') + s;
  }
  static void write_bytes(const std::filesystem::path& p, const Bytes& b) {
    std::ofstream out(p, std::ios::binary);
    out.write(reinterpret_cast<const char*>(b.data()),
              static_cast<std::streamsize>(b.size()));
    if (!out) throw IoError("cannot write " + p.string());
  }
  static void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    out << s;
    if (!out) throw IoError("cannot write " + p.string());
  }

  EnergyParams params_;
  std::vector<Seed> seeds_;
  std::vector<Crash> crashes_;
  std::unordered_map<std::uint64_t, std::uint64_t> flow_counts_;
  std::size_t cursor_ = 0;
  std::uint64_t next_id_ = 0;
  double exec_time_sum_ = 0.0;
  std::uint64_t exec_count_ = 0;
};

}  // namespace mtfuzz

#endif  // MTFUZZ_CORPUS_HPP_
