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

// Address-range filters and the kernel/firmware coverage classifier.
//
// Filters are inclusive [lower, upper] ranges kept sorted by `lower`, with a
// parallel array of lower bounds for binary search. Classification consults
// the coverage maps first, so the binary search only runs the first time an
// address is seen (and every time for addresses no filter claims).

#ifndef MTFUZZ_FILTER_HPP_
#define MTFUZZ_FILTER_HPP_

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mtfuzz/error.hpp"
#include "mtfuzz/rng.hpp"
#include "mtfuzz/trace.hpp"

namespace mtfuzz {

struct AddressFilter {
  std::string name;
  Pc lower = 0;
  Pc upper = 0;

  bool operator==(const AddressFilter&) const = default;
};

// Binary search over `starts` for the rightmost lower bound <= pc, then an
// upper-bound check against that filter.
inline bool addr_in_filters(Pc pc, std::span<const AddressFilter> filters,
                            std::span<const Pc> starts) {
  auto it = std::upper_bound(starts.begin(), starts.end(), pc);
  if (it == starts.begin()) return false;
  std::size_t idx = static_cast<std::size_t>(it - starts.begin()) - 1;
  return pc <= filters[idx].upper;
}

// The filters of one component, sorted and validated.
class FilterList {
 public:
  FilterList() = default;

  explicit FilterList(std::vector<AddressFilter> filters)
      : filters_(std::move(filters)) {
    for (const auto& f : filters_) {
      if (f.lower > f.upper) {
        throw ValidationError("filter '" + f.name + "': lower " +
                              to_hex(f.lower) + " > upper " + to_hex(f.upper));
      }
    }
    std::stable_sort(filters_.begin(), filters_.end(),
                     [](const AddressFilter& a, const AddressFilter& b) {
                       return a.lower < b.lower;
                     });
    for (std::size_t i = 1; i < filters_.size(); ++i) {
      if (filters_[i].lower <= filters_[i - 1].upper) {
        throw ValidationError("filters '" + filters_[i - 1].name + "' and '" +
                              filters_[i].name + "' overlap");
      }
    }
    starts_.reserve(filters_.size());
    for (const auto& f : filters_) starts_.push_back(f.lower);
  }

  bool contains(Pc pc) const { return addr_in_filters(pc, filters_, starts_); }

  std::span<const AddressFilter> filters() const { return filters_; }
  std::span<const Pc> starts() const { return starts_; }
  std::size_t size() const { return filters_.size(); }
  bool empty() const { return filters_.empty(); }

 private:
  std::vector<AddressFilter> filters_;
  std::vector<Pc> starts_;
};

struct AddressFilterSet {
  FilterList kernel;
  FilterList firmware;

  std::size_t size() const { return kernel.size() + firmware.size(); }
};

namespace detail {

inline std::vector<AddressFilter> parse_filter_array(const nlohmann::json& arr,
                                                     std::string_view what) {
  std::vector<AddressFilter> out;
  if (arr.is_null()) return out;
  if (!arr.is_array()) {
    throw ParseError("address_filters." + std::string(what) +
                     " must be an array");
  }
  out.reserve(arr.size());
  for (const auto& item : arr) {
    if (!item.is_object() || !item.contains("lower") ||
        !item.contains("upper") || !item["lower"].is_string() ||
        !item["upper"].is_string()) {
      throw ParseError("address_filters." + std::string(what) +
                       ": each filter needs string 'lower' and 'upper'");
    }
    AddressFilter f;
    f.name = item.value("name", std::string());
    f.lower = parse_hex(item["lower"].get<std::string>());
    f.upper = parse_hex(item["upper"].get<std::string>());
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace detail

// Builds a set from the value of an "address_filters" key.
inline AddressFilterSet filters_from_json(const nlohmann::json& block) {
  if (!block.is_object()) throw ParseError("address_filters must be an object");
  AddressFilterSet set;
  set.kernel = FilterList(
      detail::parse_filter_array(block.value("kernel", nlohmann::json()), "kernel"));
  set.firmware = FilterList(detail::parse_filter_array(
      block.value("firmware", nlohmann::json()), "firmware"));
  return set;
}

// Parses a document whose top level carries an "address_filters" object.
inline AddressFilterSet load_filters(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("filter JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("address_filters")) {
    throw ParseError("filter JSON: missing top-level 'address_filters'");
  }
  return filters_from_json(doc["address_filters"]);
}

inline nlohmann::ordered_json filters_to_json(const AddressFilterSet& set) {
  auto dump = [](const FilterList& list) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& f : list.filters()) {
      arr.push_back({{"name", f.name},
                     {"lower", to_hex(f.lower)},
                     {"upper", to_hex(f.upper)}});
    }
    return arr;
  };
  return {{"kernel", dump(set.kernel)}, {"firmware", dump(set.firmware)}};
}

struct CoverageState {
  std::unordered_map<Pc, std::uint64_t> kernel_cov;
  std::unordered_map<Pc, std::uint64_t> firmware_cov;
  bool kernel_found = false;
  bool firmware_found = false;

  bool operator==(const CoverageState&) const = default;
};

// Cost counters for the classifier. `membership_checks` counts
// addr_in_filters calls; `distinct_addresses` counts first insertions.
struct FilterStats {
  std::uint64_t membership_checks = 0;
  std::uint64_t distinct_addresses = 0;
  std::uint64_t filter_count = 0;
  std::uint64_t trace_length = 0;

  FilterStats& operator+=(const FilterStats& o) {
    membership_checks += o.membership_checks;
    distinct_addresses += o.distinct_addresses;
    filter_count = o.filter_count;
    trace_length += o.trace_length;
    return *this;
  }
  bool operator==(const FilterStats&) const = default;
};

struct ClassifyResult {
  Trace observed;  // retained pcs in trace order, duplicates kept
  std::uint64_t new_kernel = 0;
  std::uint64_t new_firmware = 0;
  FilterStats stats;
};

inline ClassifyResult classify(std::span<const Pc> trace,
                               const AddressFilterSet& filters,
                               CoverageState& state) {
  ClassifyResult r;
  r.observed.reserve(trace.size());
  r.stats.filter_count = filters.size();
  r.stats.trace_length = trace.size();
  state.kernel_found = false;
  state.firmware_found = false;
  for (Pc pc : trace) {
    if (auto it = state.kernel_cov.find(pc); it != state.kernel_cov.end()) {
      ++it->second;
      r.observed.push_back(pc);
      continue;
    }
    if (auto it = state.firmware_cov.find(pc); it != state.firmware_cov.end()) {
      ++it->second;
      r.observed.push_back(pc);
      continue;
    }
    ++r.stats.membership_checks;
    if (filters.kernel.contains(pc)) {
      state.kernel_cov.emplace(pc, 1);
      state.kernel_found = true;
      ++r.new_kernel;
      r.observed.push_back(pc);
      continue;
    }
    ++r.stats.membership_checks;
    if (filters.firmware.contains(pc)) {
      state.firmware_cov.emplace(pc, 1);
      state.firmware_found = true;
      ++r.new_firmware;
      r.observed.push_back(pc);
    }
  }
  r.stats.distinct_addresses = r.new_kernel + r.new_firmware;
  return r;
}

// Synthetic kernel ranges live in their own window so they never claim an
// address the simulated target emits; only the filter count changes.
inline constexpr Pc kSyntheticFilterBase = 0xffffffffa0000000ULL;
inline constexpr Pc kSyntheticFilterStride = 0x1000;

inline AddressFilterSet synthesize_filters(std::size_t count, std::uint64_t seed,
                                           const AddressFilterSet& scenario) {
  if (count == 0) throw ValidationError("synthesize_filters: count must be >= 1");
  SplitMix64 rng(seed);
  std::vector<AddressFilter> kernel;
  kernel.reserve(count + scenario.kernel.size());
  for (std::size_t i = 0; i < count; ++i) {
    Pc slot = kSyntheticFilterBase + static_cast<Pc>(i) * kSyntheticFilterStride;
    Pc lower = slot + (rng.below(0x800) & ~Pc{1});
    Pc upper = lower + 2 + rng.below(0x400);
    kernel.push_back({"synthetic_" + std::to_string(i), lower, upper});
  }
  // Shuffle so the loader does the sorting, as it would for a real symbol dump.
  for (std::size_t i = kernel.size(); i > 1; --i) {
    std::swap(kernel[i - 1], kernel[rng.below(i)]);
  }
  for (const auto& f : scenario.kernel.filters()) kernel.push_back(f);
  std::vector<AddressFilter> firmware(scenario.firmware.filters().begin(),
                                      scenario.firmware.filters().end());
  return {FilterList(std::move(kernel)), FilterList(std::move(firmware))};
}

}  // namespace mtfuzz

#endif  // MTFUZZ_FILTER_HPP_
