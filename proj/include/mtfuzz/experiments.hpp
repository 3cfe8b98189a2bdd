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

// Canned desk-scale experiments. Each returns a table that renders as CSV
// and as a markdown mirror.

#ifndef MTFUZZ_EXPERIMENTS_HPP_
#define MTFUZZ_EXPERIMENTS_HPP_

#include <chrono>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mtfuzz/campaign.hpp"
#include "mtfuzz/error.hpp"

namespace mtfuzz {

struct ExperimentTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> notes;  // markdown only

  std::string to_csv() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
      }
      out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
  }

  std::string to_markdown() const {
    std::string out = "# " + name + "\n\n";
    auto line = [&out](const std::vector<std::string>& cells) {
      out += '|';
      for (const auto& c : cells) out += ' ' + c + " |";
      out += '\n';
    };
    line(header);
    out += '|';
    for (std::size_t i = 0; i < header.size(); ++i) out += "---|";
    out += '\n';
    for (const auto& r : rows) line(r);
    if (!notes.empty()) {
      out += '\n';
      for (const auto& n : notes) out += "- " + n + '\n';
    }
    return out;
  }

  void write(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    write_text_file(dir / (name + ".csv"), to_csv());
    write_text_file(dir / (name + ".md"), to_markdown());
  }
};

namespace detail {

inline std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

inline double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean(v), s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline CampaignResult run_checked(const CampaignConfig& c) {
  CampaignResult r = run_campaign(c);
  if (r.error) throw Error("campaign aborted: " + *r.error);
  return r;
}

}  // namespace detail

// ---- filter scaling ----------------------------------------------------------

struct FilterScalingOptions {
  int min_exponent = 1;
  int max_exponent = 15;
  std::chrono::milliseconds wall_per_point{10000};
  // Exec budget of the separate deterministic run that counts membership
  // checks for each filter count.
  std::uint64_t deterministic_execs = 200;
  std::uint64_t rng_seed = 1;
};

struct FilterScalingPoint {
  std::size_t filters = 0;
  std::uint64_t execs = 0;               // wall-budgeted run
  std::uint64_t membership_checks = 0;   // exec-budgeted run
};

struct FilterScalingResult {
  std::vector<FilterScalingPoint> points;
  double mean_execs = 0;
  double stddev_execs = 0;
  double max_deviation = 0;  // fraction of the mean
  bool checks_identical = false;
  ExperimentTable table;
};

inline FilterScalingResult run_filter_scaling(const FilterScalingOptions& opt = {}) {
  FilterScalingResult out;
  std::vector<double> execs;
  for (int e = opt.min_exponent; e <= opt.max_exponent; ++e) {
    CampaignConfig c;
    c.scenario = "sbi_base";
    c.rng_seed = opt.rng_seed;
    c.initial_seeds = {default_initial_seed(c.scenario)};
    c.noise_enabled = true;
    c.synthesize_filters = std::size_t{1} << e;

    CampaignConfig timed = c;
    timed.realtime = true;
    timed.budget.max_wall = opt.wall_per_point;
    CampaignConfig counted = c;
    counted.budget.max_execs = opt.deterministic_execs;

    FilterScalingPoint p;
    p.filters = c.synthesize_filters;
    p.execs = detail::run_checked(timed).classify_calls;
    p.membership_checks = detail::run_checked(counted).filter_stats.membership_checks;
    out.points.push_back(p);
    execs.push_back(static_cast<double>(p.execs));
  }
  out.mean_execs = detail::mean(execs);
  out.stddev_execs = detail::stddev(execs);
  out.checks_identical = true;
  for (const auto& p : out.points) {
    out.max_deviation = std::max(out.max_deviation,
                                 std::abs(static_cast<double>(p.execs) - out.mean_execs) /
                                     out.mean_execs);
    out.checks_identical &= p.membership_checks == out.points.front().membership_checks;
  }

  auto& t = out.table;
  t.name = "filter-scaling";
  t.header = {"filters", "execs", "deviation_pct", "membership_checks"};
  for (const auto& p : out.points) {
    double dev = (static_cast<double>(p.execs) - out.mean_execs) / out.mean_execs * 100.0;
    t.rows.push_back({std::to_string(p.filters), std::to_string(p.execs),
                      detail::fixed(dev), std::to_string(p.membership_checks)});
  }
  t.notes = {"wall budget per point: " + std::to_string(opt.wall_per_point.count()) + " ms",
             "mean execs: " + detail::fixed(out.mean_execs) +
                 ", std dev: " + detail::fixed(out.stddev_execs) +
                 ", max deviation: " + detail::fixed(out.max_deviation * 100.0) + "%",
             std::string("membership checks identical across filter counts: ") +
                 (out.checks_identical ? "yes" : "no")};
  return out;
}

// ---- snapshot overhead --------------------------------------------------------

struct SnapshotOverheadOptions {
  int runs = 5;
  std::chrono::milliseconds wall_per_run{10000};
  double snapshot_cost_ratio = 0.12;
  std::uint64_t rng_seed = 1;
};

struct SnapshotOverheadRun {
  std::uint64_t enabled_execs = 0;
  std::uint64_t disabled_execs = 0;
  double improvement = 0;  // disabled / enabled - 1
};

struct SnapshotOverheadResult {
  std::vector<SnapshotOverheadRun> runs;
  double mean_improvement = 0;
  ExperimentTable table;
};

inline SnapshotOverheadResult run_snapshot_overhead(const SnapshotOverheadOptions& opt = {}) {
  SnapshotOverheadResult out;
  std::vector<double> improvements;
  for (int i = 0; i < opt.runs; ++i) {
    CampaignConfig c;
    c.scenario = "sbi_base";
    c.rng_seed = opt.rng_seed + static_cast<std::uint64_t>(i);
    c.initial_seeds = {default_initial_seed(c.scenario)};
    c.realtime = true;
    c.snapshot_cost_ratio = opt.snapshot_cost_ratio;
    c.budget.max_wall = opt.wall_per_run;

    SnapshotOverheadRun r;
    c.snapshot_enabled = true;
    r.enabled_execs = detail::run_checked(c).classify_calls;
    c.snapshot_enabled = false;
    r.disabled_execs = detail::run_checked(c).classify_calls;
    r.improvement = static_cast<double>(r.disabled_execs) /
                        static_cast<double>(r.enabled_execs) - 1.0;
    improvements.push_back(r.improvement);
    out.runs.push_back(r);
  }
  out.mean_improvement = detail::mean(improvements);

  auto& t = out.table;
  t.name = "snapshot-overhead";
  t.header = {"run", "enabled_execs", "disabled_execs", "improvement_pct"};
  for (std::size_t i = 0; i < out.runs.size(); ++i) {
    const auto& r = out.runs[i];
    t.rows.push_back({std::to_string(i + 1), std::to_string(r.enabled_execs),
                      std::to_string(r.disabled_execs), detail::fixed(r.improvement * 100.0)});
  }
  t.notes = {"wall budget per run: " + std::to_string(opt.wall_per_run.count()) + " ms",
             "snapshot load cost: " + detail::fixed(opt.snapshot_cost_ratio * 100.0) +
                 "% of mean exec time",
             "mean improvement with snapshots disabled: " +
                 detail::fixed(out.mean_improvement * 100.0) + "%"};
  return out;
}

// ---- base extension ------------------------------------------------------------

struct BaseExtensionOptions {
  std::uint64_t campaigns = 50;
  std::uint64_t max_execs = 500;
  std::uint64_t rng_seed = 1;
};

struct BaseExtensionResult {
  ComparisonSummary comparison;
  ExperimentTable table;
};

inline CampaignConfig base_extension_config(const BaseExtensionOptions& opt) {
  CampaignConfig c;
  c.scenario = "sbi_base";
  c.rng_seed = opt.rng_seed;
  c.initial_seeds = {default_initial_seed(c.scenario)};
  c.budget.max_execs = opt.max_execs;
  return c;
}

inline ExperimentTable comparison_table(const ComparisonSummary& s) {
  ExperimentTable t;
  t.name = "base-extension";
  t.header = {"mode", "campaigns", "full_coverage", "full_coverage_pct", "mean_branches"};
  auto row = [&](std::string_view mode, const ModeSeries& m) {
    double pct = 100.0 * static_cast<double>(m.full_coverage_count) /
                 static_cast<double>(s.campaigns_per_mode);
    t.rows.push_back({std::string(mode), std::to_string(s.campaigns_per_mode),
                      std::to_string(m.full_coverage_count), detail::fixed(pct),
                      detail::fixed(m.mean_branches, 3)});
  };
  row("multi", s.multi);
  row("single", s.single);
  t.notes = {"full coverage: all 7 defined cases of the base extension switch reached",
             "aligned growth series length: " + std::to_string(s.series_length)};
  return t;
}

inline BaseExtensionResult run_base_extension(const BaseExtensionOptions& opt = {}) {
  BaseExtensionResult out;
  out.comparison = run_comparison(base_extension_config(opt), opt.campaigns);
  out.table = comparison_table(out.comparison);
  return out;
}

}  // namespace mtfuzz

#endif  // MTFUZZ_EXPERIMENTS_HPP_
