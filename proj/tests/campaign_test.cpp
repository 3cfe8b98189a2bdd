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
#include <memory>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "json.hpp"
#include "mtfuzz/campaign.hpp"
#include "mtfuzz/error.hpp"
#include "test_util.hpp"

namespace mtfuzz {
namespace {

CampaignConfig base_config(std::uint64_t execs, std::uint64_t seed = 1,
                           std::string scenario = "sbi_base") {
  CampaignConfig c;
  c.scenario = scenario;
  c.rng_seed = seed;
  c.budget.max_execs = execs;
  c.initial_seeds = {default_initial_seed(scenario)};
  return c;
}

TEST(RunCampaign, ExactRecordCount) {
  CampaignResult r = run_campaign(base_config(100));
  ASSERT_FALSE(r.error) << *r.error;
  EXPECT_EQ(r.stats.records.size(), 100u);
  EXPECT_EQ(r.stats.summary.total_execs, 100u);
  for (std::size_t i = 0; i < r.stats.records.size(); ++i) {
    EXPECT_EQ(r.stats.records[i].exec_index, i + 1);
  }
}

TEST(RunCampaign, ExecAccounting) {
  for (std::uint64_t seed : {1, 2, 3}) {
    CampaignResult r = run_campaign(base_config(321, seed));
    EXPECT_EQ(r.stats.summary.total_execs, r.mutate_calls);
    EXPECT_EQ(r.mutate_calls, r.classify_calls);
    EXPECT_EQ(r.calibration_execs, 1u);
  }
}

TEST(RunCampaign, MultiReachesFullCoverageWithGenerousBudget) {
  CampaignResult r = run_campaign(base_config(5000));
  ASSERT_FALSE(r.error);
  EXPECT_TRUE(r.stats.summary.full_firmware_coverage);
  EXPECT_EQ(r.stats.summary.branches_covered, 7u);
}

TEST(RunCampaign, DeterministicStatsBytes) {
  testing::TempDir a, b;
  CampaignConfig c = base_config(400, 9);
  c.noise_enabled = true;
  export_stats(run_campaign(c).stats, a.path());
  export_stats(run_campaign(c).stats, b.path());
  EXPECT_EQ(read_text_file(a / "stats.jsonl"), read_text_file(b / "stats.jsonl"));
  EXPECT_EQ(read_text_file(a / "summary.json"), read_text_file(b / "summary.json"));
}

TEST(RunCampaign, CumulativeCountsNeverShrink) {
  CampaignResult r = run_campaign(base_config(500, 4));
  for (std::size_t i = 1; i < r.stats.records.size(); ++i) {
    EXPECT_GE(r.stats.records[i].cumulative_kernel, r.stats.records[i - 1].cumulative_kernel);
    EXPECT_GE(r.stats.records[i].cumulative_firmware, r.stats.records[i - 1].cumulative_firmware);
  }
  const auto& last = r.stats.records.back();
  EXPECT_EQ(last.cumulative_kernel, r.unified.kernel_pcs.size());
  EXPECT_EQ(last.cumulative_firmware, r.unified.firmware_pcs.size());
  EXPECT_EQ(r.unified.kernel_pcs.size(), r.coverage.kernel_cov.size());
  EXPECT_EQ(r.unified.firmware_pcs.size(), r.coverage.firmware_cov.size());
}

TEST(RunCampaign, SingleModeStillRecordsFirmware) {
  CampaignConfig c = base_config(300, 2);
  c.mode = Mode::kSingle;
  CampaignResult r = run_campaign(c);
  EXPECT_GT(r.stats.summary.firmware_pcs, 0u);
  EXPECT_EQ(r.stats.summary.mode, "single");
}

TEST(RunCampaign, ModesAgreeWhenNoFirmwareIsObserved) {
  // With no firmware filters the two modes see identical feedback.
  for (std::uint64_t seed : {1, 5, 11}) {
    CampaignConfig c = base_config(400, seed);
    c.filters = AddressFilterSet{scenario_filters(scenario_layout("sbi_base")).kernel, FilterList()};
    CampaignConfig s = c;
    s.mode = Mode::kSingle;
    CampaignStats multi = run_campaign(c).stats;
    CampaignStats single = run_campaign(s).stats;
    EXPECT_EQ(multi.records, single.records);
    single.summary.mode = multi.summary.mode;
    EXPECT_EQ(multi.summary, single.summary);
  }
}

TEST(RunCampaign, SnapshotHygiene) {
  for (bool snapshots : {true, false}) {
    CampaignConfig c = base_config(300, 3);
    c.snapshot_enabled = snapshots;
    auto sim = std::make_unique<SimTarget>();
    std::vector<std::int64_t> counters;
    sim->set_run_observer([&](const SimState& s) { counters.push_back(s.persistent_counter); });
    CampaignResult r = Campaign(c, std::move(sim)).run();
    ASSERT_FALSE(r.error);
    ASSERT_EQ(counters.size(), 301u);  // one calibration run
    std::int64_t max_seen = *std::max_element(counters.begin(), counters.end());
    if (snapshots) {
      EXPECT_EQ(max_seen, 0);
    } else {
      EXPECT_GT(max_seen, 0);
    }
  }
}

TEST(RunCampaign, CrashInputsReplayFromBaseline) {
  CampaignResult r = run_campaign(base_config(20000, 1, "shm_bug"));
  ASSERT_FALSE(r.error);
  ASSERT_FALSE(r.corpus.crashes().empty());
  EXPECT_EQ(r.stats.summary.crashes, r.corpus.crashes().size());
  for (const auto& crash : r.corpus.crashes()) {
    SimTarget fresh({.scenario = "shm_bug"});
    ExecutionResult e = fresh.run(crash.input);
    EXPECT_EQ(e.outcome, Outcome::kCrash);
    EXPECT_EQ(e.crash_reason, crash.reason);
  }
}

TEST(RunCampaign, WallBudget) {
  CampaignConfig c = base_config(0);
  c.budget.max_execs.reset();
  c.budget.max_wall = std::chrono::milliseconds(100);
  c.realtime = true;
  auto start = std::chrono::steady_clock::now();
  CampaignResult r = run_campaign(c);
  auto took = std::chrono::steady_clock::now() - start;
  EXPECT_GT(r.stats.summary.total_execs, 0u);
  EXPECT_LT(took, std::chrono::seconds(2));
}

TEST(RunCampaign, SnapshotWithoutBackendSupportAborts) {
  CampaignConfig c = base_config(10);
  CampaignResult r = Campaign(c, std::make_unique<SimTarget>(SimOptions{.supports_snapshot = false})).run();
  ASSERT_TRUE(r.error.has_value());
  EXPECT_EQ(r.stats.summary.error, r.error);
  c.snapshot_enabled = false;
  CampaignResult ok = Campaign(c, std::make_unique<SimTarget>(SimOptions{.supports_snapshot = false})).run();
  EXPECT_FALSE(ok.error);
}

TEST(RunCampaign, RejectsUnboundedOrSeedless) {
  CampaignConfig c = base_config(10);
  c.budget = {};
  EXPECT_THROW(run_campaign(c), ValidationError);
  c = base_config(10);
  c.initial_seeds.clear();
  EXPECT_THROW(run_campaign(c), ValidationError);
}

TEST(RunComparison, OneCampaignPerMode) {
  ComparisonSummary s = run_comparison(base_config(100), 1);
  EXPECT_EQ(s.campaigns_per_mode, 1u);
  EXPECT_EQ(s.multi.branches.size(), 1u);
  EXPECT_EQ(s.single.branches.size(), 1u);
  EXPECT_THROW(run_comparison(base_config(10), 0), ValidationError);
}

TEST(RunComparison, SeriesAlignedToShortestRun) {
  CampaignConfig c = base_config(0);
  c.budget.max_execs.reset();
  c.budget.max_wall = std::chrono::milliseconds(30);
  c.realtime = true;
  ComparisonSummary s = run_comparison(c, 2);
  std::uint64_t shortest = UINT64_MAX;
  for (auto n : s.multi.execs) shortest = std::min(shortest, n);
  for (auto n : s.single.execs) shortest = std::min(shortest, n);
  EXPECT_EQ(s.series_length, shortest);
  EXPECT_EQ(s.multi.mean_cumulative_firmware.size(), shortest);
  EXPECT_EQ(s.single.mean_cumulative_firmware.size(), shortest);
}

TEST(ExportStats, ThreeExecs) {
  testing::TempDir dir;
  CampaignStats stats = run_campaign(base_config(3)).stats;
  export_stats(stats, dir.path());
  std::string jsonl = read_text_file(dir / "stats.jsonl");
  EXPECT_EQ(std::count(jsonl.begin(), jsonl.end(), '\n'), 3);
  EXPECT_TRUE(std::filesystem::exists(dir / "summary.json"));
}

TEST(ExportStats, RoundTrip) {
  testing::TempDir dir;
  CampaignConfig c = base_config(250, 6, "shm_bug");
  CampaignStats stats = run_campaign(c).stats;
  export_stats(stats, dir.path());
  EXPECT_EQ(import_stats(dir.path()), stats);
}

TEST(ExportStats, ImportRejectsGarbage) {
  testing::TempDir dir;
  write_text_file(dir / "stats.jsonl", "{\"exec_index\": 1}\n");
  write_text_file(dir / "summary.json", "{}");
  EXPECT_THROW(import_stats(dir.path()), ParseError);
}

TEST(Workdir, LayoutAndCoverageRoundTrip) {
  testing::TempDir dir;
  CampaignResult r = run_campaign(base_config(200, 2, "shm_bug"));
  save_workdir(r, dir.path());
  EXPECT_TRUE(std::filesystem::exists(dir / "corpus/id_000000"));
  EXPECT_TRUE(std::filesystem::exists(dir / "stats.jsonl"));
  CoverageState back = load_coverage(dir.path());
  EXPECT_EQ(back.kernel_cov, r.coverage.kernel_cov);
  EXPECT_EQ(back.firmware_cov, r.coverage.firmware_cov);
}

TEST(Config, ParsesFieldsAndDefaults) {
  auto j = nlohmann::json::parse(R"({
    "mode": "single", "scenario": "shm_bug",
    "budget": {"max_execs": 10, "max_wall_ms": 5000},
    "rng_seed": 77, "snapshot_enabled": false, "noise_enabled": true,
    "initial_seeds": ["10020804", "0x1000"]
  })");
  CampaignConfig c = config_from_json(j);
  EXPECT_EQ(c.mode, Mode::kSingle);
  EXPECT_EQ(c.scenario, "shm_bug");
  EXPECT_EQ(c.budget.max_execs, std::optional<std::uint64_t>(10));
  EXPECT_EQ(c.budget.max_wall, std::optional<std::chrono::milliseconds>(5000));
  EXPECT_EQ(c.rng_seed, 77u);
  EXPECT_FALSE(c.snapshot_enabled);
  EXPECT_TRUE(c.noise_enabled);
  ASSERT_EQ(c.initial_seeds.size(), 2u);
  EXPECT_EQ(c.initial_seeds[0], (Bytes{0x10, 0x02, 0x08, 0x04}));
  EXPECT_EQ(c.initial_seeds[1], (Bytes{0x10, 0x00}));

  CampaignConfig d = config_from_json(nlohmann::json::parse(R"({"budget":{"max_execs":1}})"));
  EXPECT_EQ(d.mode, Mode::kMulti);
  EXPECT_EQ(d.initial_seeds, std::vector<Bytes>{default_initial_seed("sbi_base")});
}

TEST(Config, RejectsBadValues) {
  auto bad = [](const char* text) { return config_from_json(nlohmann::json::parse(text)); };
  EXPECT_THROW(bad(R"({})"), ValidationError);
  EXPECT_THROW(bad(R"({"budget":{"max_execs":1},"mode":"both"})"), ValidationError);
  EXPECT_THROW(bad(R"({"budget":{"max_execs":1},"scenario":"nope"})"), ValidationError);
  EXPECT_THROW(bad(R"({"budget":{"max_execs":"x"}})"), ValidationError);
  EXPECT_THROW(bad(R"({"budget":{"max_execs":1},"initial_seeds":["abc"]})"), ParseError);
}

TEST(Config, FilterSourcePrecedence) {
  testing::TempDir dir;
  write_text_file(dir / "f.json",
                  R"({"address_filters":{"kernel":[{"name":"only","lower":"0x1","upper":"0x2"}]}})");
  CampaignConfig c = base_config(1);
  EXPECT_EQ(resolve_filters(c).kernel.size(), 1u);
  c.synthesize_filters = 8;
  EXPECT_EQ(resolve_filters(c).kernel.size(), 9u);
  c.filter_file = dir / "f.json";
  EXPECT_EQ(resolve_filters(c).kernel.filters()[0].name, "only");
  c.filters = AddressFilterSet{};
  EXPECT_EQ(resolve_filters(c).size(), 0u);

  auto j = nlohmann::json::parse(R"({"budget":{"max_execs":1},"filter_file":"f.json"})");
  EXPECT_EQ(config_from_json(j, dir.path()).filter_file, dir / "f.json");
}

}  // namespace
}  // namespace mtfuzz
