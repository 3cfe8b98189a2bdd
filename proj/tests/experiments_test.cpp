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

#include <string>

#include "gtest/gtest.h"
#include "mtfuzz/campaign.hpp"
#include "mtfuzz/experiments.hpp"
#include "test_util.hpp"

namespace mtfuzz {
namespace {

using std::chrono::milliseconds;

TEST(ExperimentTable, CsvAndMarkdown) {
  ExperimentTable t{"demo", {"a", "b"}, {{"1", "2"}, {"3", "4"}}, {"note"}};
  EXPECT_EQ(t.to_csv(), "a,b\n1,2\n3,4\n");
  EXPECT_EQ(t.to_markdown(), "# demo\n\n| a | b |\n|---|---|\n| 1 | 2 |\n| 3 | 4 |\n\n- note\n");
  testing::TempDir dir;
  t.write(dir.path());
  EXPECT_EQ(read_text_file(dir / "demo.csv"), t.to_csv());
  EXPECT_EQ(read_text_file(dir / "demo.md"), t.to_markdown());
}

TEST(FilterScaling, ShortRunShape) {
  FilterScalingOptions opt;
  opt.min_exponent = 1;
  opt.max_exponent = 3;
  opt.wall_per_point = milliseconds(40);
  opt.deterministic_execs = 50;
  FilterScalingResult r = run_filter_scaling(opt);
  ASSERT_EQ(r.points.size(), 3u);
  EXPECT_EQ(r.points[0].filters, 2u);
  EXPECT_EQ(r.points[2].filters, 8u);
  EXPECT_TRUE(r.checks_identical);
  for (const auto& p : r.points) EXPECT_GT(p.execs, 0u);
  EXPECT_EQ(r.table.rows.size(), 3u);
  EXPECT_EQ(r.table.header.size(), r.table.rows[0].size());
}

TEST(FilterScaling, ChecksIndependentOfFilterCount) {
  // Deterministic half only; keep the wall half negligible.
  FilterScalingOptions opt;
  opt.min_exponent = 1;
  opt.max_exponent = 15;
  opt.wall_per_point = milliseconds(1);
  FilterScalingResult r = run_filter_scaling(opt);
  EXPECT_EQ(r.points.size(), 15u);
  EXPECT_EQ(r.points.back().filters, 32768u);
  EXPECT_TRUE(r.checks_identical);
  EXPECT_EQ(r.table.rows.size(), 15u);
}

TEST(SnapshotOverhead, ShortRunShape) {
  SnapshotOverheadOptions opt;
  opt.runs = 2;
  opt.wall_per_run = milliseconds(50);
  SnapshotOverheadResult r = run_snapshot_overhead(opt);
  ASSERT_EQ(r.runs.size(), 2u);
  for (const auto& run : r.runs) {
    EXPECT_GT(run.enabled_execs, 0u);
    EXPECT_GT(run.disabled_execs, 0u);
  }
  EXPECT_EQ(r.table.rows.size(), 2u);
  EXPECT_NE(r.table.to_markdown().find("improvement"), std::string::npos);
}

TEST(BaseExtension, SmallComparison) {
  BaseExtensionResult r = run_base_extension({.campaigns = 3, .max_execs = 200, .rng_seed = 1});
  EXPECT_EQ(r.comparison.campaigns_per_mode, 3u);
  EXPECT_EQ(r.comparison.series_length, 200u);
  ASSERT_EQ(r.table.rows.size(), 2u);
  EXPECT_EQ(r.table.rows[0][0], "multi");
  EXPECT_EQ(r.table.rows[1][0], "single");
  EXPECT_LE(r.comparison.multi.full_coverage_count, 3u);
}

}  // namespace
}  // namespace mtfuzz
