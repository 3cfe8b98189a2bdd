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

// mtfuzz command-line driver.
//
//   mtfuzz fuzz --config c.json [--mode multi|single] [--seed N] [--out DIR]
//   mtfuzz compare --config c.json [--campaigns N] [--out DIR]
//   mtfuzz analyze --trace t.log --filters f.json
//   mtfuzz report --multi DIR --single DIR [--symbols S.tsv] [--src ROOT] --out DIR
//   mtfuzz experiment --name filter-scaling|snapshot-overhead|base-extension [--out DIR]
//
// Exit status: 0 success, 1 usage or configuration error, 2 runtime abort.
// MTFUZZ_WORKDIR replaces the current directory as the root for default
// output directories.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mtfuzz/campaign.hpp"
#include "mtfuzz/experiments.hpp"
#include "mtfuzz/filter.hpp"
#include "mtfuzz/report.hpp"
#include "mtfuzz/trace.hpp"

namespace fs = std::filesystem;
using mtfuzz::CampaignConfig;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAbort = 2;

// Thrown for problems with inputs; maps to exit status 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path work_root() {
  const char* env = std::getenv("MTFUZZ_WORKDIR");
  return env && *env ? fs::path(env) : fs::current_path();
}

fs::path out_dir(const std::string& flag, std::string_view fallback) {
  return flag.empty() ? work_root() / std::string(fallback) : fs::path(flag);
}

CampaignConfig read_config(const std::string& path) {
  if (!fs::exists(path)) throw UsageError("config file not found: " + path);
  try {
    return mtfuzz::load_config(path);
  } catch (const std::exception& e) {
    throw UsageError(std::string("bad config: ") + e.what());
  }
}

std::string read_input(const std::string& path, std::string_view what) {
  if (!fs::is_regular_file(path)) {
    throw UsageError(std::string(what) + " not found: " + path);
  }
  return mtfuzz::read_text_file(path);
}

struct FuzzArgs {
  std::string config;
  std::string mode;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int cmd_fuzz(const FuzzArgs& a) {
  CampaignConfig c = read_config(a.config);
  if (!a.mode.empty()) c.mode = mtfuzz::parse_mode(a.mode);
  if (a.seed) c.rng_seed = *a.seed;
  fs::path dir = out_dir(a.out, "fuzz-out");

  mtfuzz::CampaignResult r = mtfuzz::run_campaign(c);
  mtfuzz::save_workdir(r, dir);
  mtfuzz::ScenarioLayout layout = mtfuzz::scenario_layout(c.scenario);
  mtfuzz::write_text_file(dir / "layout.json", mtfuzz::layout_to_json(layout).dump(2) + "\n");
  mtfuzz::write_text_file(dir / "symbols.tsv",
                          mtfuzz::symbols_to_tsv(mtfuzz::symbols_from_layout(layout)));
  mtfuzz::write_sim_sources(dir / "src");

  std::cout << mtfuzz::to_json(r.stats.summary).dump(2) << "\n";
  if (r.error) {
    std::cerr << "mtfuzz: campaign aborted: " << *r.error << "\n";
    return kExitAbort;
  }
  return kExitOk;
}

struct CompareArgs {
  std::string config;
  std::uint64_t campaigns = 50;
  std::string out;
};

nlohmann::ordered_json series_json(const mtfuzz::ModeSeries& m) {
  return {{"full_coverage_count", m.full_coverage_count},
          {"mean_branches", m.mean_branches},
          {"branches", m.branches},
          {"execs", m.execs},
          {"mean_cumulative_kernel", m.mean_cumulative_kernel},
          {"mean_cumulative_firmware", m.mean_cumulative_firmware}};
}

int cmd_compare(const CompareArgs& a) {
  CampaignConfig c = read_config(a.config);
  if (a.campaigns == 0) throw UsageError("--campaigns must be >= 1");
  fs::path dir = out_dir(a.out, "compare-out");
  mtfuzz::ComparisonSummary s = mtfuzz::run_comparison(c, a.campaigns);

  nlohmann::ordered_json j = {{"campaigns_per_mode", s.campaigns_per_mode},
                              {"total_campaigns", 2 * s.campaigns_per_mode},
                              {"series_length", s.series_length},
                              {"multi", series_json(s.multi)},
                              {"single", series_json(s.single)}};
  fs::create_directories(dir);
  mtfuzz::write_text_file(dir / "comparison.json", j.dump(2) + "\n");
  mtfuzz::ExperimentTable t = mtfuzz::comparison_table(s);
  t.name = "comparison";
  t.write(dir);
  std::cout << t.to_markdown();
  return kExitOk;
}

int cmd_analyze(const std::string& trace_path, const std::string& filters_path) {
  mtfuzz::Trace trace = mtfuzz::decode_trace(read_input(trace_path, "trace"));
  mtfuzz::AddressFilterSet filters = mtfuzz::load_filters(read_input(filters_path, "filters"));
  mtfuzz::CoverageState state;
  mtfuzz::ClassifyResult r = mtfuzz::classify(trace, filters, state);
  nlohmann::ordered_json j = {{"kernel_new", r.new_kernel},
                              {"firmware_new", r.new_firmware},
                              {"kernel_found", state.kernel_found},
                              {"firmware_found", state.firmware_found},
                              {"observed", r.observed.size()},
                              {"membership_checks", r.stats.membership_checks}};
  std::cout << j.dump() << "\n";
  return kExitOk;
}

struct ReportArgs {
  std::string multi;
  std::string single;
  std::string symbols;
  std::string src;
  std::string out;
};

int cmd_report(const ReportArgs& a) {
  for (const auto& d : {a.multi, a.single}) {
    if (!fs::is_regular_file(fs::path(d) / "coverage.json")) {
      throw UsageError("no coverage.json in " + d);
    }
  }
  // Defaults come from the multi run's working directory as written by fuzz.
  fs::path symbols = a.symbols.empty() ? fs::path(a.multi) / "symbols.tsv" : fs::path(a.symbols);
  fs::path src = a.src.empty() ? fs::path(a.multi) / "src" : fs::path(a.src);
  if (!fs::is_directory(src)) throw UsageError("source root not found: " + src.string());

  mtfuzz::SymbolTable table;
  try {
    table = mtfuzz::load_symbol_table(read_input(symbols.string(), "symbol table"));
  } catch (const mtfuzz::ParseError& e) {
    throw UsageError(symbols.string() + ": " + e.what());
  }
  for (const auto& w : table.warnings()) std::cerr << "mtfuzz: warning: " << w << "\n";

  mtfuzz::LineReport report =
      mtfuzz::aggregate_lines(mtfuzz::merged_counts(mtfuzz::load_coverage(a.multi)),
                              mtfuzz::merged_counts(mtfuzz::load_coverage(a.single)), table);
  fs::path dir = out_dir(a.out, "report-out");
  auto pages = mtfuzz::render_html(report, src, dir);
  std::cout << "wrote " << pages.size() << " pages to " << dir.string() << "\n";
  return kExitOk;
}

struct ExperimentArgs {
  std::string name;
  std::string out;
  std::optional<std::int64_t> wall_ms;
  std::optional<std::uint64_t> campaigns;
};

int cmd_experiment(const ExperimentArgs& a) {
  fs::path dir = out_dir(a.out, "experiments");
  mtfuzz::ExperimentTable t;
  if (a.name == "filter-scaling") {
    mtfuzz::FilterScalingOptions o;
    if (a.wall_ms) o.wall_per_point = std::chrono::milliseconds(*a.wall_ms);
    t = mtfuzz::run_filter_scaling(o).table;
  } else if (a.name == "snapshot-overhead") {
    mtfuzz::SnapshotOverheadOptions o;
    if (a.wall_ms) o.wall_per_run = std::chrono::milliseconds(*a.wall_ms);
    t = mtfuzz::run_snapshot_overhead(o).table;
  } else if (a.name == "base-extension") {
    mtfuzz::BaseExtensionOptions o;
    if (a.campaigns) o.campaigns = *a.campaigns;
    t = mtfuzz::run_base_extension(o).table;
  } else {
    throw UsageError("unknown experiment '" + a.name + "'");
  }
  t.write(dir);
  std::cout << t.to_markdown();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-target coverage-guided fuzzer"};
  app.require_subcommand(1);

  FuzzArgs fuzz;
  auto* fuzz_cmd = app.add_subcommand("fuzz", "run one campaign");
  fuzz_cmd->add_option("--config", fuzz.config, "campaign config JSON")->required();
  fuzz_cmd->add_option("--mode", fuzz.mode, "override mode")
      ->check(CLI::IsMember({"multi", "single"}));
  fuzz_cmd->add_option("--seed", fuzz.seed, "override rng seed");
  fuzz_cmd->add_option("--out", fuzz.out, "working directory");

  CompareArgs compare;
  auto* compare_cmd = app.add_subcommand("compare", "paired multi vs single campaigns");
  compare_cmd->add_option("--config", compare.config, "campaign config JSON")->required();
  compare_cmd->add_option("--campaigns", compare.campaigns, "campaigns per mode");
  compare_cmd->add_option("--out", compare.out, "output directory");

  std::string trace_path, filters_path;
  auto* analyze_cmd = app.add_subcommand("analyze", "classify a trace log offline");
  analyze_cmd->add_option("--trace", trace_path, "trace log")->required();
  analyze_cmd->add_option("--filters", filters_path, "address filter JSON")->required();

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "HTML line coverage diff of two runs");
  report_cmd->add_option("--multi", report.multi, "multi-mode working directory")->required();
  report_cmd->add_option("--single", report.single, "single-mode working directory")->required();
  report_cmd->add_option("--symbols", report.symbols, "symbol TSV");
  report_cmd->add_option("--src", report.src, "source root");
  report_cmd->add_option("--out", report.out, "output directory");

  ExperimentArgs experiment;
  auto* experiment_cmd = app.add_subcommand("experiment", "canned desk-scale experiment");
  experiment_cmd->add_option("--name", experiment.name, "experiment name")->required();
  experiment_cmd->add_option("--out", experiment.out, "output directory");
  experiment_cmd->add_option("--wall-ms", experiment.wall_ms, "wall budget per point or run");
  experiment_cmd->add_option("--campaigns", experiment.campaigns, "campaigns per mode");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*fuzz_cmd) return cmd_fuzz(fuzz);
    if (*compare_cmd) return cmd_compare(compare);
    if (*analyze_cmd) return cmd_analyze(trace_path, filters_path);
    if (*report_cmd) return cmd_report(report);
    if (*experiment_cmd) return cmd_experiment(experiment);
  } catch (const UsageError& e) {
    std::cerr << "mtfuzz: " << e.what() << "\n";
    return kExitUsage;
  } catch (const mtfuzz::ParseError& e) {
    std::cerr << "mtfuzz: " << e.what() << "\n";
    return kExitUsage;
  } catch (const mtfuzz::ValidationError& e) {
    std::cerr << "mtfuzz: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "mtfuzz: " << e.what() << "\n";
    return kExitAbort;
  }
  return kExitUsage;
}
