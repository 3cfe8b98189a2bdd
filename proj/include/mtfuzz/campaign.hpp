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

// The fuzzing campaign: initialization, seed scheduling, mutation,
// execution, classification and post-execution reset, plus the multi vs
// single comparison driver and stats persistence.

#ifndef MTFUZZ_CAMPAIGN_HPP_
#define MTFUZZ_CAMPAIGN_HPP_

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mtfuzz/backend.hpp"
#include "mtfuzz/corpus.hpp"
#include "mtfuzz/coverage.hpp"
#include "mtfuzz/error.hpp"
#include "mtfuzz/filter.hpp"
#include "mtfuzz/mutation.hpp"
#include "mtfuzz/sim_target.hpp"

namespace mtfuzz {

struct Budget {
  std::optional<std::uint64_t> max_execs;
  std::optional<std::chrono::milliseconds> max_wall;

  bool bounded() const { return max_execs.has_value() || max_wall.has_value(); }
};

struct CampaignConfig {
  Mode mode = Mode::kMulti;
  std::string scenario = "sbi_base";
  Budget budget;
  std::uint64_t rng_seed = 0;
  bool snapshot_enabled = true;
  bool noise_enabled = false;
  bool realtime = false;
  double snapshot_cost_ratio = 0.12;
  // Filter source, first match wins: inline set, file, synthetic count,
  // otherwise the scenario's own ranges.
  std::optional<AddressFilterSet> filters;
  std::optional<std::filesystem::path> filter_file;
  std::size_t synthesize_filters = 0;
  std::vector<Bytes> initial_seeds;
  std::size_t max_len = kDefaultMaxLen;
  EnergyParams energy;
};

inline Bytes default_initial_seed(std::string_view scenario) {
  if (scenario == "shm_bug") return {0x10, 0x00, 0x04, 0x08};
  return {0x10, 0x00, 0x00, 0x00};
}

inline Bytes parse_hex_bytes(std::string_view hex) {
  if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
  if (hex.empty() || hex.size() % 2 != 0) {
    throw ParseError("seed must be a non-empty even-length hex string");
  }
  Bytes out;
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    out.push_back(static_cast<std::uint8_t>(parse_hex(hex.substr(i, 2))));
  }
  return out;
}

inline std::string to_hex_bytes(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (auto b : bytes) {
    out += kDigits[b >> 4];
    out += kDigits[b & 0xf];
  }
  return out;
}

inline CampaignConfig config_from_json(const nlohmann::json& j,
                                       const std::filesystem::path& base_dir = {}) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  CampaignConfig c;
  try {
    c.mode = parse_mode(j.value("mode", std::string("multi")));
    c.scenario = j.value("scenario", std::string("sbi_base"));
    if (!is_known_scenario(c.scenario)) {
      throw ValidationError("unknown scenario '" + c.scenario + "'");
    }
    if (j.contains("budget")) {
      const auto& b = j["budget"];
      if (b.contains("max_execs")) c.budget.max_execs = b["max_execs"].get<std::uint64_t>();
      if (b.contains("max_wall_ms")) {
        c.budget.max_wall = std::chrono::milliseconds(b["max_wall_ms"].get<std::int64_t>());
      }
    }
    c.rng_seed = j.value("rng_seed", std::uint64_t{0});
    c.snapshot_enabled = j.value("snapshot_enabled", true);
    c.noise_enabled = j.value("noise_enabled", false);
    c.realtime = j.value("realtime", false);
    c.snapshot_cost_ratio = j.value("snapshot_cost_ratio", 0.12);
    c.max_len = j.value("max_len", kDefaultMaxLen);
    if (j.contains("address_filters")) c.filters = filters_from_json(j["address_filters"]);
    if (j.contains("filter_file")) {
      std::filesystem::path p = j["filter_file"].get<std::string>();
      c.filter_file = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
    c.synthesize_filters = j.value("synthesize_filters", std::size_t{0});
    if (j.contains("initial_seeds")) {
      for (const auto& s : j["initial_seeds"]) {
        c.initial_seeds.push_back(parse_hex_bytes(s.get<std::string>()));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  if (!c.budget.bounded()) {
    throw ValidationError("config: budget needs max_execs and/or max_wall_ms");
  }
  if (c.initial_seeds.empty()) c.initial_seeds.push_back(default_initial_seed(c.scenario));
  return c;
}

inline CampaignConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return config_from_json(j, path.parent_path());
}

inline AddressFilterSet resolve_filters(const CampaignConfig& c) {
  if (c.filters) return *c.filters;
  if (c.filter_file) {
    std::ifstream in(*c.filter_file);
    if (!in) throw IoError("cannot read filter file " + c.filter_file->string());
    std::stringstream ss;
    ss << in.rdbuf();
    return load_filters(ss.str());
  }
  AddressFilterSet scenario = scenario_filters(scenario_layout(c.scenario));
  if (c.synthesize_filters > 0) {
    return synthesize_filters(c.synthesize_filters, c.rng_seed, scenario);
  }
  return scenario;
}

struct ExecRecord {
  std::uint64_t exec_index = 0;
  std::uint64_t seed_id = 0;
  std::uint64_t new_kernel_pcs = 0;
  std::uint64_t new_firmware_pcs = 0;
  std::uint64_t cumulative_kernel = 0;
  std::uint64_t cumulative_firmware = 0;
  Outcome outcome = Outcome::kOk;
  std::uint64_t flow_hash = 0;
  bool retained = false;

  bool operator==(const ExecRecord&) const = default;
};

struct CampaignSummary {
  std::string mode;
  std::string scenario;
  std::uint64_t rng_seed = 0;
  std::uint64_t total_execs = 0;
  std::uint64_t crashes = 0;
  std::uint64_t corpus_size = 0;
  std::uint64_t kernel_pcs = 0;
  std::uint64_t firmware_pcs = 0;
  bool full_firmware_coverage = false;
  std::uint64_t branches_covered = 0;
  std::uint64_t membership_checks = 0;
  std::optional<std::string> error;

  bool operator==(const CampaignSummary&) const = default;
};

struct CampaignStats {
  std::vector<ExecRecord> records;
  CampaignSummary summary;

  bool operator==(const CampaignStats&) const = default;
};

struct CampaignResult {
  CampaignStats stats;
  Corpus corpus;
  CoverageState coverage;
  UnifiedCoverage unified;
  FilterStats filter_stats;
  std::uint64_t mutate_calls = 0;
  std::uint64_t classify_calls = 0;      // fuzz-loop executions only
  std::uint64_t calibration_execs = 0;   // initial-seed dry runs
  std::optional<std::string> error;
};

// Splits the observed list of one execution into kernel and firmware pcs
// using the (already updated) coverage maps.
inline void split_observed(const Trace& observed, const CoverageState& state,
                           std::vector<Pc>& kernel, std::vector<Pc>& firmware) {
  kernel.clear();
  firmware.clear();
  for (Pc pc : observed) {
    (state.kernel_cov.contains(pc) ? kernel : firmware).push_back(pc);
  }
}

class Campaign {
 public:
  // A null backend means "build the simulated target the config names".
  explicit Campaign(CampaignConfig config,
                    std::unique_ptr<TargetBackend> backend = nullptr)
      : config_(std::move(config)),
        backend_(std::move(backend)),
        layout_(scenario_layout(config_.scenario)),
        mutator_(config_.rng_seed, config_.max_len) {
    if (!backend_) {
      SimOptions o;
      o.scenario = config_.scenario;
      o.noise = config_.noise_enabled;
      o.realtime = config_.realtime;
      o.snapshot_cost_ratio = config_.snapshot_cost_ratio;
      backend_ = std::make_unique<SimTarget>(o);
    }
  }

  TargetBackend& backend() { return *backend_; }

  CampaignResult run() {
    if (!config_.budget.bounded()) throw ValidationError("campaign budget is unbounded");
    if (config_.initial_seeds.empty()) throw ValidationError("no initial seeds");
    CampaignResult r{.corpus = Corpus(config_.energy)};
    auto started = std::chrono::steady_clock::now();
    try {
      filters_ = resolve_filters(config_);
      initialize(r);
      while (!budget_exhausted(r, started)) {
        Seed seed = r.corpus.choose_next();  // copy: the corpus may grow
        int energy = r.corpus.assign_energy(seed);
        for (int i = 0; i < energy && !budget_exhausted(r, started); ++i) {
          fuzz_one(r, seed);
        }
      }
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    summarize(r);
    return r;
  }

 private:
  void initialize(CampaignResult& r) {
    backend_->restart();
    if (config_.snapshot_enabled) backend_->save_snapshot(snapshot_tag_);
    for (const auto& input : config_.initial_seeds) {
      ExecutionResult exec = backend_->run(input);
      ++r.calibration_execs;
      ClassifyResult c = classify(exec.trace, filters_, r.coverage);
      r.filter_stats += c.stats;
      record_unified(r, c);
      if (exec.outcome == Outcome::kCrash) {
        r.corpus.retain({.input = input,
                         .crashed = true,
                         .crash_reason = exec.crash_reason,
                         .exec_time = exec.exec_time});
      } else {
        r.corpus.add_initial(input, scheduling_flow(c, r.coverage),
                             scheduling_new_coverage(c), exec.exec_time);
      }
      post_execute(exec.outcome);
    }
    if (r.corpus.empty()) throw ValidationError("every initial seed crashed");
  }

  void fuzz_one(CampaignResult& r, const Seed& seed) {
    Bytes input = mutator_.mutate(seed.input);
    ++r.mutate_calls;
    ExecutionResult exec = backend_->run(input);
    ClassifyResult c = classify(exec.trace, filters_, r.coverage);
    ++r.classify_calls;
    r.filter_stats += c.stats;
    if (config_.mode == Mode::kSingle) r.coverage.firmware_found = false;
    record_unified(r, c);

    std::uint64_t exec_index = r.classify_calls;
    std::uint64_t flow = scheduling_flow(c, r.coverage);
    bool crashed = exec.outcome == Outcome::kCrash;
    Verdict v = r.corpus.retain(
        {.input = input,
         .flow = flow,
         .new_coverage = scheduling_new_coverage(c),
         .interesting = is_interesting(r.coverage.kernel_found,
                                       r.coverage.firmware_found, config_.mode),
         .crashed = crashed,
         .crash_reason = exec.crash_reason,
         .exec_time = exec.exec_time,
         .exec_index = exec_index,
         .parent = seed.id});

    r.stats.records.push_back({.exec_index = exec_index,
                               .seed_id = seed.id,
                               .new_kernel_pcs = c.new_kernel,
                               .new_firmware_pcs = c.new_firmware,
                               .cumulative_kernel = r.unified.kernel_pcs.size(),
                               .cumulative_firmware = r.unified.firmware_pcs.size(),
                               .outcome = exec.outcome,
                               .flow_hash = flow,
                               .retained = v == Verdict::kRetained});
    post_execute(exec.outcome);
  }

  // Single mode schedules on the kernel-visible part of the flow only, so
  // firmware behavior cannot leak into the baseline's power schedule.
  std::uint64_t scheduling_flow(const ClassifyResult& c,
                                const CoverageState& state) {
    if (config_.mode == Mode::kMulti) return flow_hash(c.observed);
    split_observed(c.observed, state, kernel_scratch_, firmware_scratch_);
    return flow_hash(kernel_scratch_);
  }

  std::uint64_t scheduling_new_coverage(const ClassifyResult& c) const {
    return config_.mode == Mode::kMulti ? c.new_kernel + c.new_firmware
                                        : c.new_kernel;
  }

  // The unified sets only grow when classify saw a pc for the first time.
  void record_unified(CampaignResult& r, const ClassifyResult& c) {
    if (c.new_kernel + c.new_firmware == 0) return;
    split_observed(c.observed, r.coverage, kernel_scratch_, firmware_scratch_);
    merge_into(r.unified, kernel_scratch_, firmware_scratch_);
  }

  void post_execute(Outcome outcome) {
    if (outcome != Outcome::kOk) {
      backend_->restart();
      if (config_.snapshot_enabled) backend_->load_snapshot(snapshot_tag_);
    } else if (config_.snapshot_enabled) {
      backend_->load_snapshot(snapshot_tag_);
    }
  }

  bool budget_exhausted(const CampaignResult& r,
                        std::chrono::steady_clock::time_point started) const {
    if (config_.budget.max_execs && r.classify_calls >= *config_.budget.max_execs) {
      return true;
    }
    if (config_.budget.max_wall &&
        std::chrono::steady_clock::now() - started >= *config_.budget.max_wall) {
      return true;
    }
    return false;
  }

  void summarize(CampaignResult& r) const {
    auto& s = r.stats.summary;
    s.mode = std::string(to_string(config_.mode));
    s.scenario = config_.scenario;
    s.rng_seed = config_.rng_seed;
    s.total_execs = r.classify_calls;
    s.crashes = r.corpus.crashes().size();
    s.corpus_size = r.corpus.seeds().size();
    s.kernel_pcs = r.unified.kernel_pcs.size();
    s.firmware_pcs = r.unified.firmware_pcs.size();
    s.branches_covered = 0;
    for (Pc pc : layout_.case_branch_pcs()) {
      s.branches_covered += r.coverage.firmware_cov.contains(pc) ? 1 : 0;
    }
    s.full_firmware_coverage =
        s.branches_covered == layout_.case_branch_pcs().size();
    s.membership_checks = r.filter_stats.membership_checks;
    s.error = r.error;
  }

  CampaignConfig config_;
  std::unique_ptr<TargetBackend> backend_;
  ScenarioLayout layout_;
  Mutator mutator_;
  AddressFilterSet filters_;
  std::vector<Pc> kernel_scratch_;
  std::vector<Pc> firmware_scratch_;
  const std::string snapshot_tag_{kSnapshotTag};
};

inline CampaignResult run_campaign(const CampaignConfig& config) {
  return Campaign(config).run();
}

struct ModeSeries {
  std::uint64_t full_coverage_count = 0;
  double mean_branches = 0.0;
  std::vector<std::uint64_t> branches;  // per campaign
  std::vector<std::uint64_t> execs;     // per campaign
  std::vector<double> mean_cumulative_kernel;
  std::vector<double> mean_cumulative_firmware;
};

struct ComparisonSummary {
  std::uint64_t campaigns_per_mode = 0;
  std::uint64_t series_length = 0;
  ModeSeries multi;
  ModeSeries single;
};

// Campaign i of both modes uses rng seed base+i, so mode is the only
// difference between paired runs. Growth series are truncated to the
// smallest exec count over every campaign.
inline ComparisonSummary run_comparison(const CampaignConfig& base,
                                        std::uint64_t campaigns_per_mode) {
  if (campaigns_per_mode == 0) throw ValidationError("campaigns_per_mode must be >= 1");
  ComparisonSummary out;
  out.campaigns_per_mode = campaigns_per_mode;
  std::vector<CampaignStats> multi_runs, single_runs;
  for (std::uint64_t i = 0; i < campaigns_per_mode; ++i) {
    for (Mode m : {Mode::kMulti, Mode::kSingle}) {
      CampaignConfig c = base;
      c.mode = m;
      c.rng_seed = base.rng_seed + i;
      CampaignResult r = run_campaign(c);
      if (r.error) throw Error("campaign aborted: " + *r.error);
      (m == Mode::kMulti ? multi_runs : single_runs).push_back(std::move(r.stats));
    }
  }
  std::uint64_t min_len = UINT64_MAX;
  for (const auto* runs : {&multi_runs, &single_runs}) {
    for (const auto& s : *runs) min_len = std::min<std::uint64_t>(min_len, s.records.size());
  }
  out.series_length = min_len;
  auto fill = [min_len](const std::vector<CampaignStats>& runs, ModeSeries& ms) {
    ms.mean_cumulative_kernel.assign(min_len, 0.0);
    ms.mean_cumulative_firmware.assign(min_len, 0.0);
    double total_branches = 0;
    for (const auto& s : runs) {
      ms.branches.push_back(s.summary.branches_covered);
      ms.execs.push_back(s.summary.total_execs);
      ms.full_coverage_count += s.summary.full_firmware_coverage ? 1 : 0;
      total_branches += static_cast<double>(s.summary.branches_covered);
      for (std::uint64_t k = 0; k < min_len; ++k) {
        ms.mean_cumulative_kernel[k] += static_cast<double>(s.records[k].cumulative_kernel);
        ms.mean_cumulative_firmware[k] += static_cast<double>(s.records[k].cumulative_firmware);
      }
    }
    double n = static_cast<double>(runs.size());
    ms.mean_branches = total_branches / n;
    for (auto& v : ms.mean_cumulative_kernel) v /= n;
    for (auto& v : ms.mean_cumulative_firmware) v /= n;
  };
  fill(multi_runs, out.multi);
  fill(single_runs, out.single);
  return out;
}

// ---- stats persistence -----------------------------------------------------

inline nlohmann::ordered_json to_json(const ExecRecord& r) {
  return {{"exec_index", r.exec_index},
          {"seed_id", r.seed_id},
          {"new_kernel_pcs", r.new_kernel_pcs},
          {"new_firmware_pcs", r.new_firmware_pcs},
          {"cumulative_kernel", r.cumulative_kernel},
          {"cumulative_firmware", r.cumulative_firmware},
          {"outcome", to_string(r.outcome)},
          {"flow_hash", to_hex(r.flow_hash)},
          {"retained", r.retained}};
}

inline nlohmann::ordered_json to_json(const CampaignSummary& s) {
  return {{"mode", s.mode},
          {"scenario", s.scenario},
          {"rng_seed", s.rng_seed},
          {"total_execs", s.total_execs},
          {"crashes", s.crashes},
          {"corpus_size", s.corpus_size},
          {"kernel_pcs", s.kernel_pcs},
          {"firmware_pcs", s.firmware_pcs},
          {"full_firmware_coverage", s.full_firmware_coverage},
          {"branches_covered", s.branches_covered},
          {"membership_checks", s.membership_checks},
          {"error", s.error ? nlohmann::ordered_json(*s.error)
                            : nlohmann::ordered_json(nullptr)}};
}

inline Outcome parse_outcome(std::string_view s) {
  if (s == "ok") return Outcome::kOk;
  if (s == "crash") return Outcome::kCrash;
  if (s == "timeout") return Outcome::kTimeout;
  throw ParseError("unknown outcome '" + std::string(s) + "'");
}

inline ExecRecord record_from_json(const nlohmann::json& j) {
  return {.exec_index = j.at("exec_index").get<std::uint64_t>(),
          .seed_id = j.at("seed_id").get<std::uint64_t>(),
          .new_kernel_pcs = j.at("new_kernel_pcs").get<std::uint64_t>(),
          .new_firmware_pcs = j.at("new_firmware_pcs").get<std::uint64_t>(),
          .cumulative_kernel = j.at("cumulative_kernel").get<std::uint64_t>(),
          .cumulative_firmware = j.at("cumulative_firmware").get<std::uint64_t>(),
          .outcome = parse_outcome(j.at("outcome").get<std::string>()),
          .flow_hash = parse_hex(j.at("flow_hash").get<std::string>()),
          .retained = j.at("retained").get<bool>()};
}

inline CampaignSummary summary_from_json(const nlohmann::json& j) {
  CampaignSummary s;
  s.mode = j.at("mode").get<std::string>();
  s.scenario = j.at("scenario").get<std::string>();
  s.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  s.total_execs = j.at("total_execs").get<std::uint64_t>();
  s.crashes = j.at("crashes").get<std::uint64_t>();
  s.corpus_size = j.at("corpus_size").get<std::uint64_t>();
  s.kernel_pcs = j.at("kernel_pcs").get<std::uint64_t>();
  s.firmware_pcs = j.at("firmware_pcs").get<std::uint64_t>();
  s.full_firmware_coverage = j.at("full_firmware_coverage").get<bool>();
  s.branches_covered = j.at("branches_covered").get<std::uint64_t>();
  s.membership_checks = j.at("membership_checks").get<std::uint64_t>();
  if (!j.at("error").is_null()) s.error = j.at("error").get<std::string>();
  return s;
}

inline void write_text_file(const std::filesystem::path& p, std::string_view text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write " + p.string());
}

inline std::string read_text_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// stats.jsonl (one record per execution) and summary.json.
inline void export_stats(const CampaignStats& stats, const std::filesystem::path& dir) {
  std::string lines;
  for (const auto& r : stats.records) {
    lines += to_json(r).dump();
    lines += '\n';
  }
  write_text_file(dir / "stats.jsonl", lines);
  write_text_file(dir / "summary.json", to_json(stats.summary).dump(2) + "\n");
}

inline CampaignStats import_stats(const std::filesystem::path& dir) {
  CampaignStats stats;
  std::istringstream in(read_text_file(dir / "stats.jsonl"));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      stats.records.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("stats.jsonl: ") + e.what(), line_no);
    }
  }
  try {
    stats.summary = summary_from_json(nlohmann::json::parse(read_text_file(dir / "summary.json")));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("summary.json: ") + e.what());
  }
  return stats;
}

// Coverage maps as {"kernel": {"0x..": count}, "firmware": {...}}, keys in
// address order.
inline nlohmann::ordered_json coverage_to_json(const CoverageState& state) {
  auto dump = [](const std::unordered_map<Pc, std::uint64_t>& m) {
    std::vector<std::pair<Pc, std::uint64_t>> sorted(m.begin(), m.end());
    std::sort(sorted.begin(), sorted.end());
    nlohmann::ordered_json o = nlohmann::ordered_json::object();
    for (const auto& [pc, n] : sorted) o[to_hex(pc)] = n;
    return o;
  };
  return {{"kernel", dump(state.kernel_cov)}, {"firmware", dump(state.firmware_cov)}};
}

inline CoverageState coverage_from_json(const nlohmann::json& j) {
  CoverageState s;
  for (const auto& [k, v] : j.at("kernel").items()) s.kernel_cov[parse_hex(k)] = v.get<std::uint64_t>();
  for (const auto& [k, v] : j.at("firmware").items()) s.firmware_cov[parse_hex(k)] = v.get<std::uint64_t>();
  return s;
}

inline CoverageState load_coverage(const std::filesystem::path& dir) {
  try {
    return coverage_from_json(nlohmann::json::parse(read_text_file(dir / "coverage.json")));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("coverage.json: ") + e.what());
  }
}

// Working directory: corpus/, crashes/, stats.jsonl, summary.json,
// coverage.json.
inline void save_workdir(const CampaignResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  r.corpus.save(dir / "corpus", dir / "crashes");
  export_stats(r.stats, dir);
  write_text_file(dir / "coverage.json", coverage_to_json(r.coverage).dump(2) + "\n");
}

}  // namespace mtfuzz

#endif  // MTFUZZ_CAMPAIGN_HPP_
