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

// Deterministic two-component target: a toy kernel that forwards SBI base
// extension calls across an ecall boundary into toy firmware. Scenarios:
//
//   sbi_base  byte0 is the extension id, byte1 the function id. Only
//             eid 0x10 reaches firmware, which switches on fid (7 cases
//             plus default). Every fid shares the same kernel-side path.
//   shm_bug   as sbi_base, but fid 2 also passes a shared buffer with a
//             declared length (byte2) and actual length (byte3). A declared
//             length larger than the actual one overflows in firmware and
//             the kernel cleanup path then faults.
//
// Missing input bytes read as zero.

#ifndef MTFUZZ_SIM_TARGET_HPP_
#define MTFUZZ_SIM_TARGET_HPP_

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mtfuzz/backend.hpp"
#include "mtfuzz/error.hpp"
#include "mtfuzz/filter.hpp"
#include "mtfuzz/rng.hpp"
#include "mtfuzz/trace.hpp"

namespace mtfuzz {

enum class Component { kKernel, kFirmware };

struct AddressRange {
  Pc lower = 0;
  Pc upper = 0;
  bool contains(Pc pc) const { return pc >= lower && pc <= upper; }
};

// A labelled basic block of the simulated target and where it "lives" in
// the bundled pseudo-source.
struct CodeSite {
  std::string_view label;
  Pc pc;
  Component component;
  std::string_view function;
  std::string_view file;
  std::string_view marker;  // unique substring of the source line
};

namespace sim {

inline constexpr std::uint8_t kBaseExtensionId = 0x10;
inline constexpr int kBaseFunctionCount = 7;
inline constexpr std::uint8_t kShmFunctionId = 2;
inline constexpr std::int64_t kResidualThreshold = 16;
inline constexpr std::int64_t kBaseExecMicros = 50;

inline constexpr AddressRange kKernelRange{0xffffffff80010000ULL,
                                           0xffffffff8001ffffULL};
inline constexpr AddressRange kFirmwareRange{0x0000000080000000ULL,
                                             0x000000008000ffffULL};
inline constexpr AddressRange kNoiseRange{0xffffffff90000000ULL,
                                          0xffffffff9000ffffULL};

inline constexpr std::string_view kKernelFile = "arch/riscv/kernel/sbi_test.c";
inline constexpr std::string_view kFirmwareEcallFile = "lib/sbi/sbi_ecall.c";
inline constexpr std::string_view kFirmwareBaseFile = "lib/sbi/sbi_ecall_base.c";

inline constexpr std::string_view kKernelSource = R"(// SPDX-License-Identifier: GPL-2.0-only
/*
 * Test driver that forwards a raw argument block to the SBI.
 */
#include <linux/types.h>
#include <asm/sbi.h>

#define SBI_EXT_BASE		0x10
#define SBI_SHM_FID		2
#define RESIDUAL_THRESHOLD	16

static unsigned long sbi_calls;
static struct sbi_shm *sbi_shm_buf;

static long sbi_args_error(unsigned long eid)
{
	if (eid < SBI_EXT_BASE)
		return -EINVAL;
	return -EOPNOTSUPP;
}

static void shm_release(struct sbi_shm *shm)
{
	list_del(&shm->node);
	shm->pool->ops->free(shm->pool, shm);
}

long sbi_test_ioctl(const u8 *args, size_t len)
{
	struct sbiret ret;
	long err = 0;

	if (sbi_calls >= RESIDUAL_THRESHOLD)
		trace_sbi_residual(sbi_calls);
	if (len < 2)
		pr_debug("sbi_test: short argument block\n");
	if (args[0] != SBI_EXT_BASE) {
		err = sbi_args_error(args[0]);
		goto out;
	}
	sbi_calls++;
	ret = __sbi_ecall(args[2], args[3], 0, 0, 0, 0, args[1], args[0]);
	err = sbi_err_map_linux_errno(ret.error);
	if (args[1] == SBI_SHM_FID)
		shm_release(sbi_shm_buf);
out:
	return err;
}
)";

inline constexpr std::string_view kFirmwareEcallSource = R"(/*
 * SPDX-License-Identifier: BSD-2-Clause
 */
#include <sbi/sbi_ecall.h>
#include <sbi/sbi_trap.h>

int sbi_ecall_handler(struct sbi_trap_context *tcntx)
{
	struct sbi_trap_regs *regs = &tcntx->regs;
	struct sbi_ecall_return out = {0};
	struct sbi_ecall_extension *ext;
	int ret;

	ext = sbi_ecall_find_extension(regs->a7);
	ret = ext->handle(regs->a7, regs->a6, regs, &out);
	regs->a0 = ret;
	regs->a1 = out.value;
	regs->mepc += 4;
	return 0;
}
)";

inline constexpr std::string_view kFirmwareBaseSource = R"(/*
 * SPDX-License-Identifier: BSD-2-Clause
 */
#include <sbi/sbi_ecall.h>
#include <sbi/sbi_ecall_interface.h>
#include <sbi/sbi_error.h>

static int sbi_shm_crypt(unsigned long declared, unsigned long actual)
{
	if (!sbi_shm_valid(declared, actual))
		return SBI_EINVAL;
	if (declared > actual)
		sbi_memcpy(shm_out, shm_in, declared);
	else
		sbi_memcpy(shm_out, shm_in, actual);
	return 0;
}

static int sbi_ecall_base_handler(unsigned long extid, unsigned long funcid,
				  struct sbi_trap_regs *regs,
				  struct sbi_ecall_return *out)
{
	int ret = 0;

	switch (funcid) {
	case SBI_EXT_BASE_GET_SPEC_VERSION:
		out->value = sbi_ecall_version();
		break;
	case SBI_EXT_BASE_GET_IMP_ID:
		out->value = sbi_ecall_get_impid();
		break;
	case SBI_EXT_BASE_GET_IMP_VERSION:
		out->value = OPENSBI_VERSION;
		if (sbi_shm_enabled())
			ret = sbi_shm_crypt(regs->a0, regs->a1);
		break;
	case SBI_EXT_BASE_PROBE_EXT:
		ret = sbi_ecall_base_probe(regs->a0, &out->value);
		break;
	case SBI_EXT_BASE_GET_MVENDORID:
		out->value = csr_read(CSR_MVENDORID);
		break;
	case SBI_EXT_BASE_GET_MARCHID:
		out->value = csr_read(CSR_MARCHID);
		break;
	case SBI_EXT_BASE_GET_MIMPID:
		out->value = csr_read(CSR_MIMPID);
		break;
	default:
		ret = SBI_ENOTSUPP;
	}

	return ret;
}
)";

// clang-format off
inline constexpr CodeSite kSites[] = {
  {"k_entry",           0xffffffff80010100ULL, Component::kKernel, "sbi_test_ioctl", kKernelFile, "struct sbiret ret;"},
  {"k_residual",        0xffffffff80010120ULL, Component::kKernel, "sbi_test_ioctl", kKernelFile, "trace_sbi_residual(sbi_calls);"},
  {"k_short_args",      0xffffffff80010140ULL, Component::kKernel, "sbi_test_ioctl", kKernelFile, "pr_debug("},
  {"k_eid_check",       0xffffffff80010160ULL, Component::kKernel, "sbi_test_ioctl", kKernelFile, "if (args[0] != SBI_EXT_BASE) {"},
  {"k_eid_low",         0xffffffff80010180ULL, Component::kKernel, "sbi_args_error", kKernelFile, "return -EINVAL;"},
  {"k_eid_high",        0xffffffff800101a0ULL, Component::kKernel, "sbi_args_error", kKernelFile, "return -EOPNOTSUPP;"},
  {"k_error_return",    0xffffffff800101c0ULL, Component::kKernel, "sbi_test_ioctl", kKernelFile, "goto out;"},
  {"k_dispatch",        0xffffffff80010200ULL, Component::kKernel, "sbi_test_ioctl", kKernelFile, "sbi_calls++;"},
  {"k_ecall_entry",     0xffffffff80010220ULL, Component::kKernel, "__sbi_ecall",    kKernelFile, "ret = __sbi_ecall("},
  {"k_ecall_return",    0xffffffff80010240ULL, Component::kKernel, "sbi_test_ioctl", kKernelFile, "err = sbi_err_map_linux_errno"},
  {"k_shm_cleanup",     0xffffffff80010260ULL, Component::kKernel, "shm_release",    kKernelFile, "list_del(&shm->node);"},
  {"k_shm_fault",       0xffffffff80010280ULL, Component::kKernel, "shm_release",    kKernelFile, "shm->pool->ops->free"},
  {"k_exit",            0xffffffff800102a0ULL, Component::kKernel, "sbi_test_ioctl", kKernelFile, "return err;"},
  {"fw_trap_entry",     0x0000000080000100ULL, Component::kFirmware, "sbi_ecall_handler", kFirmwareEcallFile, "struct sbi_trap_regs *regs = &tcntx->regs;"},
  {"fw_ecall_handler",  0x0000000080000120ULL, Component::kFirmware, "sbi_ecall_handler", kFirmwareEcallFile, "ret = ext->handle("},
  {"fw_trap_exit",      0x0000000080000140ULL, Component::kFirmware, "sbi_ecall_handler", kFirmwareEcallFile, "regs->mepc += 4;"},
  {"fw_base_prologue",  0x0000000080000200ULL, Component::kFirmware, "sbi_ecall_base_handler", kFirmwareBaseFile, "int ret = 0;"},
  {"fw_fid0",           0x0000000080000220ULL, Component::kFirmware, "sbi_ecall_base_handler", kFirmwareBaseFile, "out->value = sbi_ecall_version();"},
  {"fw_fid1",           0x0000000080000240ULL, Component::kFirmware, "sbi_ecall_base_handler", kFirmwareBaseFile, "out->value = sbi_ecall_get_impid();"},
  {"fw_fid2",           0x0000000080000260ULL, Component::kFirmware, "sbi_ecall_base_handler", kFirmwareBaseFile, "out->value = OPENSBI_VERSION;"},
  {"fw_fid3",           0x0000000080000280ULL, Component::kFirmware, "sbi_ecall_base_handler", kFirmwareBaseFile, "ret = sbi_ecall_base_probe("},
  {"fw_fid4",           0x00000000800002a0ULL, Component::kFirmware, "sbi_ecall_base_handler", kFirmwareBaseFile, "csr_read(CSR_MVENDORID);"},
  {"fw_fid5",           0x00000000800002c0ULL, Component::kFirmware, "sbi_ecall_base_handler", kFirmwareBaseFile, "csr_read(CSR_MARCHID);"},
  {"fw_fid6",           0x00000000800002e0ULL, Component::kFirmware, "sbi_ecall_base_handler", kFirmwareBaseFile, "csr_read(CSR_MIMPID);"},
  {"fw_default",        0x0000000080000300ULL, Component::kFirmware, "sbi_ecall_base_handler", kFirmwareBaseFile, "ret = SBI_ENOTSUPP;"},
  {"fw_base_epilogue",  0x0000000080000320ULL, Component::kFirmware, "sbi_ecall_base_handler", kFirmwareBaseFile, "return ret;"},
  {"fw_shm_validate",   0x0000000080000400ULL, Component::kFirmware, "sbi_shm_crypt", kFirmwareBaseFile, "if (!sbi_shm_valid(declared, actual))"},
  {"fw_shm_overflow",   0x0000000080000420ULL, Component::kFirmware, "sbi_shm_crypt", kFirmwareBaseFile, "sbi_memcpy(shm_out, shm_in, declared);"},
  {"fw_shm_copy",       0x0000000080000440ULL, Component::kFirmware, "sbi_shm_crypt", kFirmwareBaseFile, "sbi_memcpy(shm_out, shm_in, actual);"},
};
// clang-format on

constexpr const CodeSite& site(std::string_view label) {
  for (const auto& s : kSites) {
    if (s.label == label) return s;
  }
  throw NotFoundError("no code site labelled '" + std::string(label) + "'");
}

constexpr Pc pc(std::string_view label) { return site(label).pc; }

// Compile-time lookup for the hot path.
consteval Pc pc_of(std::string_view label) { return site(label).pc; }

inline Pc fid_pc(int fid) {
  static const Pc pcs[] = {pc("fw_fid0"), pc("fw_fid1"), pc("fw_fid2"),
                           pc("fw_fid3"), pc("fw_fid4"), pc("fw_fid5"),
                           pc("fw_fid6")};
  return fid >= 0 && fid < kBaseFunctionCount ? pcs[fid] : pc("fw_default");
}

inline std::string_view source_text(std::string_view file) {
  if (file == kKernelFile) return kKernelSource;
  if (file == kFirmwareEcallFile) return kFirmwareEcallSource;
  if (file == kFirmwareBaseFile) return kFirmwareBaseSource;
  return {};
}

// 1-based line holding the site's marker; 0 if absent.
inline std::size_t site_line(const CodeSite& s) {
  std::string_view text = source_text(s.file);
  std::size_t pos = text.find(s.marker);
  if (pos == std::string_view::npos) return 0;
  std::size_t line = 1;
  for (std::size_t i = 0; i < pos; ++i) line += text[i] == '\n';
  return line;
}

}  // namespace sim

struct ScenarioLayout {
  std::string scenario;
  AddressRange kernel_range;
  AddressRange firmware_range;
  AddressRange noise_range;
  std::map<std::string, Pc> branch_pcs;

  // The pcs whose coverage defines "full coverage" of the switch.
  std::vector<Pc> case_branch_pcs() const {
    std::vector<Pc> out;
    for (int fid = 0; fid < sim::kBaseFunctionCount; ++fid) {
      out.push_back(sim::fid_pc(fid));
    }
    return out;
  }
};

inline bool is_known_scenario(std::string_view name) {
  return name == "sbi_base" || name == "shm_bug";
}

inline ScenarioLayout scenario_layout(std::string_view scenario) {
  if (!is_known_scenario(scenario)) {
    throw ValidationError("unknown scenario '" + std::string(scenario) + "'");
  }
  ScenarioLayout layout;
  layout.scenario = std::string(scenario);
  layout.kernel_range = sim::kKernelRange;
  layout.firmware_range = sim::kFirmwareRange;
  layout.noise_range = sim::kNoiseRange;
  for (const auto& s : sim::kSites) {
    bool shm_only = s.label.starts_with("fw_shm") ||
                    s.label.starts_with("k_shm");
    if (shm_only && scenario != "shm_bug") continue;
    layout.branch_pcs.emplace(std::string(s.label), s.pc);
  }
  return layout;
}

inline nlohmann::ordered_json layout_to_json(const ScenarioLayout& layout) {
  auto range = [](const AddressRange& r) {
    return nlohmann::ordered_json{{"lower", to_hex(r.lower)},
                                  {"upper", to_hex(r.upper)}};
  };
  nlohmann::ordered_json branches = nlohmann::ordered_json::object();
  for (const auto& [label, pc] : layout.branch_pcs) branches[label] = to_hex(pc);
  return {{"scenario", layout.scenario},
          {"kernel_range", range(layout.kernel_range)},
          {"firmware_range", range(layout.firmware_range)},
          {"noise_range", range(layout.noise_range)},
          {"branch_pcs", branches}};
}

// The filters a user would write for this scenario: one range per component.
inline AddressFilterSet scenario_filters(const ScenarioLayout& layout) {
  return {FilterList({{"sim_kernel", layout.kernel_range.lower,
                       layout.kernel_range.upper}}),
          FilterList({{"sim_firmware", layout.firmware_range.lower,
                       layout.firmware_range.upper}})};
}

// Busy-waits so wall-clock throughput tracks simulated cost.
inline void spin_until(std::chrono::steady_clock::time_point deadline) {
  while (std::chrono::steady_clock::now() < deadline) {
  }
}

struct SimState {
  std::int64_t persistent_counter = 0;
  std::uint64_t run_counter = 0;
  bool crashed = false;
  std::string scenario;

  bool operator==(const SimState&) const = default;
};

struct SimOptions {
  std::string scenario = "sbi_base";
  bool noise = false;
  // Spin for each execution's simulated duration (and each snapshot load's
  // simulated cost) so wall-clock budgets behave like a real VM.
  bool realtime = false;
  bool supports_snapshot = true;
  // Snapshot load cost as a fraction of the mean execution time so far.
  double snapshot_cost_ratio = 0.12;
};

class SimTarget : public TargetBackend {
 public:
  explicit SimTarget(SimOptions options = {})
      : options_(std::move(options)),
        layout_(scenario_layout(options_.scenario)) {
    state_.scenario = options_.scenario;
    initial_ = state_;
  }

  Capabilities capabilities() const override {
    return {options_.supports_snapshot};
  }

  ExecutionResult run(std::span<const std::uint8_t> input) override {
    if (state_.crashed) throw Error("sim target crashed; restart required");
    auto started = std::chrono::steady_clock::now();
    if (run_observer_) run_observer_(state_);

    ExecutionResult result;
    result.trace.reserve(options_.noise ? 64 : 24);
    Emitter emit{result.trace, options_.noise,
                 SplitMix64(mix64(state_.run_counter ^ 0x6e6f697365ULL))};
    ++state_.run_counter;
    auto byte = [&input](std::size_t i) -> std::uint8_t {
      return i < input.size() ? input[i] : 0;
    };
    std::uint8_t eid = byte(0);
    std::uint8_t fid = byte(1);
    bool shm = options_.scenario == "shm_bug" && fid == sim::kShmFunctionId;

    // Leftover state from earlier calls diverts the entry block; the trace
    // length, and so the exec time, is unchanged.
    emit(state_.persistent_counter >= sim::kResidualThreshold ? sim::pc_of("k_residual")
                                                               : sim::pc_of("k_entry"));
    if (input.size() < 2) emit(sim::pc_of("k_short_args"));
    emit(sim::pc_of("k_eid_check"));
    if (eid != sim::kBaseExtensionId) {
      emit(eid < sim::kBaseExtensionId ? sim::pc_of("k_eid_low") : sim::pc_of("k_eid_high"));
      emit(sim::pc_of("k_error_return"));
      emit(sim::pc_of("k_exit"));
      return finish(std::move(result), started);
    }
    emit(sim::pc_of("k_dispatch"));
    ++state_.persistent_counter;
    emit(sim::pc_of("k_ecall_entry"));

    // Firmware side of the ecall.
    emit(sim::pc_of("fw_trap_entry"));
    emit(sim::pc_of("fw_ecall_handler"));
    emit(sim::pc_of("fw_base_prologue"));
    emit(sim::fid_pc(fid));
    bool overflow = false;
    if (shm) {
      emit(sim::pc_of("fw_shm_validate"));
      std::uint8_t declared_len = byte(2);
      std::uint8_t actual_len = byte(3);
      overflow = declared_len > actual_len;
      emit(overflow ? sim::pc_of("fw_shm_overflow") : sim::pc_of("fw_shm_copy"));
    }
    emit(sim::pc_of("fw_base_epilogue"));
    emit(sim::pc_of("fw_trap_exit"));

    emit(sim::pc_of("k_ecall_return"));
    if (shm) {
      emit(sim::pc_of("k_shm_cleanup"));
      if (overflow) {
        emit(sim::pc_of("k_shm_fault"));
        result.outcome = Outcome::kCrash;
        result.crash_reason = "null-deref in shm cleanup";
        state_.crashed = true;
        return finish(std::move(result), started);
      }
    }
    emit(sim::pc_of("k_exit"));
    return finish(std::move(result), started);
  }

  void save_snapshot(const std::string& tag) override {
    require_snapshots();
    snapshots_[tag] = state_;
  }

  void load_snapshot(const std::string& tag) override {
    require_snapshots();
    auto it = snapshots_.find(tag);
    if (it == snapshots_.end()) {
      throw NotFoundError("no snapshot tagged '" + tag + "'");
    }
    auto started = std::chrono::steady_clock::now();
    state_ = it->second;
    last_snapshot_cost_ = std::chrono::microseconds(
        static_cast<std::int64_t>(options_.snapshot_cost_ratio * mean_exec_micros()));
    if (options_.realtime) spin_until(started + last_snapshot_cost_);
  }

  void restart() override { state_ = initial_; }

  const SimState& state() const { return state_; }
  SimState& mutable_state() { return state_; }
  const ScenarioLayout& layout() const { return layout_; }
  const SimOptions& options() const { return options_; }
  std::chrono::microseconds last_snapshot_cost() const {
    return last_snapshot_cost_;
  }
  double mean_exec_micros() const {
    return runs_ == 0 ? 0.0 : total_exec_micros_ / static_cast<double>(runs_);
  }

  // Called with the state as it stands when each run begins.
  void set_run_observer(std::function<void(const SimState&)> observer) {
    run_observer_ = std::move(observer);
  }

 private:
  struct Emitter {
    Trace& trace;
    bool noise;
    SplitMix64 rng;

    // Unrelated kernel activity (scheduler, interrupts) lands between blocks.
    void operator()(Pc pc) {
      trace.push_back(pc);
      if (!noise) return;
      for (auto n = rng.below(3); n > 0; --n) {
        trace.push_back(sim::kNoiseRange.lower + rng.below(4096) * 4);
      }
    }
  };

  ExecutionResult finish(ExecutionResult result,
                         std::chrono::steady_clock::time_point started) {
    result.exec_time = std::chrono::microseconds(
        sim::kBaseExecMicros + static_cast<std::int64_t>(result.trace.size()));
    total_exec_micros_ += static_cast<double>(result.exec_time.count());
    ++runs_;
    if (options_.realtime) spin_until(started + result.exec_time);
    return result;
  }

  void require_snapshots() const {
    if (!options_.supports_snapshot) {
      throw CapabilityError("backend does not support snapshots");
    }
  }

  SimOptions options_;
  ScenarioLayout layout_;
  SimState state_;
  SimState initial_;
  std::map<std::string, SimState> snapshots_;
  std::function<void(const SimState&)> run_observer_;
  double total_exec_micros_ = 0.0;
  std::uint64_t runs_ = 0;
  std::chrono::microseconds last_snapshot_cost_{0};
};

}  // namespace mtfuzz

#endif  // MTFUZZ_SIM_TARGET_HPP_
