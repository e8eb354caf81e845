// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "autoverifix/llm.hpp"
#include "autoverifix/model.hpp"
#include "autoverifix/prompts.hpp"
#include "autoverifix/testbench.hpp"
#include "autoverifix/toolchain.hpp"

namespace autoverifix {

enum class Stage2Status { pass, fail_syntax, fail_function, budget_exhausted };

const char* to_string(Stage2Status s) noexcept;

struct Stage2Iterations {
  /// Syntax-fix prompts summed over all candidates.
  unsigned syntax = 0;
  unsigned function = 0;

  friend bool operator==(const Stage2Iterations&, const Stage2Iterations&) = default;
};

struct Stage2Result {
  std::string verilog_source;
  Stage2Status status = Stage2Status::fail_syntax;
  Stage2Iterations iterations;
  std::vector<Discrepancy> final_discrepancies;
  std::vector<IterationEvent> iteration_log;
};

struct Stage2Options {
  RequestParams params;
  /// Parent of the per-compile scratch directories.
  std::filesystem::path scratch_dir = std::filesystem::temp_directory_path();
};

inline constexpr const char* kDesignFile = "dut.v";
inline constexpr const char* kTestbenchFile = "tb.v";

/// Verilog generation, then compile/simulate/repair against `testbench`.
/// Each new candidate gets a fresh syntax budget; the function budget is
/// shared. Event kinds: verilog_gen, syntax_fix_verilog, function_fix,
/// transport_retry.
///
/// Throws Errc::toolchain_missing when the compiler cannot be started.
Stage2Result run_stage2(const ProblemSpec& spec, const TestbenchSource& testbench, const Gateway& gateway,
                        HdlToolchain& toolchain, const PromptForge& forge, const RunBudget& budget,
                        const Stage2Options& options);

}  // namespace autoverifix
