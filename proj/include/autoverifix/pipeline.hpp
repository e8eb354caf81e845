// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>

#include "autoverifix/harness.hpp"
#include "autoverifix/llm.hpp"
#include "autoverifix/model.hpp"
#include "autoverifix/prompts.hpp"
#include "autoverifix/stage1.hpp"
#include "autoverifix/stage2.hpp"
#include "autoverifix/testbench.hpp"
#include "autoverifix/toolchain.hpp"

namespace autoverifix {

/// Borrowed collaborators; all must outlive the call.
struct PipelineServices {
  const Gateway& stage1;
  const Gateway& stage2;
  ModelHarness& harness;
  HdlToolchain& toolchain;
  const PromptForge& forge;
};

struct PipelineSettings {
  RunBudget budget;
  bool coverage_feedback = true;
  RequestParams stage1_params;
  RequestParams stage2_params;
  double harness_time_limit_s = 10.0;
  TestbenchOptions testbench;
  std::filesystem::path scratch_dir = std::filesystem::temp_directory_path();
};

/// Stage-1 result plus the testbench synthesized from it (absent when the
/// reference model failed).
struct ReferenceProduct {
  Stage1Result stage1;
  std::optional<TestbenchSource> testbench;
};

ReferenceProduct build_reference(const ProblemSpec& spec, const PipelineServices& services,
                                 const PipelineSettings& settings);

/// Runs stage 2 for one sample against a shared reference product.
PipelineOutcome run_sample(const ProblemSpec& spec, const ReferenceProduct& reference,
                           const PipelineServices& services, const PipelineSettings& settings,
                           unsigned sample_index);

/// Both stages for a single sample.
PipelineOutcome run_pipeline(const ProblemSpec& spec, const PipelineServices& services,
                             const PipelineSettings& settings, unsigned sample_index = 0);

}  // namespace autoverifix
