// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "autoverifix/harness.hpp"
#include "autoverifix/llm.hpp"
#include "autoverifix/model.hpp"
#include "autoverifix/prompts.hpp"

namespace autoverifix {

enum class Stage1Status { ok, fail_reference, budget_exhausted_coverage };

const char* to_string(Stage1Status s) noexcept;
Stage1Status parse_stage1_status(std::string_view s);

struct Stage1Iterations {
  unsigned syntax = 0;
  unsigned coverage = 0;

  friend bool operator==(const Stage1Iterations&, const Stage1Iterations&) = default;
};

struct Stage1Result {
  std::string model_source;
  Stimulus test_vectors;
  /// Trace of model_source over test_vectors.
  SimTrace trace;
  CoverageReport coverage;
  Stage1Iterations iterations;
  Stage1Status status = Stage1Status::fail_reference;
  /// Last diagnostic when status is fail_reference.
  std::string failure;
  std::vector<IterationEvent> iteration_log;

  friend bool operator==(const Stage1Result&, const Stage1Result&) = default;
};

struct Stage1Options {
  RequestParams params;
  /// Off: the initial vectors are kept whatever their coverage.
  bool coverage_feedback = true;
  double harness_time_limit_s = 10.0;
};

/// Reference-model generation with a repair loop, then coverage-driven test
/// refinement. Event kinds in iteration_log: ref_model_gen,
/// syntax_fix_python, coverage_refine, transport_retry.
Stage1Result run_stage1(const ProblemSpec& spec, const Gateway& gateway, ModelHarness& harness,
                        const PromptForge& forge, const RunBudget& budget, const Stage1Options& options);

nlohmann::json to_json(const Stage1Result& r);
Stage1Result stage1_from_json(const nlohmann::json& j, const ProblemSpec& spec);

}  // namespace autoverifix
