// SPDX-License-Identifier: Apache-2.0
#include "autoverifix/pipeline.hpp"

namespace autoverifix {

namespace {

PipelineStatus map_status(Stage2Status s) {
  switch (s) {
    case Stage2Status::pass: return PipelineStatus::pass;
    case Stage2Status::fail_syntax: return PipelineStatus::fail_syntax;
    case Stage2Status::fail_function: return PipelineStatus::fail_function;
    case Stage2Status::budget_exhausted: return PipelineStatus::budget_exhausted;
  }
  return PipelineStatus::fail_syntax;
}

}  // namespace

ReferenceProduct build_reference(const ProblemSpec& spec, const PipelineServices& services,
                                 const PipelineSettings& settings) {
  validate(spec);
  Stage1Options opts;
  opts.params = settings.stage1_params;
  opts.coverage_feedback = settings.coverage_feedback;
  opts.harness_time_limit_s = settings.harness_time_limit_s;
  ReferenceProduct product;
  product.stage1 = run_stage1(spec, services.stage1, services.harness, services.forge, settings.budget, opts);
  if (product.stage1.status != Stage1Status::fail_reference)
    product.testbench = synthesize_testbench(spec, product.stage1.trace, settings.testbench);
  return product;
}

PipelineOutcome run_sample(const ProblemSpec& spec, const ReferenceProduct& reference,
                           const PipelineServices& services, const PipelineSettings& settings,
                           unsigned sample_index) {
  PipelineOutcome outcome;
  outcome.problem_id = spec.id;
  outcome.reference_source = reference.stage1.model_source;
  outcome.test_vectors = reference.stage1.test_vectors;
  outcome.coverage = reference.stage1.coverage;
  outcome.iteration_log = reference.stage1.iteration_log;
  if (!reference.testbench) {
    outcome.status = PipelineStatus::fail_reference;
    return outcome;
  }
  outcome.testbench_source = reference.testbench->source;

  Stage2Options opts;
  opts.params = settings.stage2_params;
  opts.params.sample_index = sample_index;
  opts.scratch_dir = settings.scratch_dir;
  auto s2 = run_stage2(spec, *reference.testbench, services.stage2, services.toolchain, services.forge,
                       settings.budget, opts);
  outcome.status = map_status(s2.status);
  outcome.verilog_source = std::move(s2.verilog_source);
  outcome.iteration_log.insert(outcome.iteration_log.end(), s2.iteration_log.begin(), s2.iteration_log.end());
  return outcome;
}

PipelineOutcome run_pipeline(const ProblemSpec& spec, const PipelineServices& services,
                             const PipelineSettings& settings, unsigned sample_index) {
  return run_sample(spec, build_reference(spec, services, settings), services, settings, sample_index);
}

}  // namespace autoverifix
