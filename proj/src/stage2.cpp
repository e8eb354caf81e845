// SPDX-License-Identifier: Apache-2.0
#include "autoverifix/stage2.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "exchange.hpp"

namespace autoverifix {

const char* to_string(Stage2Status s) noexcept {
  switch (s) {
    case Stage2Status::pass: return "pass";
    case Stage2Status::fail_syntax: return "fail_syntax";
    case Stage2Status::fail_function: return "fail_function";
    case Stage2Status::budget_exhausted: return "budget_exhausted";
  }
  return "fail_syntax";
}

namespace {

constexpr const char* kStage = "stage2";

Diagnostic synthetic(std::string message, std::string raw = {}) {
  if (raw.empty()) raw = message;
  return Diagnostic{Severity::error, kDesignFile, std::nullopt, std::move(message), std::move(raw)};
}

std::vector<Diagnostic> errors_only(const std::vector<Diagnostic>& all) {
  std::vector<Diagnostic> out;
  std::copy_if(all.begin(), all.end(), std::back_inserter(out),
               [](const Diagnostic& d) { return d.severity == Severity::error; });
  return out;
}

struct SimStep {
  std::optional<SimOutcome> outcome;
  /// Set when simulation produced no verdict.
  std::string failure;
};

}  // namespace

Stage2Result run_stage2(const ProblemSpec& spec, const TestbenchSource& testbench, const Gateway& gateway,
                        HdlToolchain& toolchain, const PromptForge& forge, const RunBudget& budget,
                        const Stage2Options& options) {
  validate(budget);
  Stage2Result result;
  auto& log = result.iteration_log;

  std::optional<std::string> candidate;
  std::string gen_failure;
  auto absorb = [&](const detail::Exchange& ex) {
    if (!ex.content) {
      candidate.reset();
      gen_failure = "response was truncated at the token limit";
      return;
    }
    try {
      candidate = extract_code_block(*ex.content, CodeLang::verilog);
    } catch (const Error&) {
      candidate.reset();
      gen_failure = "response contained no ```verilog block";
    }
  };

  auto ex = detail::exchange(gateway, forge.verilog_gen(spec, options.params), kStage, log);
  absorb(ex);
  std::string last_source;

  for (;;) {
    // Compile until clean or out of syntax budget for this candidate.
    unsigned syntax_used = 0;
    std::optional<ScopedWorkdir> work;
    std::optional<std::filesystem::path> artifact;
    for (;;) {
      std::vector<Diagnostic> diags;
      if (candidate) {
        last_source = *candidate;
        work.emplace(options.scratch_dir, "avx-s2");
        auto compiled = toolchain.compile({SourceFile{kDesignFile, *candidate}, SourceFile{kTestbenchFile, testbench.source}},
                                          testbench.top, work->path());
        if (compiled.ok()) {
          artifact = compiled.artifact;
          log[ex.event_index].summary = "compiled";
          break;
        }
        diags = errors_only(compiled.diagnostics);
        if (diags.empty()) diags.push_back(synthetic("compilation failed", compiled.tool_output));
      } else {
        diags.push_back(synthetic(gen_failure));
      }
      if (log[ex.event_index].summary.empty())
        log[ex.event_index].summary = fmt::format("{} compile error(s): {}", diags.size(), detail::first_line(diags[0].raw));
      if (syntax_used >= budget.max_verilog_syntax_iters) {
        result.status = Stage2Status::fail_syntax;
        result.verilog_source = last_source;
        return result;
      }
      ++syntax_used;
      ++result.iterations.syntax;
      ex = detail::exchange(gateway, forge.syntax_fix(CodeLang::verilog, spec, candidate.value_or(""), diags, options.params),
                            kStage, log);
      absorb(ex);
    }

    SimStep sim;
    try {
      sim.outcome = parse_sim_output(toolchain.simulate(*artifact, budget.sim_timeout), spec);
      if (sim.outcome->verdict == SimVerdict::malformed) {
        sim.failure = "simulation output did not follow the testbench protocol: " + sim.outcome->note;
      }
    } catch (const Error& e) {
      if (e.code() == Errc::sim_timeout) {
        sim.failure = fmt::format(
            "simulation did not terminate within {} ms; look for a combinational loop or a missing clock edge",
            budget.sim_timeout.count());
      } else if (e.code() == Errc::sim_crash) {
        sim.failure = e.what();
      } else {
        throw;
      }
    }
    work.reset();

    result.verilog_source = *candidate;
    auto& summary = log[ex.event_index].summary;
    if (sim.outcome && sim.outcome->verdict == SimVerdict::pass) {
      summary += ", simulation pass";
      result.final_discrepancies.clear();
      result.status = Stage2Status::pass;
      return result;
    }
    const bool verdict_fail = sim.outcome && sim.outcome->verdict == SimVerdict::fail;
    if (verdict_fail) {
      result.final_discrepancies = sim.outcome->discrepancies;
      summary += fmt::format(", {} mismatch(es)", result.final_discrepancies.size());
    } else {
      result.final_discrepancies.clear();
      summary += ", " + detail::first_line(sim.failure);
    }
    if (result.iterations.function >= budget.max_function_iters) {
      result.status = verdict_fail ? Stage2Status::fail_function : Stage2Status::budget_exhausted;
      return result;
    }
    ++result.iterations.function;
    auto request = verdict_fail ? forge.function_fix(spec, *candidate, result.final_discrepancies, testbench.stimulus,
                                                     budget.max_reported_discrepancies, options.params)
                                : forge.simulation_failure(spec, *candidate, sim.failure, options.params);
    ex = detail::exchange(gateway, request, kStage, log);
    absorb(ex);
  }
}

}  // namespace autoverifix
