// SPDX-License-Identifier: Apache-2.0
#include "autoverifix/stage1.hpp"

#include <fmt/format.h>

#include <regex>

#include "autoverifix/json_io.hpp"
#include "exchange.hpp"

namespace autoverifix {

const char* to_string(Stage1Status s) noexcept {
  switch (s) {
    case Stage1Status::ok: return "ok";
    case Stage1Status::fail_reference: return "fail_reference";
    case Stage1Status::budget_exhausted_coverage: return "budget_exhausted_coverage";
  }
  return "fail_reference";
}

Stage1Status parse_stage1_status(std::string_view s) {
  for (auto st : {Stage1Status::ok, Stage1Status::fail_reference, Stage1Status::budget_exhausted_coverage})
    if (s == to_string(st)) return st;
  throw Error(Errc::malformed, fmt::format("unknown stage-1 status '{}'", s));
}

namespace {

constexpr const char* kStage = "stage1";
constexpr const char* kModelFile = "model.py";

bool has_tagged_fence(std::string_view text, std::string_view tag) {
  static const std::regex fence(R"((^|\n)[ \t]*```[ \t]*([A-Za-z0-9_+-]*))");
  const std::string s(text);
  for (std::sregex_iterator it(s.begin(), s.end(), fence), end; it != end; ++it)
    if ((*it)[2].str() == tag) return true;
  return false;
}

Diagnostic input_diagnostic(std::string message) {
  return Diagnostic{Severity::error, "input_sequence.json", std::nullopt, "input sequence: " + message,
                    "input sequence: " + message};
}

Stimulus parse_vectors(const std::string& block, const ProblemSpec& spec) {
  json j;
  try {
    j = json::parse(block);
  } catch (const json::exception& e) {
    throw Error(Errc::malformed, fmt::format("not valid JSON ({})", e.what()));
  }
  auto vectors = stimulus_from_json(j, spec);
  if (vectors.empty()) throw Error(Errc::malformed, "the sequence is empty");
  return vectors;
}

/// Harness error text -> diagnostic. The line number is the last "line N"
/// mention (innermost traceback frame).
Diagnostic harness_diagnostic(const HarnessResult& r) {
  static const std::regex line_re(R"(line (\d+))");
  Diagnostic d;
  d.file = kModelFile;
  d.raw = r.error_text.empty() ? std::string(to_string(r.status)) : r.error_text;
  for (std::sregex_iterator it(d.raw.begin(), d.raw.end(), line_re), end; it != end; ++it)
    d.line = static_cast<unsigned>(std::stoul((*it)[1].str()));
  std::string last;
  std::size_t pos = 0;
  while (pos <= d.raw.size()) {
    auto nl = d.raw.find('\n', pos);
    auto line = d.raw.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    if (line.find_first_not_of(" \t\r") != std::string::npos) last = line;
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
  d.message = fmt::format("{}: {}", to_string(r.status), detail::first_line(last));
  return d;
}

std::string coverage_summary(const CoverageReport& c) {
  return fmt::format("coverage {:.1f}% ({}/{})", c.ratio * 100.0, c.covered_lines, c.total_lines);
}

}  // namespace

Stage1Result run_stage1(const ProblemSpec& spec, const Gateway& gateway, ModelHarness& harness,
                        const PromptForge& forge, const RunBudget& budget, const Stage1Options& options) {
  validate(budget);
  Stage1Result result;
  auto& log = result.iteration_log;

  std::optional<std::string> source;
  std::optional<Stimulus> vectors;
  std::optional<Diagnostic> diag;

  auto absorb = [&](const detail::Exchange& ex, bool vectors_required) {
    diag.reset();
    if (!ex.content) {
      diag = Diagnostic{Severity::error, kModelFile, std::nullopt, "response was truncated at the token limit",
                        ex.failure};
      return;
    }
    try {
      source = extract_code_block(*ex.content, CodeLang::python);
    } catch (const Error&) {
      diag = Diagnostic{Severity::error, kModelFile, std::nullopt, "response contained no ```python block",
                        "response contained no ```python block"};
    }
    if (!vectors_required && !has_tagged_fence(*ex.content, "json")) return;
    try {
      vectors = parse_vectors(extract_code_block(*ex.content, CodeLang::json), spec);
    } catch (const Error& e) {
      if (!diag) diag = input_diagnostic(e.code() == Errc::no_code_block ? "no ```json block" : e.what());
    }
  };

  auto ex = detail::exchange(gateway, forge.ref_model(spec, options.params), kStage, log);
  absorb(ex, true);

  HarnessResult accepted;
  for (;;) {
    if (!diag && !vectors) diag = input_diagnostic("no ```json block");
    if (!diag) {
      auto job = make_harness_job(spec, *source, *vectors, options.harness_time_limit_s);
      auto run = harness.execute(spec, job);
      if (run.status == HarnessStatus::ok) {
        log[ex.event_index].summary = "harness ok, " + coverage_summary(*run.coverage);
        accepted = std::move(run);
        break;
      }
      diag = harness_diagnostic(run);
    }
    if (log[ex.event_index].summary.empty()) log[ex.event_index].summary = diag->message;
    if (result.iterations.syntax >= budget.max_python_syntax_iters) {
      result.status = Stage1Status::fail_reference;
      result.failure = diag->message;
      result.model_source = source.value_or("");
      if (vectors) result.test_vectors = *vectors;
      return result;
    }
    ++result.iterations.syntax;
    ex = detail::exchange(gateway,
                          forge.syntax_fix(CodeLang::python, spec, source.value_or(""), {*diag}, options.params),
                          kStage, log);
    absorb(ex, false);
  }

  result.model_source = *source;
  result.test_vectors = *vectors;
  result.trace = std::move(accepted.trace);
  result.coverage = *accepted.coverage;

  while (options.coverage_feedback && result.coverage.ratio < budget.coverage_threshold &&
         result.iterations.coverage < budget.max_coverage_iters) {
    ++result.iterations.coverage;
    auto cx = detail::exchange(gateway,
                               forge.coverage_refine(spec, result.model_source, result.test_vectors, result.coverage,
                                                     budget.coverage_threshold, options.params),
                               kStage, log);
    if (!cx.content) continue;
    auto& summary = log[cx.event_index].summary;
    Stimulus refined;
    try {
      refined = parse_vectors(extract_code_block(*cx.content, CodeLang::json), spec);
    } catch (const Error& e) {
      summary = e.code() == Errc::no_code_block ? "no ```json block" : e.what();
      continue;
    }
    auto run = harness.execute(spec, make_harness_job(spec, result.model_source, refined, options.harness_time_limit_s));
    if (run.status != HarnessStatus::ok) {
      summary = harness_diagnostic(run).message;
      continue;
    }
    summary = "harness ok, " + coverage_summary(*run.coverage);
    if (run.coverage->ratio > result.coverage.ratio) {
      result.test_vectors = std::move(refined);
      result.trace = std::move(run.trace);
      result.coverage = *run.coverage;
    } else {
      summary += ", not retained";
    }
  }

  result.status = result.coverage.ratio >= budget.coverage_threshold ? Stage1Status::ok
                                                                      : Stage1Status::budget_exhausted_coverage;
  return result;
}

json to_json(const Stage1Result& r) {
  json log = json::array();
  for (const auto& e : r.iteration_log) log.push_back(to_json(e));
  return json{{"status", to_string(r.status)},
              {"model_source", r.model_source},
              {"test_vectors", to_json(r.test_vectors)},
              {"trace", to_json(r.trace)},
              {"coverage", to_json(r.coverage)},
              {"iterations", {{"syntax", r.iterations.syntax}, {"coverage", r.iterations.coverage}}},
              {"failure", r.failure},
              {"iteration_log", std::move(log)}};
}

Stage1Result stage1_from_json(const json& j, const ProblemSpec& spec) {
  try {
    Stage1Result r;
    r.status = parse_stage1_status(j.at("status").get<std::string>());
    r.model_source = j.at("model_source").get<std::string>();
    r.test_vectors = stimulus_from_json(j.at("test_vectors"), spec);
    r.trace = j.at("trace").empty() ? SimTrace{} : trace_from_json(j.at("trace"), spec);
    r.coverage = coverage_from_json(j.at("coverage"));
    r.iterations.syntax = j.at("iterations").at("syntax").get<unsigned>();
    r.iterations.coverage = j.at("iterations").at("coverage").get<unsigned>();
    r.failure = j.at("failure").get<std::string>();
    for (const auto& e : j.at("iteration_log")) r.iteration_log.push_back(event_from_json(e));
    return r;
  } catch (const json::exception& e) {
    throw Error(Errc::malformed, fmt::format("stage-1 record: {}", e.what()));
  }
}

}  // namespace autoverifix
