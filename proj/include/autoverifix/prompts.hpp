// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autoverifix/llm.hpp"
#include "autoverifix/model.hpp"

namespace autoverifix {

enum class PromptKind { ref_model_gen, coverage_refine, verilog_gen, syntax_fix_python, syntax_fix_verilog, function_fix };

inline constexpr std::array kPromptKinds{PromptKind::ref_model_gen,     PromptKind::coverage_refine,
                                         PromptKind::verilog_gen,       PromptKind::syntax_fix_python,
                                         PromptKind::syntax_fix_verilog, PromptKind::function_fix};

const char* to_string(PromptKind kind) noexcept;

struct PromptTemplate {
  PromptKind kind = PromptKind::ref_model_gen;
  std::string system_text;
  /// Text with `{{name}}` placeholders.
  std::string user_template;
};

/// Substitutes every `{{name}}`. Substituted text is not rescanned. Throws
/// Errc::missing_field for a placeholder without a binding.
std::string render_template(std::string_view text, const std::map<std::string, std::string>& bindings);

/// Placeholder names in order of first appearance.
std::vector<std::string> template_placeholders(std::string_view text);

/// Loads `<kind>.system.txt` and `<kind>.user.txt` for every prompt kind. A
/// leading "# SPDX-License-Identifier" line is dropped.
class PromptLibrary {
 public:
  static PromptLibrary load(const std::filesystem::path& dir);
  /// Directory shipped with the sources (overridable with
  /// AUTOVERIFIX_TEMPLATE_DIR).
  static std::filesystem::path default_dir();

  const PromptTemplate& get(PromptKind kind) const { return templates_.at(kind); }

 private:
  std::map<PromptKind, PromptTemplate> templates_;
};

/// Model and decoding parameters stamped onto every request.
struct RequestParams {
  std::string model;
  double temperature = 0.8;
  unsigned max_tokens = 4096;
  std::optional<std::int64_t> seed;
  unsigned sample_index = 0;
};

/// Renders the six prompt families from structured inputs. Deterministic and
/// stateless apart from the immutable template set.
class PromptForge {
 public:
  explicit PromptForge(PromptLibrary library) : library_(std::move(library)) {}

  /// Throws Errc::missing_field when the description is empty.
  ChatRequest ref_model(const ProblemSpec& spec, const RequestParams& params) const;

  /// Requires report.ratio < threshold (Errc::precondition otherwise).
  ChatRequest coverage_refine(const ProblemSpec& spec, std::string_view model_source, const Stimulus& current_tests,
                              const CoverageReport& report, double threshold, const RequestParams& params) const;

  ChatRequest verilog_gen(const ProblemSpec& spec, const RequestParams& params) const;

  /// Requires at least one error-severity diagnostic.
  ChatRequest syntax_fix(CodeLang language, const ProblemSpec& spec, std::string_view source,
                         const std::vector<Diagnostic>& diagnostics, const RequestParams& params) const;

  /// Lists the first `max_reported` discrepancies with the inputs applied at
  /// each cycle, plus the total count. Requires a nonempty list.
  ChatRequest function_fix(const ProblemSpec& spec, std::string_view verilog_source,
                           const std::vector<Discrepancy>& discrepancies, const Stimulus& stimulus,
                           unsigned max_reported, const RequestParams& params) const;

  /// Function-fix prompt for a simulation that produced no verdict (timeout,
  /// crash, malformed output).
  ChatRequest simulation_failure(const ProblemSpec& spec, std::string_view verilog_source, std::string_view message,
                                 const RequestParams& params) const;

 private:
  ChatRequest make(PromptKind kind, const std::map<std::string, std::string>& bindings,
                   const RequestParams& params) const;

  PromptLibrary library_;
};

/// "   7 | text" numbering used in repair prompts.
std::string number_lines(std::string_view source);

/// One Verilog-style declaration per line, e.g. "input [3:0] a".
std::string port_listing(const ProblemSpec& spec);

}  // namespace autoverifix
