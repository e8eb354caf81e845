// SPDX-License-Identifier: Apache-2.0
#include "autoverifix/prompts.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>

#include "autoverifix/error.hpp"
#include "autoverifix/json_io.hpp"

#ifndef AUTOVERIFIX_TEMPLATE_DIR
#define AUTOVERIFIX_TEMPLATE_DIR "templates"
#endif

namespace autoverifix {

const char* to_string(PromptKind kind) noexcept {
  switch (kind) {
    case PromptKind::ref_model_gen: return "ref_model_gen";
    case PromptKind::coverage_refine: return "coverage_refine";
    case PromptKind::verilog_gen: return "verilog_gen";
    case PromptKind::syntax_fix_python: return "syntax_fix_python";
    case PromptKind::syntax_fix_verilog: return "syntax_fix_verilog";
    case PromptKind::function_fix: return "function_fix";
  }
  return "?";
}

namespace {

bool is_placeholder_name(std::string_view s) {
  if (s.empty() || !(std::islower(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_';
  });
}

// Calls on_text / on_placeholder for consecutive pieces of `text`.
template <class Text, class Placeholder>
void scan_template(std::string_view text, Text on_text, Placeholder on_placeholder) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto open = text.find("{{", pos);
    if (open == std::string_view::npos) break;
    auto close = text.find("}}", open + 2);
    if (close == std::string_view::npos) break;
    auto name = text.substr(open + 2, close - open - 2);
    if (!is_placeholder_name(name)) {
      on_text(text.substr(pos, open + 2 - pos));
      pos = open + 2;
      continue;
    }
    on_text(text.substr(pos, open - pos));
    on_placeholder(name);
    pos = close + 2;
  }
  on_text(text.substr(std::min(pos, text.size())));
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out.append(sep);
    out.append(items[i]);
  }
  return out;
}

std::string names_of(const std::vector<PortDecl>& ports) {
  std::vector<std::string> names;
  for (const auto& p : ports) names.push_back(p.name);
  return names.empty() ? "none" : join(names, ", ");
}

std::string percent(double ratio) { return fmt::format("{:.1f}", ratio * 100.0); }

std::string strip_trailing_newlines(std::string_view s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

std::string render_diagnostic(const Diagnostic& d) {
  std::string where = d.line ? fmt::format("line {}", *d.line) : std::string("unknown line");
  if (!d.file.empty()) where += fmt::format(" of {}", d.file);
  return fmt::format("- {} at {}: {}\n{}", to_string(d.severity), where, d.message,
                     strip_trailing_newlines(d.raw));
}

}  // namespace

std::string render_template(std::string_view text, const std::map<std::string, std::string>& bindings) {
  std::string out;
  scan_template(
      text, [&](std::string_view piece) { out.append(piece); },
      [&](std::string_view name) {
        auto it = bindings.find(std::string(name));
        if (it == bindings.end())
          throw Error(Errc::missing_field, fmt::format("no value bound for placeholder {{{{{}}}}}", name));
        out.append(it->second);
      });
  return out;
}

std::vector<std::string> template_placeholders(std::string_view text) {
  std::vector<std::string> names;
  scan_template(
      text, [](std::string_view) {},
      [&](std::string_view name) {
        if (std::find(names.begin(), names.end(), name) == names.end()) names.emplace_back(name);
      });
  return names;
}

std::filesystem::path PromptLibrary::default_dir() {
  if (const char* env = std::getenv("AUTOVERIFIX_TEMPLATE_DIR"); env && *env) return env;
  return AUTOVERIFIX_TEMPLATE_DIR;
}

namespace {

/// Template file text minus a leading "# SPDX-License-Identifier" line.
std::string template_text(const std::filesystem::path& path) {
  auto text = read_file(path);
  if (text.rfind("# SPDX-License-Identifier", 0) == 0) {
    const auto nl = text.find('\n');
    text.erase(0, nl == std::string::npos ? text.size() : nl + 1);
  }
  return strip_trailing_newlines(text);
}

}  // namespace

PromptLibrary PromptLibrary::load(const std::filesystem::path& dir) {
  PromptLibrary lib;
  for (auto kind : kPromptKinds) {
    const std::string stem = to_string(kind);
    PromptTemplate t;
    t.kind = kind;
    t.system_text = template_text(dir / (stem + ".system.txt"));
    t.user_template = template_text(dir / (stem + ".user.txt"));
    lib.templates_.emplace(kind, std::move(t));
  }
  return lib;
}

std::string number_lines(std::string_view source) {
  std::string out;
  std::size_t lineno = 1, pos = 0;
  const auto body = strip_trailing_newlines(source);
  std::string_view rest = body;
  while (true) {
    auto nl = rest.find('\n', pos);
    auto line = rest.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    out += fmt::format("{:>4} | {}", lineno++, line);
    if (nl == std::string_view::npos) break;
    out.push_back('\n');
    pos = nl + 1;
  }
  return out;
}

std::string port_listing(const ProblemSpec& spec) {
  std::vector<std::string> lines;
  for (const auto& p : spec.ports) {
    std::string decl = to_string(p.direction);
    if (p.width > 1) decl += fmt::format(" [{}:0]", p.width - 1);
    decl += " " + p.name;
    if (p.role == PortRole::clock) decl += "  // clock";
    if (p.role == PortRole::reset) decl += "  // reset";
    lines.push_back(std::move(decl));
  }
  return join(lines, "\n");
}

ChatRequest PromptForge::make(PromptKind kind, const std::map<std::string, std::string>& bindings,
                              const RequestParams& params) const {
  const auto& t = library_.get(kind);
  ChatRequest req;
  req.model = params.model;
  req.temperature = params.temperature;
  req.max_tokens = params.max_tokens;
  req.seed = params.seed;
  req.sample_index = params.sample_index;
  req.purpose = to_string(kind);
  try {
    req.messages.push_back({Role::system, t.system_text});
    req.messages.push_back({Role::user, render_template(t.user_template, bindings)});
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("{} template: {}", to_string(kind), e.what()));
  }
  return req;
}

ChatRequest PromptForge::ref_model(const ProblemSpec& spec, const RequestParams& params) const {
  if (spec.description.find_first_not_of(" \t\r\n") == std::string::npos)
    throw Error(Errc::missing_field, fmt::format("problem '{}' has an empty description", spec.id));
  std::string timing;
  if (spec.kind == DesignKind::sequential) {
    timing = fmt::format(
        "Timing: one step() call is one cycle of clock `{}` (positive edge). step() must return the outputs as they "
        "appear during the cycle, just before the rising edge that ends it, and only then update the internal state "
        "as the edge would.",
        spec.clock()->name);
    if (const auto* rst = spec.reset())
      timing += fmt::format(" The reset input `{}` is synchronous and active-high; it is handled by reset() and is "
                            "not part of `inputs`. The clock is not part of `inputs` either.",
                            rst->name);
    else
      timing += " The clock is not part of `inputs`.";
  } else {
    timing = "Timing: the design is combinational. step() returns the outputs as a function of the current inputs "
             "only.";
  }
  return make(PromptKind::ref_model_gen,
              {{"description", strip_trailing_newlines(spec.description)},
               {"module_name", spec.module_name},
               {"kind", to_string(spec.kind)},
               {"port_list", port_listing(spec)},
               {"input_names", names_of(spec.data_inputs())},
               {"output_names", names_of(spec.outputs())},
               {"timing_contract", timing}},
              params);
}

ChatRequest PromptForge::coverage_refine(const ProblemSpec& spec, std::string_view model_source,
                                         const Stimulus& current_tests, const CoverageReport& report,
                                         double threshold, const RequestParams& params) const {
  if (!(report.ratio < threshold))
    throw Error(Errc::precondition, fmt::format("coverage {} already meets threshold {}", report.ratio, threshold));
  std::vector<std::string> lines;
  for (auto l : report.uncovered_lines) lines.push_back(std::to_string(l));
  return make(PromptKind::coverage_refine,
              {{"coverage_percent", percent(report.ratio)},
               {"covered_lines", std::to_string(report.covered_lines)},
               {"total_lines", std::to_string(report.total_lines)},
               {"threshold_percent", percent(threshold)},
               {"uncovered_line_count", std::to_string(report.total_lines - report.covered_lines)},
               {"uncovered_line_list", lines.empty() ? "none" : join(lines, ", ")},
               {"uncovered_branch_count", std::to_string(report.uncovered_branch_count)},
               {"module_name", spec.module_name},
               {"numbered_source", number_lines(model_source)},
               {"current_tests", to_json(current_tests).dump()},
               {"input_names", names_of(spec.data_inputs())}},
              params);
}

ChatRequest PromptForge::verilog_gen(const ProblemSpec& spec, const RequestParams& params) const {
  if (spec.description.find_first_not_of(" \t\r\n") == std::string::npos)
    throw Error(Errc::missing_field, fmt::format("problem '{}' has an empty description", spec.id));
  std::string clocking;
  if (spec.kind == DesignKind::sequential) {
    clocking = fmt::format("Clocking: all state changes on the positive edge of `{}`.", spec.clock()->name);
    if (const auto* rst = spec.reset())
      clocking += fmt::format(" Reset `{}` is synchronous and active-high unless the description says otherwise.",
                              rst->name);
    else
      clocking += " There is no reset port.";
  } else {
    clocking = "The design is purely combinational: do not use clocked constructs (no posedge/negedge, no "
               "registers, no latches). Use continuous assignments or always @(*) blocks.";
  }
  return make(PromptKind::verilog_gen,
              {{"description", strip_trailing_newlines(spec.description)},
               {"module_name", spec.module_name},
               {"port_list", port_listing(spec)},
               {"clocking", clocking}},
              params);
}

ChatRequest PromptForge::syntax_fix(CodeLang language, const ProblemSpec& spec, std::string_view source,
                                    const std::vector<Diagnostic>& diagnostics, const RequestParams& params) const {
  if (std::none_of(diagnostics.begin(), diagnostics.end(),
                   [](const Diagnostic& d) { return d.severity == Severity::error; }))
    throw Error(Errc::precondition, "syntax-fix prompt needs at least one error diagnostic");
  std::vector<std::string> rendered;
  for (const auto& d : diagnostics) rendered.push_back(render_diagnostic(d));
  const auto kind = language == CodeLang::python ? PromptKind::syntax_fix_python : PromptKind::syntax_fix_verilog;
  return make(kind,
              {{"diagnostics", join(rendered, "\n")},
               {"numbered_source", number_lines(source)},
               {"port_list", port_listing(spec)}},
              params);
}

ChatRequest PromptForge::function_fix(const ProblemSpec& spec, std::string_view verilog_source,
                                      const std::vector<Discrepancy>& discrepancies, const Stimulus& stimulus,
                                      unsigned max_reported, const RequestParams& params) const {
  if (discrepancies.empty()) throw Error(Errc::precondition, "function-fix prompt needs at least one discrepancy");
  const std::size_t shown = std::min<std::size_t>(discrepancies.size(), std::max(1u, max_reported));
  std::vector<std::string> blocks;
  for (std::size_t i = 0; i < shown; ++i) {
    const auto& d = discrepancies[i];
    std::string inputs;
    if (d.cycle < stimulus.size()) {
      std::vector<std::string> assigns;
      for (const auto& [name, v] : stimulus[d.cycle]) assigns.push_back(fmt::format("{}={}", name, format_bitvec(v)));
      inputs = assigns.empty() ? "(none)" : join(assigns, " ");
    } else {
      inputs = "(unknown)";
    }
    blocks.push_back(fmt::format("Mismatch {}: cycle {}, output {}\n  inputs applied: {}\n  expected: {}\n  observed: {}",
                                 i + 1, d.cycle, d.signal, inputs, format_bitvec(d.expected), format_bitvec(d.observed)));
  }
  std::string summary = fmt::format("{} mismatching (cycle, output) pairs in total", discrepancies.size());
  summary += shown < discrepancies.size() ? fmt::format("; the first {} are listed below.", shown)
                                          : std::string("; all are listed below.");
  summary += " Values are hexadecimal; x means unknown.";
  std::string note;
  if (spec.kind == DesignKind::sequential) {
    note = fmt::format("Cycle numbering: the testbench holds reset for one cycle first (when the design has one), "
                       "then applies the cycle-0 inputs after the falling edge of `{}` and samples outputs just "
                       "before the next rising edge.",
                       spec.clock()->name);
  } else {
    note = "Each cycle applies one input vector and samples the outputs after it settles.";
  }
  return make(PromptKind::function_fix,
              {{"failure_summary", summary},
               {"failure_detail", join(blocks, "\n")},
               {"stimulus_note", note},
               {"verilog_source", strip_trailing_newlines(verilog_source)}},
              params);
}

ChatRequest PromptForge::simulation_failure(const ProblemSpec& spec, std::string_view verilog_source,
                                            std::string_view message, const RequestParams& params) const {
  (void)spec;
  return make(PromptKind::function_fix,
              {{"failure_summary", "The simulation did not produce a verdict."},
               {"failure_detail", std::string(message)},
               {"stimulus_note", "Look for combinational loops, missing sensitivity, or logic that never settles."},
               {"verilog_source", strip_trailing_newlines(verilog_source)}},
              params);
}

}  // namespace autoverifix
