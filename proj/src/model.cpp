// SPDX-License-Identifier: Apache-2.0
#include "autoverifix/model.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "autoverifix/error.hpp"

namespace autoverifix {

namespace {

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(Errc::invalid_problem, fmt::format("{}: {}", field, why));
}

template <class Pred>
const PortDecl* find_if(const std::vector<PortDecl>& ports, Pred pred) {
  auto it = std::find_if(ports.begin(), ports.end(), pred);
  return it == ports.end() ? nullptr : &*it;
}

std::set<std::string> keys(const SignalMap& m) {
  std::set<std::string> out;
  for (const auto& [k, _] : m) out.insert(k);
  return out;
}

}  // namespace

const PortDecl* ProblemSpec::find_port(std::string_view name) const {
  return find_if(ports, [&](const PortDecl& p) { return p.name == name; });
}

const PortDecl* ProblemSpec::clock() const {
  return find_if(ports, [](const PortDecl& p) { return p.role == PortRole::clock; });
}

const PortDecl* ProblemSpec::reset() const {
  return find_if(ports, [](const PortDecl& p) { return p.role == PortRole::reset; });
}

std::vector<PortDecl> ProblemSpec::data_inputs() const {
  std::vector<PortDecl> out;
  for (const auto& p : ports)
    if (p.direction == Direction::input && p.role == PortRole::data) out.push_back(p);
  return out;
}

std::vector<PortDecl> ProblemSpec::outputs() const {
  std::vector<PortDecl> out;
  for (const auto& p : ports)
    if (p.direction == Direction::output) out.push_back(p);
  return out;
}

void validate(const ProblemSpec& spec) {
  if (spec.id.empty()) invalid("id", "must be nonempty");
  if (!is_identifier(spec.module_name)) invalid("module_name", fmt::format("'{}' is not an identifier", spec.module_name));
  if (spec.ports.empty()) invalid("ports", "at least one port required");

  std::set<std::string> seen;
  unsigned clocks = 0, resets = 0, outputs = 0;
  for (std::size_t i = 0; i < spec.ports.size(); ++i) {
    const auto& p = spec.ports[i];
    const auto field = fmt::format("ports[{}]", i);
    if (!is_identifier(p.name)) invalid(field + ".name", fmt::format("'{}' is not an identifier", p.name));
    if (p.name.starts_with("tb_")) invalid(field + ".name", "prefix 'tb_' is reserved for testbench locals");
    if (!seen.insert(p.name).second) invalid(field + ".name", fmt::format("duplicate port '{}'", p.name));
    if (p.width < 1 || p.width > kMaxPortWidth)
      invalid(field + ".width", fmt::format("{} outside [1, {}]", p.width, kMaxPortWidth));
    if (p.role != PortRole::data) {
      if (p.direction != Direction::input) invalid(field + ".direction", "clock/reset ports must be inputs");
      if (p.width != 1) invalid(field + ".width", "clock/reset ports must be 1 bit");
    }
    clocks += p.role == PortRole::clock;
    resets += p.role == PortRole::reset;
    outputs += p.direction == Direction::output;
  }
  if (outputs == 0) invalid("ports", "at least one output port required");
  if (spec.kind == DesignKind::sequential) {
    if (clocks != 1) invalid("ports", fmt::format("sequential design needs exactly one clock, found {}", clocks));
    if (resets > 1) invalid("ports", fmt::format("at most one reset allowed, found {}", resets));
  } else if (clocks + resets != 0) {
    invalid("kind", "combinational design must not declare clock or reset ports");
  }
}

Stimulus SimTrace::stimulus() const {
  Stimulus out;
  out.reserve(cycles.size());
  for (const auto& c : cycles) out.push_back(c.inputs);
  return out;
}

void validate_trace(const ProblemSpec& spec, const SimTrace& trace) {
  std::set<std::string> ins, outs;
  for (const auto& p : spec.data_inputs()) ins.insert(p.name);
  for (const auto& p : spec.outputs()) outs.insert(p.name);

  for (std::size_t i = 0; i < trace.cycles.size(); ++i) {
    const auto& rec = trace.cycles[i];
    if (rec.cycle_index != i)
      throw Error(Errc::malformed, fmt::format("cycle {} carries index {}", i, rec.cycle_index));
    if (keys(rec.inputs) != ins)
      throw Error(Errc::port_mismatch, fmt::format("cycle {}: inputs do not match the declared data inputs", i));
    if (keys(rec.outputs) != outs)
      throw Error(Errc::port_mismatch, fmt::format("cycle {}: outputs do not match the declared outputs", i));
    for (const auto* m : {&rec.inputs, &rec.outputs})
      for (const auto& [name, v] : *m)
        if (v.width() != spec.find_port(name)->width)
          throw Error(Errc::port_mismatch,
                      fmt::format("cycle {}: '{}' has width {}, declared {}", i, name, v.width(),
                                  spec.find_port(name)->width));
  }
}

void validate(const CoverageReport& r) {
  if (r.covered_lines > r.total_lines)
    throw Error(Errc::malformed, fmt::format("covered_lines {} exceeds total_lines {}", r.covered_lines, r.total_lines));
  if (r.uncovered_lines.size() != r.total_lines - r.covered_lines)
    throw Error(Errc::malformed, fmt::format("{} uncovered line numbers for {} uncovered lines",
                                             r.uncovered_lines.size(), r.total_lines - r.covered_lines));
  // 0/0 is either an empty model (1.0) or a report that was never measured (0.0).
  const bool consistent = r.total_lines == 0
                              ? (r.ratio == 0.0 || r.ratio == 1.0)
                              : std::abs(r.ratio - static_cast<double>(r.covered_lines) / r.total_lines) <= 1e-6;
  if (!(r.ratio >= 0.0 && r.ratio <= 1.0) || !consistent)
    throw Error(Errc::malformed, fmt::format("ratio {} inconsistent with {}/{}", r.ratio, r.covered_lines, r.total_lines));
}

void validate(const RunBudget& b) {
  if (b.max_python_syntax_iters < 1 || b.max_coverage_iters < 1 || b.max_verilog_syntax_iters < 1 ||
      b.max_function_iters < 1)
    throw Error(Errc::config, "every iteration cap must be at least 1");
  if (!(b.coverage_threshold >= 0.0 && b.coverage_threshold <= 1.0))
    throw Error(Errc::config, fmt::format("coverage_threshold {} outside [0, 1]", b.coverage_threshold));
  if (b.max_reported_discrepancies < 1) throw Error(Errc::config, "max_reported_discrepancies must be at least 1");
  if (b.sim_timeout.count() <= 0) throw Error(Errc::config, "sim_timeout must be positive");
}

std::vector<Discrepancy> compare_traces(const SimTrace& expected, const SimTrace& observed) {
  if (observed.cycles.size() < expected.cycles.size())
    throw Error(Errc::short_trace, fmt::format("observed trace has {} cycles, expected {}",
                                               observed.cycles.size(), expected.cycles.size()));
  std::vector<Discrepancy> out;
  for (std::size_t i = 0; i < expected.cycles.size(); ++i) {
    const auto& want = expected.cycles[i].outputs;
    const auto& got = observed.cycles[i].outputs;
    if (keys(want) != keys(got))
      throw Error(Errc::port_mismatch, fmt::format("cycle {}: traces bind different output ports", i));
    // std::map iterates in name order, which gives the required ordering.
    for (const auto& [name, value] : want) {
      const auto& obs = got.at(name);
      if (!same_value(value, obs))
        out.push_back(Discrepancy{expected.cycles[i].cycle_index, name, value, obs});
    }
  }
  return out;
}

const char* to_string(Direction d) noexcept { return d == Direction::input ? "input" : "output"; }

const char* to_string(PortRole r) noexcept {
  switch (r) {
    case PortRole::data: return "data";
    case PortRole::clock: return "clock";
    case PortRole::reset: return "reset";
  }
  return "data";
}

const char* to_string(DesignKind k) noexcept {
  return k == DesignKind::combinational ? "combinational" : "sequential";
}

const char* to_string(Severity s) noexcept { return s == Severity::error ? "error" : "warning"; }

const char* to_string(PipelineStatus s) noexcept {
  switch (s) {
    case PipelineStatus::pass: return "pass";
    case PipelineStatus::fail_syntax: return "fail_syntax";
    case PipelineStatus::fail_function: return "fail_function";
    case PipelineStatus::fail_reference: return "fail_reference";
    case PipelineStatus::budget_exhausted: return "budget_exhausted";
  }
  return "fail_reference";
}

}  // namespace autoverifix
