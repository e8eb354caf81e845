// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "autoverifix/bitvec.hpp"

namespace autoverifix {

enum class Direction { input, output };
enum class PortRole { data, clock, reset };
enum class DesignKind { combinational, sequential };

struct PortDecl {
  std::string name;
  Direction direction = Direction::input;
  unsigned width = 1;
  PortRole role = PortRole::data;

  friend bool operator==(const PortDecl&, const PortDecl&) = default;
};

/// A hardware design task: natural-language description plus the module
/// interface the generated RTL must match.
struct ProblemSpec {
  std::string id;
  std::string description;
  std::string module_name;
  std::vector<PortDecl> ports;
  DesignKind kind = DesignKind::combinational;
  /// Ground-truth testbench source, used only by evaluation.
  std::optional<std::string> golden_testbench;

  const PortDecl* find_port(std::string_view name) const;
  const PortDecl* clock() const;
  const PortDecl* reset() const;
  /// Data inputs in declaration order (clock and reset excluded).
  std::vector<PortDecl> data_inputs() const;
  std::vector<PortDecl> outputs() const;

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

/// Throws Errc::invalid_problem naming the failing field.
void validate(const ProblemSpec& spec);

using SignalMap = std::map<std::string, BitVec>;
/// One input assignment per cycle; binds every data input port.
using Stimulus = std::vector<SignalMap>;

struct CycleRecord {
  std::uint64_t cycle_index = 0;
  SignalMap inputs;
  SignalMap outputs;
  /// Reference-model internals, informational only.
  std::optional<std::map<std::string, std::string>> state;

  friend bool operator==(const CycleRecord&, const CycleRecord&) = default;
};

struct SimTrace {
  std::vector<CycleRecord> cycles;

  Stimulus stimulus() const;
  friend bool operator==(const SimTrace&, const SimTrace&) = default;
};

/// Checks cycle numbering and that every record binds exactly the spec's data
/// inputs and outputs with matching widths. Throws Errc::port_mismatch or
/// Errc::malformed.
void validate_trace(const ProblemSpec& spec, const SimTrace& trace);

struct CoverageReport {
  std::uint64_t total_lines = 0;
  std::uint64_t covered_lines = 0;
  double ratio = 0.0;
  std::vector<std::uint64_t> uncovered_lines;
  std::uint64_t uncovered_branch_count = 0;

  friend bool operator==(const CoverageReport&, const CoverageReport&) = default;
};

/// Throws Errc::malformed when counts and ratio disagree.
void validate(const CoverageReport& report);

enum class Severity { error, warning };

struct Diagnostic {
  Severity severity = Severity::error;
  std::string file;
  std::optional<unsigned> line;
  std::string message;
  std::string raw;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

struct Discrepancy {
  std::uint64_t cycle = 0;
  std::string signal;
  BitVec expected;
  BitVec observed;

  friend bool operator==(const Discrepancy&, const Discrepancy&) = default;
};

struct RunBudget {
  unsigned max_python_syntax_iters = 5;
  unsigned max_coverage_iters = 5;
  unsigned max_verilog_syntax_iters = 5;
  unsigned max_function_iters = 5;
  double coverage_threshold = 0.85;
  std::chrono::milliseconds sim_timeout{10'000};
  unsigned max_reported_discrepancies = 10;
};

void validate(const RunBudget& budget);

struct IterationEvent {
  std::string stage;
  std::string kind;
  std::string prompt_digest;
  std::string response_digest;
  std::string summary;

  friend bool operator==(const IterationEvent&, const IterationEvent&) = default;
};

enum class PipelineStatus { pass, fail_syntax, fail_function, fail_reference, budget_exhausted };

struct PipelineOutcome {
  std::string problem_id;
  PipelineStatus status = PipelineStatus::fail_reference;
  std::string reference_source;
  Stimulus test_vectors;
  std::string testbench_source;
  std::string verilog_source;
  CoverageReport coverage;
  std::vector<IterationEvent> iteration_log;
};

/// One record per (cycle, output) whose values differ, ordered by cycle then
/// signal name. Reference-model `state` is ignored.
///
/// Throws Errc::port_mismatch when the traces bind different outputs and
/// Errc::short_trace when `observed` has fewer cycles than `expected`.
std::vector<Discrepancy> compare_traces(const SimTrace& expected, const SimTrace& observed);

const char* to_string(Direction d) noexcept;
const char* to_string(PortRole r) noexcept;
const char* to_string(DesignKind k) noexcept;
const char* to_string(Severity s) noexcept;
const char* to_string(PipelineStatus s) noexcept;

}  // namespace autoverifix
