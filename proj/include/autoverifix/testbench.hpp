// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>

#include "autoverifix/model.hpp"

namespace autoverifix {

/// printf-style grammar of the per-mismatch line, bit-exact.
inline constexpr const char* kMismatchFormat = "MISMATCH cycle=%0d signal=%s expected=%h observed=%h";
inline constexpr const char* kTestbenchTop = "tb_top";

struct TestbenchOptions {
  /// Adds $dumpfile/$dumpvars for a value-change dump (tb_waves.vcd).
  bool dump_vcd = false;
};

struct TestbenchSource {
  std::string source;
  std::string top = kTestbenchTop;
  std::string mismatch_line_format = kMismatchFormat;
  std::size_t expected_cycle_count = 0;
  /// Inputs applied per cycle, kept for function-fix prompts.
  Stimulus stimulus;
};

/// Self-checking testbench that replays `trace` against the spec's module.
///
/// Sequential designs: 10-unit clock starting low, reset (if any) held high
/// across the first rising edge, inputs driven 1 unit after each falling edge
/// and outputs sampled 1 unit before the next rising edge. Combinational
/// designs: apply, wait 1 unit, compare. Prints one MISMATCH line per failing
/// comparison and a final RESULT line, then calls $finish.
///
/// Throws Errc::empty_trace or Errc::port_mismatch.
TestbenchSource synthesize_testbench(const ProblemSpec& spec, const SimTrace& trace,
                                     const TestbenchOptions& options = {});

/// The line a testbench prints for `d`, without trailing newline.
std::string format_mismatch_line(const Discrepancy& d);
std::string format_result_line(std::size_t mismatches);

}  // namespace autoverifix
