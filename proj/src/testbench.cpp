// SPDX-License-Identifier: Apache-2.0
#include "autoverifix/testbench.hpp"

#include <fmt/format.h>

#include "autoverifix/error.hpp"

namespace autoverifix {

namespace {

std::string range(unsigned width) { return width > 1 ? fmt::format(" [{}:0]", width - 1) : std::string(); }

/// One packed binary literal for `names` in order, MSB first.
std::string packed_literal(const SignalMap& values, const std::vector<std::string>& names, unsigned width) {
  std::string bits;
  bits.reserve(width);
  for (const auto& n : names) {
    const auto& v = values.at(n);
    for (int b = static_cast<int>(v.width()) - 1; b >= 0; --b)
      bits.push_back(v.is_unknown() ? 'x' : ((v.value() >> b) & 1u) ? '1' : '0');
  }
  return fmt::format("{}'b{}", width, bits);
}

struct Field {
  std::string name;
  unsigned hi = 0, lo = 0;
};

/// Bit ranges of `names` packed MSB first into one word.
std::vector<Field> layout(const ProblemSpec& spec, const std::vector<std::string>& names, unsigned& width) {
  width = 0;
  for (const auto& n : names) width += spec.find_port(n)->width;
  std::vector<Field> out;
  unsigned top = width;
  for (const auto& n : names) {
    const auto w = spec.find_port(n)->width;
    out.push_back({n, top - 1, top - w});
    top -= w;
  }
  return out;
}

std::vector<std::string> names_of(const SignalMap& m) {
  std::vector<std::string> out;
  for (const auto& [name, _] : m) out.push_back(name);
  return out;
}

}  // namespace

TestbenchSource synthesize_testbench(const ProblemSpec& spec, const SimTrace& trace, const TestbenchOptions& options) {
  if (trace.cycles.empty()) throw Error(Errc::empty_trace, fmt::format("problem '{}': trace has no cycles", spec.id));
  try {
    validate_trace(spec, trace);
  } catch (const Error& e) {
    throw Error(Errc::port_mismatch, fmt::format("problem '{}': {}", spec.id, e.what()));
  }
  for (const auto& c : trace.cycles)
    for (const auto& [name, v] : c.outputs)
      if (v.is_unknown())
        throw Error(Errc::invalid_argument, fmt::format("cycle {}: expected value of '{}' is unknown", c.cycle_index, name));

  const bool sequential = spec.kind == DesignKind::sequential;
  const PortDecl* clk = spec.clock();
  const PortDecl* rst = spec.reset();
  const std::size_t n = trace.cycles.size();

  // Stimulus and expectations live in packed tables so the compiled model
  // stays small however long the trace is.
  const auto in_names = names_of(trace.cycles[0].inputs);
  const auto out_names = names_of(trace.cycles[0].outputs);
  unsigned in_width = 0, out_width = 0;
  const auto in_fields = layout(spec, in_names, in_width);
  const auto out_fields = layout(spec, out_names, out_width);

  std::string out;
  out += fmt::format("// Self-checking testbench for {} ({} cycles).\n", spec.module_name, n);
  out += fmt::format("module {};\n", kTestbenchTop);
  for (const auto& p : spec.ports) {
    if (p.direction == Direction::output) {
      out += fmt::format("  wire{} {};\n", range(p.width), p.name);
    } else if (p.role == PortRole::clock) {
      out += fmt::format("  reg {} = 1'b0;\n", p.name);
    } else {
      out += fmt::format("  reg{} {};\n", range(p.width), p.name);
    }
  }
  out += "  integer tb_mismatches;\n  integer tb_i;\n";
  if (in_width) out += fmt::format("  reg [{}:0] tb_stim [0:{}];\n", in_width - 1, n - 1);
  out += fmt::format("  reg [{}:0] tb_expect [0:{}];\n\n", out_width - 1, n - 1);

  out += fmt::format("  {} tb_dut (", spec.module_name);
  for (std::size_t i = 0; i < spec.ports.size(); ++i)
    out += fmt::format("{}.{}({})", i ? ", " : "", spec.ports[i].name, spec.ports[i].name);
  out += ");\n\n";

  if (sequential) out += fmt::format("  always #5 {} = ~{};\n\n", clk->name, clk->name);

  out += "  initial begin\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = trace.cycles[i];
    if (in_width) out += fmt::format("    tb_stim[{}] = {};\n", i, packed_literal(c.inputs, in_names, in_width));
    out += fmt::format("    tb_expect[{}] = {};\n", i, packed_literal(c.outputs, out_names, out_width));
  }
  if (options.dump_vcd) out += fmt::format("    $dumpfile(\"tb_waves.vcd\");\n    $dumpvars(0, {});\n", kTestbenchTop);
  out += "    tb_mismatches = 0;\n";
  for (const auto& p : spec.data_inputs()) out += fmt::format("    {} = {}'h0;\n", p.name, p.width);
  if (rst) out += fmt::format("    {} = 1'b1;\n", rst->name);

  out += fmt::format("\n    for (tb_i = 0; tb_i < {}; tb_i = tb_i + 1) begin\n", n);
  if (sequential) {
    if (rst) {
      out += fmt::format("      @(negedge {});\n      #1;\n", clk->name);
      out += fmt::format("      if (tb_i == 0) {} = 1'b0;\n", rst->name);
    } else {
      // Without a reset the first cycle runs before the first rising edge.
      out += fmt::format("      if (tb_i == 0) #1;\n      else begin\n        @(negedge {});\n        #1;\n      end\n",
                         clk->name);
    }
  }
  for (const auto& f : in_fields) out += fmt::format("      {} = tb_stim[tb_i][{}:{}];\n", f.name, f.hi, f.lo);
  out += sequential ? "      #3;\n" : "      #1;\n";
  for (const auto& f : out_fields) {
    const auto slice = fmt::format("tb_expect[tb_i][{}:{}]", f.hi, f.lo);
    out += fmt::format(
        "      if ({} !== {}) begin\n"
        "        $display(\"{}\", tb_i, \"{}\", {}, {});\n"
        "        tb_mismatches = tb_mismatches + 1;\n"
        "      end\n",
        f.name, slice, kMismatchFormat, f.name, slice, f.name);
  }
  out += "    end\n";

  out += "\n    if (tb_mismatches == 0) $display(\"RESULT pass mismatches=0\");\n";
  out += "    else $display(\"RESULT fail mismatches=%0d\", tb_mismatches);\n";
  out += "    $finish;\n";
  out += "  end\n";
  out += "endmodule\n";

  TestbenchSource tb;
  tb.source = std::move(out);
  tb.expected_cycle_count = n;
  tb.stimulus = trace.stimulus();
  return tb;
}

std::string format_mismatch_line(const Discrepancy& d) {
  return fmt::format("MISMATCH cycle={} signal={} expected={} observed={}", d.cycle, d.signal,
                     format_bitvec(d.expected), format_bitvec(d.observed));
}

std::string format_result_line(std::size_t mismatches) {
  return mismatches == 0 ? std::string("RESULT pass mismatches=0") : fmt::format("RESULT fail mismatches={}", mismatches);
}

}  // namespace autoverifix
