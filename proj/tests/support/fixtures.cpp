// SPDX-License-Identifier: Apache-2.0
#include "fixtures.hpp"

#include <fmt/format.h>
#include <stdlib.h>

#include <random>

#include "autoverifix/process.hpp"
#include "autoverifix/testbench.hpp"

#ifndef AVX_TEST_FIXTURES
#define AVX_TEST_FIXTURES "tests/fixtures"
#endif

namespace avxtest {

namespace {

PortDecl in(std::string name, unsigned width = 1, PortRole role = PortRole::data) {
  return PortDecl{std::move(name), Direction::input, width, role};
}
PortDecl out(std::string name, unsigned width = 1) { return PortDecl{std::move(name), Direction::output, width}; }

ProblemSpec make_spec(std::string id, std::string description, DesignKind kind, std::vector<PortDecl> ports) {
  ProblemSpec s;
  s.id = id;
  s.module_name = std::move(id);
  s.description = std::move(description);
  s.kind = kind;
  s.ports = std::move(ports);
  return s;
}

std::uint64_t mask(unsigned w) { return BitVec::mask(w); }

Stimulus random_stimulus(const ProblemSpec& spec, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Stimulus s;
  for (std::size_t i = 0; i < count; ++i) {
    SignalMap m;
    for (const auto& p : spec.data_inputs()) m.emplace(p.name, BitVec(p.width, rng() & mask(p.width)));
    s.push_back(std::move(m));
  }
  return s;
}

Stimulus exhaustive(const ProblemSpec& spec) {
  const auto inputs = spec.data_inputs();
  unsigned total = 0;
  for (const auto& p : inputs) total += p.width;
  Stimulus s;
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << total); ++v) {
    SignalMap m;
    unsigned shift = 0;
    for (const auto& p : inputs) {
      m.emplace(p.name, BitVec(p.width, (v >> shift) & mask(p.width)));
      shift += p.width;
    }
    s.push_back(std::move(m));
  }
  return s;
}

Stimulus concat(Stimulus a, const Stimulus& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::uint64_t get(const SignalMap& m, const std::string& name) { return m.at(name).value(); }

bool any_vector(const Stimulus& s, const std::function<bool(const SignalMap&)>& pred) {
  for (const auto& m : s)
    if (pred(m)) return true;
  return false;
}

// Stateless helper for combinational fixtures.
std::function<StepFn()> comb(std::function<Values(const Values&)> f) {
  return [f] { return StepFn(f); };
}

}  // namespace

Stimulus stimulus(const ProblemSpec& spec, const std::vector<Values>& rows) {
  Stimulus s;
  for (const auto& row : rows) {
    SignalMap m;
    for (const auto& p : spec.data_inputs()) m.emplace(p.name, BitVec(p.width, row.at(p.name)));
    s.push_back(std::move(m));
  }
  return s;
}

SimTrace run_model(const FixtureDesign& d, const Stimulus& vectors) {
  auto step = d.make_model();
  SimTrace t;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    Values in;
    for (const auto& [name, v] : vectors[i]) in[name] = v.value();
    const auto outs = step(in);
    CycleRecord rec;
    rec.cycle_index = i;
    rec.inputs = vectors[i];
    for (const auto& p : d.spec.outputs()) rec.outputs.emplace(p.name, BitVec(p.width, outs.at(p.name) & mask(p.width)));
    t.cycles.push_back(std::move(rec));
  }
  return t;
}

CoverageReport fixture_coverage(const FixtureDesign& d, const Stimulus& vectors) {
  CoverageReport c;
  c.total_lines = 20;
  if (d.reaches_hidden(vectors)) {
    c.covered_lines = 18;
    c.uncovered_lines = {19, 20};
  } else {
    c.covered_lines = 12;
    c.uncovered_lines = {9, 10, 11, 12, 13, 14, 15, 16};
    c.uncovered_branch_count = 4;
  }
  c.ratio = static_cast<double>(c.covered_lines) / static_cast<double>(c.total_lines);
  return c;
}

HarnessResult fixture_harness_result(const FixtureDesign& d, const HarnessJob& job) {
  HarnessResult r;
  r.trace = run_model(d, job.test_vectors);
  r.coverage = fixture_coverage(d, job.test_vectors);
  return r;
}

ProblemSpec with_golden(const FixtureDesign& d) {
  auto spec = d.spec;
  spec.golden_testbench = synthesize_testbench(d.spec, run_model(d, d.golden)).source;
  return spec;
}

std::string fenced(std::string_view lang, std::string_view body) {
  std::string b(body);
  if (b.empty() || b.back() != '\n') b.push_back('\n');
  return fmt::format("```{}\n{}```\n", lang, b);
}

bool verilator_available() {
  return autoverifix::find_executable("verilator").has_value() ||
         autoverifix::find_executable("verilator-cli").has_value();
}

std::filesystem::path fixtures_dir() { return AVX_TEST_FIXTURES; }

// ---------------------------------------------------------------- designs

FixtureDesign fsm2() {
  FixtureDesign d;
  d.spec = make_spec("fsm2",
                     "A Moore state machine with two states, A and B, one input `in` and one output `out`. "
                     "In state B the machine stays in B while in=1 and moves to A when in=0. In state A it stays "
                     "in A while in=1 and moves to B when in=0. out is 1 in state B and 0 in state A. The "
                     "synchronous active-high reset puts the machine in state B.",
                     DesignKind::sequential,
                     {in("clk", 1, PortRole::clock), in("reset", 1, PortRole::reset), in("in"), out("out")});
  d.make_model = [] {
    return StepFn([state = 1u](const Values& v) mutable {
      Values o{{"out", state}};
      if (!v.at("in")) state ^= 1u;
      return o;
    });
  };
  d.python_source =
      "class Fsm2:\n"
      "    A, B = 0, 1\n"
      "\n"
      "    def __init__(self):\n"
      "        self.state = self.B\n"
      "\n"
      "    def reset(self):\n"
      "        self.state = self.B\n"
      "\n"
      "    def step(self, inputs):\n"
      "        out = 1 if self.state == self.B else 0\n"
      "        if inputs[\"in\"] == 0:\n"
      "            if self.state == self.B:\n"
      "                self.state = self.A\n"
      "            else:\n"
      "                self.state = self.B\n"
      "        return {\"out\": out}\n";
  d.good_verilog =
      "module fsm2(input clk, input reset, input in, output out);\n"
      "  reg state;  // 1 = B\n"
      "  always @(posedge clk) begin\n"
      "    if (reset) state <= 1'b1;\n"
      "    else if (!in) state <= ~state;\n"
      "  end\n"
      "  assign out = state;\n"
      "endmodule\n";
  d.weak = stimulus(d.spec, {{{"in", 1}}, {{"in", 1}}, {{"in", 0}}});
  d.strong = stimulus(d.spec, {{{"in", 1}}, {{"in", 1}}, {{"in", 0}}, {{"in", 1}}, {{"in", 0}}, {{"in", 0}}, {{"in", 1}}});
  d.golden = random_stimulus(d.spec, 40, 2);
  d.reaches_hidden = [](const Stimulus& s) {
    // The A -> B transition needs two zeros in a row.
    for (std::size_t i = 1; i < s.size(); ++i)
      if (!get(s[i - 1], "in") && !get(s[i], "in")) return true;
    return false;
  };
  return d;
}

FixtureDesign adder4() {
  FixtureDesign d;
  d.spec = make_spec("adder4", "4-bit unsigned adder. sum is the 5-bit sum of a and b, carry in bit 4.",
                     DesignKind::combinational, {in("a", 4), in("b", 4), out("sum", 5)});
  d.make_model = comb([](const Values& v) { return Values{{"sum", v.at("a") + v.at("b")}}; });
  d.python_source =
      "class Adder4:\n"
      "    def step(self, inputs):\n"
      "        total = inputs[\"a\"] + inputs[\"b\"]\n"
      "        if total > 15:\n"
      "            return {\"sum\": total & 0x1f}\n"
      "        return {\"sum\": total}\n";
  d.good_verilog =
      "module adder4(input [3:0] a, input [3:0] b, output [4:0] sum);\n"
      "  assign sum = a + b;\n"
      "endmodule\n";
  d.buggy_verilog =
      "module adder4(input [3:0] a, input [3:0] b, output [4:0] sum);\n"
      "  assign sum = {1'b0, a + b};  // drops the carry\n"
      "endmodule\n";
  d.weak = stimulus(d.spec, {{{"a", 1}, {"b", 2}}, {{"a", 3}, {"b", 4}}, {{"a", 0}, {"b", 0}}, {{"a", 7}, {"b", 8}}});
  d.strong = concat(d.weak, stimulus(d.spec, {{{"a", 15}, {"b", 1}}, {{"a", 9}, {"b", 9}}, {{"a", 15}, {"b", 15}}}));
  d.golden = exhaustive(d.spec);
  d.reaches_hidden = [](const Stimulus& s) {
    return any_vector(s, [](const SignalMap& m) { return get(m, "a") + get(m, "b") > 15; });
  };
  return d;
}

FixtureDesign counter3() {
  FixtureDesign d;
  d.spec = make_spec("counter3",
                     "3-bit up counter with enable. q increments on each rising clock edge while en is high and "
                     "wraps from 7 to 0. Synchronous active-high reset clears q.",
                     DesignKind::sequential,
                     {in("clk", 1, PortRole::clock), in("rst", 1, PortRole::reset), in("en"), out("q", 3)});
  d.make_model = [] {
    return StepFn([q = 0u](const Values& v) mutable {
      Values o{{"q", q}};
      if (v.at("en")) q = (q + 1) & 7u;
      return o;
    });
  };
  d.python_source =
      "class Counter3:\n"
      "    def __init__(self):\n"
      "        self.q = 0\n"
      "\n"
      "    def reset(self):\n"
      "        self.q = 0\n"
      "\n"
      "    def step(self, inputs):\n"
      "        out = {\"q\": self.q}\n"
      "        if inputs[\"en\"]:\n"
      "            if self.q == 7:\n"
      "                self.q = 0\n"
      "            else:\n"
      "                self.q += 1\n"
      "        return out\n";
  d.good_verilog =
      "module counter3(input clk, input rst, input en, output reg [2:0] q);\n"
      "  always @(posedge clk) begin\n"
      "    if (rst) q <= 3'd0;\n"
      "    else if (en) q <= q + 3'd1;\n"
      "  end\n"
      "endmodule\n";
  d.buggy_verilog =
      "module counter3(input clk, input rst, input en, output reg [2:0] q);\n"
      "  always @(posedge clk) begin\n"
      "    if (rst) q <= 3'd0;\n"
      "    else if (en && q != 3'd7) q <= q + 3'd1;  // saturates\n"
      "  end\n"
      "endmodule\n";
  d.weak = stimulus(d.spec, {{{"en", 1}}, {{"en", 1}}, {{"en", 0}}, {{"en", 1}}});
  std::vector<Values> rows(10, Values{{"en", 1}});
  d.strong = stimulus(d.spec, rows);
  d.golden = concat(stimulus(d.spec, rows), random_stimulus(d.spec, 30, 3));
  d.reaches_hidden = [](const Stimulus& s) {
    unsigned n = 0;
    for (const auto& m : s) n += get(m, "en");
    return n >= 8;
  };
  return d;
}

namespace {

FixtureDesign mux4() {
  FixtureDesign d;
  d.spec = make_spec("mux4", "4-to-1 multiplexer of 4-bit words: y = a, b, c or d for sel = 0, 1, 2 or 3.",
                     DesignKind::combinational,
                     {in("sel", 2), in("a", 4), in("b", 4), in("c", 4), in("d", 4), out("y", 4)});
  d.make_model = comb([](const Values& v) {
    static const char* names[] = {"a", "b", "c", "d"};
    return Values{{"y", v.at(names[v.at("sel")])}};
  });
  d.python_source =
      "class Mux4:\n"
      "    def step(self, inputs):\n"
      "        sel = inputs[\"sel\"]\n"
      "        if sel == 0:\n"
      "            return {\"y\": inputs[\"a\"]}\n"
      "        if sel == 1:\n"
      "            return {\"y\": inputs[\"b\"]}\n"
      "        if sel == 2:\n"
      "            return {\"y\": inputs[\"c\"]}\n"
      "        return {\"y\": inputs[\"d\"]}\n";
  d.good_verilog =
      "module mux4(input [1:0] sel, input [3:0] a, input [3:0] b, input [3:0] c, input [3:0] d, output reg [3:0] y);\n"
      "  always @* begin\n"
      "    case (sel)\n"
      "      2'd0: y = a;\n"
      "      2'd1: y = b;\n"
      "      2'd2: y = c;\n"
      "      default: y = d;\n"
      "    endcase\n"
      "  end\n"
      "endmodule\n";
  d.buggy_verilog =
      "module mux4(input [1:0] sel, input [3:0] a, input [3:0] b, input [3:0] c, input [3:0] d, output reg [3:0] y);\n"
      "  always @* begin\n"
      "    case (sel)\n"
      "      2'd0: y = a;\n"
      "      2'd1: y = b;\n"
      "      default: y = c;\n"
      "    endcase\n"
      "  end\n"
      "endmodule\n";
  d.weak = stimulus(d.spec, {{{"sel", 0}, {"a", 1}, {"b", 2}, {"c", 3}, {"d", 4}},
                             {{"sel", 1}, {"a", 1}, {"b", 2}, {"c", 3}, {"d", 4}},
                             {{"sel", 2}, {"a", 1}, {"b", 2}, {"c", 3}, {"d", 4}}});
  d.strong = concat(d.weak, stimulus(d.spec, {{{"sel", 3}, {"a", 1}, {"b", 2}, {"c", 3}, {"d", 4}}}));
  d.golden = random_stimulus(d.spec, 64, 11);
  d.reaches_hidden = [](const Stimulus& s) {
    return any_vector(s, [](const SignalMap& m) { return get(m, "sel") == 3; });
  };
  return d;
}

FixtureDesign alu4() {
  FixtureDesign d;
  d.spec = make_spec("alu4", "4-bit ALU. op=0: a+b, op=1: a-b, op=2: a&b, op=3: a|b. Results wrap to 4 bits.",
                     DesignKind::combinational, {in("op", 2), in("a", 4), in("b", 4), out("y", 4)});
  d.make_model = comb([](const Values& v) {
    const auto a = v.at("a"), b = v.at("b");
    std::uint64_t y = 0;
    switch (v.at("op")) {
      case 0: y = a + b; break;
      case 1: y = a - b; break;
      case 2: y = a & b; break;
      default: y = a | b; break;
    }
    return Values{{"y", y & 15u}};
  });
  d.python_source =
      "class Alu4:\n"
      "    def step(self, inputs):\n"
      "        a, b, op = inputs[\"a\"], inputs[\"b\"], inputs[\"op\"]\n"
      "        if op == 0:\n"
      "            y = a + b\n"
      "        elif op == 1:\n"
      "            y = a - b\n"
      "        elif op == 2:\n"
      "            y = a & b\n"
      "        else:\n"
      "            y = a | b\n"
      "        return {\"y\": y & 0xF}\n";
  d.good_verilog =
      "module alu4(input [1:0] op, input [3:0] a, input [3:0] b, output reg [3:0] y);\n"
      "  always @* begin\n"
      "    case (op)\n"
      "      2'd0: y = a + b;\n"
      "      2'd1: y = a - b;\n"
      "      2'd2: y = a & b;\n"
      "      default: y = a | b;\n"
      "    endcase\n"
      "  end\n"
      "endmodule\n";
  d.buggy_verilog =
      "module alu4(input [1:0] op, input [3:0] a, input [3:0] b, output reg [3:0] y);\n"
      "  always @* begin\n"
      "    case (op)\n"
      "      2'd0: y = a + b;\n"
      "      2'd1: y = a - b;\n"
      "      2'd2: y = a & b;\n"
      "      default: y = a ^ b;\n"
      "    endcase\n"
      "  end\n"
      "endmodule\n";
  d.weak = stimulus(d.spec, {{{"op", 0}, {"a", 3}, {"b", 5}}, {{"op", 1}, {"a", 9}, {"b", 4}}, {{"op", 2}, {"a", 12}, {"b", 10}}});
  d.strong = concat(d.weak, stimulus(d.spec, {{{"op", 3}, {"a", 12}, {"b", 10}}, {{"op", 3}, {"a", 1}, {"b", 2}}}));
  d.golden = exhaustive(d.spec);
  d.reaches_hidden = [](const Stimulus& s) {
    return any_vector(s, [](const SignalMap& m) { return get(m, "op") == 3 && (get(m, "a") & get(m, "b")); });
  };
  return d;
}

FixtureDesign prienc4() {
  FixtureDesign d;
  d.spec = make_spec("prienc4",
                     "4-input priority encoder. idx is the index of the highest set bit of req; valid is 1 when "
                     "any bit of req is set. idx is 0 when req is 0.",
                     DesignKind::combinational, {in("req", 4), out("idx", 2), out("valid")});
  d.make_model = comb([](const Values& v) {
    const auto r = v.at("req");
    std::uint64_t idx = 0;
    for (unsigned i = 0; i < 4; ++i)
      if (r & (1u << i)) idx = i;
    return Values{{"idx", idx}, {"valid", r != 0}};
  });
  d.python_source =
      "class Prienc4:\n"
      "    def step(self, inputs):\n"
      "        req = inputs[\"req\"]\n"
      "        for i in (3, 2, 1, 0):\n"
      "            if req >> i & 1:\n"
      "                return {\"idx\": i, \"valid\": 1}\n"
      "        return {\"idx\": 0, \"valid\": 0}\n";
  d.good_verilog =
      "module prienc4(input [3:0] req, output reg [1:0] idx, output valid);\n"
      "  assign valid = |req;\n"
      "  always @* begin\n"
      "    if (req[3]) idx = 2'd3;\n"
      "    else if (req[2]) idx = 2'd2;\n"
      "    else if (req[1]) idx = 2'd1;\n"
      "    else idx = 2'd0;\n"
      "  end\n"
      "endmodule\n";
  d.buggy_verilog =
      "module prienc4(input [3:0] req, output reg [1:0] idx, output valid);\n"
      "  assign valid = |req;\n"
      "  always @* begin\n"
      "    if (req[0]) idx = 2'd0;\n"
      "    else if (req[1]) idx = 2'd1;\n"
      "    else if (req[2]) idx = 2'd2;\n"
      "    else idx = 2'd3;\n"
      "  end\n"
      "endmodule\n";
  d.weak = stimulus(d.spec, {{{"req", 1}}, {{"req", 2}}, {{"req", 4}}, {{"req", 8}}});
  d.strong = concat(d.weak, stimulus(d.spec, {{{"req", 0}}, {{"req", 3}}, {{"req", 12}}, {{"req", 15}}}));
  d.golden = exhaustive(d.spec);
  d.reaches_hidden = [](const Stimulus& s) {
    return any_vector(s, [](const SignalMap& m) { return __builtin_popcountll(get(m, "req")) != 1; });
  };
  return d;
}

FixtureDesign updown4() {
  FixtureDesign d;
  d.spec = make_spec("updown4",
                     "4-bit up/down counter. On each rising edge q increments when up=1 and decrements when up=0, "
                     "wrapping in both directions. Synchronous active-high reset clears q.",
                     DesignKind::sequential,
                     {in("clk", 1, PortRole::clock), in("rst", 1, PortRole::reset), in("up"), out("q", 4)});
  d.make_model = [] {
    return StepFn([q = 0u](const Values& v) mutable {
      Values o{{"q", q}};
      q = (v.at("up") ? q + 1 : q - 1) & 15u;
      return o;
    });
  };
  d.python_source =
      "class Updown4:\n"
      "    def __init__(self):\n"
      "        self.q = 0\n"
      "\n"
      "    def reset(self):\n"
      "        self.q = 0\n"
      "\n"
      "    def step(self, inputs):\n"
      "        out = {\"q\": self.q}\n"
      "        if inputs[\"up\"]:\n"
      "            self.q = (self.q + 1) % 16\n"
      "        elif self.q == 0:\n"
      "            self.q = 15\n"
      "        else:\n"
      "            self.q -= 1\n"
      "        return out\n";
  d.good_verilog =
      "module updown4(input clk, input rst, input up, output reg [3:0] q);\n"
      "  always @(posedge clk) begin\n"
      "    if (rst) q <= 4'd0;\n"
      "    else if (up) q <= q + 4'd1;\n"
      "    else q <= q - 4'd1;\n"
      "  end\n"
      "endmodule\n";
  d.buggy_verilog =
      "module updown4(input clk, input rst, input up, output reg [3:0] q);\n"
      "  always @(posedge clk) begin\n"
      "    if (rst) q <= 4'd0;\n"
      "    else if (up) q <= q + 4'd1;\n"
      "    else if (q != 4'd0) q <= q - 4'd1;\n"
      "  end\n"
      "endmodule\n";
  d.weak = stimulus(d.spec, {{{"up", 1}}, {{"up", 1}}, {{"up", 1}}, {{"up", 0}}, {{"up", 1}}});
  d.strong = concat(stimulus(d.spec, {{{"up", 0}}, {{"up", 1}}}), d.weak);
  d.golden = concat(stimulus(d.spec, {{{"up", 0}}, {{"up", 0}}}), random_stimulus(d.spec, 40, 13));
  d.reaches_hidden = [](const Stimulus& s) {
    int q = 0;
    for (const auto& m : s) {
      if (!get(m, "up") && q == 0) return true;
      q = (q + (get(m, "up") ? 1 : -1)) & 15;
    }
    return false;
  };
  return d;
}

FixtureDesign cmp4() {
  FixtureDesign d;
  d.spec = make_spec("cmp4", "4-bit unsigned comparator: eq = (a == b), gt = (a > b).", DesignKind::combinational,
                     {in("a", 4), in("b", 4), out("eq"), out("gt")});
  d.make_model = comb([](const Values& v) {
    return Values{{"eq", v.at("a") == v.at("b")}, {"gt", v.at("a") > v.at("b")}};
  });
  d.python_source =
      "class Cmp4:\n"
      "    def step(self, inputs):\n"
      "        a, b = inputs[\"a\"], inputs[\"b\"]\n"
      "        if a == b:\n"
      "            return {\"eq\": 1, \"gt\": 0}\n"
      "        return {\"eq\": 0, \"gt\": 1 if a > b else 0}\n";
  d.good_verilog =
      "module cmp4(input [3:0] a, input [3:0] b, output eq, output gt);\n"
      "  assign eq = a == b;\n"
      "  assign gt = a > b;\n"
      "endmodule\n";
  d.weak = stimulus(d.spec, {{{"a", 1}, {"b", 2}}, {{"a", 9}, {"b", 4}}});
  d.strong = concat(d.weak, stimulus(d.spec, {{{"a", 5}, {"b", 5}}}));
  d.golden = exhaustive(d.spec);
  d.reaches_hidden = [](const Stimulus& s) {
    return any_vector(s, [](const SignalMap& m) { return get(m, "a") == get(m, "b"); });
  };
  return d;
}

FixtureDesign parity8() {
  FixtureDesign d;
  d.spec = make_spec("parity8", "Even parity of an 8-bit word: p is the XOR of all bits of d.",
                     DesignKind::combinational, {in("d", 8), out("p")});
  d.make_model = comb([](const Values& v) { return Values{{"p", static_cast<std::uint64_t>(__builtin_parityll(v.at("d")))}}; });
  d.python_source =
      "class Parity8:\n"
      "    def step(self, inputs):\n"
      "        d = inputs[\"d\"]\n"
      "        p = 0\n"
      "        while d:\n"
      "            p ^= d & 1\n"
      "            d >>= 1\n"
      "        return {\"p\": p}\n";
  d.good_verilog =
      "module parity8(input [7:0] d, output p);\n"
      "  assign p = ^d;\n"
      "endmodule\n";
  d.weak = stimulus(d.spec, {{{"d", 1}}, {{"d", 3}}});
  d.strong = concat(d.weak, stimulus(d.spec, {{{"d", 0}}, {{"d", 0xff}}, {{"d", 0x80}}}));
  d.golden = exhaustive(d.spec);
  d.reaches_hidden = [](const Stimulus& s) {
    return any_vector(s, [](const SignalMap& m) { return get(m, "d") == 0; });
  };
  return d;
}

FixtureDesign seqdet101() {
  FixtureDesign d;
  d.spec = make_spec("seqdet101",
                     "Serial pattern detector. out is 1 during the cycle after the three most recent bits "
                     "received on `in` were 1, 0, 1 (oldest first). Overlapping matches count. Synchronous "
                     "active-high reset clears the history.",
                     DesignKind::sequential,
                     {in("clk", 1, PortRole::clock), in("rst", 1, PortRole::reset), in("in"), out("out")});
  d.make_model = [] {
    return StepFn([h = 0u](const Values& v) mutable {
      Values o{{"out", (h & 7u) == 5u}};
      h = ((h << 1) | static_cast<unsigned>(v.at("in"))) & 7u;
      return o;
    });
  };
  d.python_source =
      "class Seqdet101:\n"
      "    def __init__(self):\n"
      "        self.history = []\n"
      "\n"
      "    def reset(self):\n"
      "        self.history = []\n"
      "\n"
      "    def step(self, inputs):\n"
      "        out = 1 if self.history[-3:] == [1, 0, 1] else 0\n"
      "        self.history = (self.history + [inputs[\"in\"]])[-3:]\n"
      "        return {\"out\": out}\n";
  d.good_verilog =
      "module seqdet101(input clk, input rst, input in, output out);\n"
      "  reg [2:0] h;\n"
      "  always @(posedge clk) begin\n"
      "    if (rst) h <= 3'b000;\n"
      "    else h <= {h[1:0], in};\n"
      "  end\n"
      "  assign out = h == 3'b101;\n"
      "endmodule\n";
  d.weak = stimulus(d.spec, {{{"in", 1}}, {{"in", 1}}, {{"in", 0}}, {{"in", 0}}});
  d.strong = stimulus(d.spec, {{{"in", 1}}, {{"in", 0}}, {{"in", 1}}, {{"in", 0}}, {{"in", 1}}, {{"in", 1}}});
  d.golden = random_stimulus(d.spec, 48, 17);
  d.reaches_hidden = [](const Stimulus& s) {
    for (std::size_t i = 2; i < s.size(); ++i)
      if (get(s[i - 2], "in") == 1 && get(s[i - 1], "in") == 0 && get(s[i], "in") == 1) return true;
    return false;
  };
  return d;
}

}  // namespace

std::vector<FixtureDesign> ablation_suite() {
  auto a = adder4();
  a.buggy_verilog.clear();
  auto c = counter3();
  c.buggy_verilog.clear();
  return {a, mux4(), alu4(), cmp4(), parity8(), prienc4(), c, fsm2(), seqdet101(), updown4()};
}

// ---------------------------------------------------------------- fakes

CompileResult FakeToolchain::compile(const std::vector<SourceFile>& sources, const std::string&,
                                     const std::filesystem::path& workdir) {
  std::lock_guard lock(mu_);
  ++compiles_;
  const auto& design = sources.at(0).text;
  CompileResult r;
  if (design.find("bug:syntax") != std::string::npos) {
    r.tool_output = "%Error: dut.v:2:3: syntax error, unexpected endmodule\n";
    r.diagnostics.push_back(Diagnostic{Severity::error, "dut.v", 2, "syntax error, unexpected endmodule",
                                       "%Error: dut.v:2:3: syntax error, unexpected endmodule"});
    return r;
  }
  const auto artifact = workdir / fmt::format("fake-{}.out", compiles_);
  designs_[artifact.string()] = design;
  r.artifact = artifact;
  return r;
}

std::string FakeToolchain::simulate(const std::filesystem::path& artifact, std::chrono::milliseconds timeout) {
  std::lock_guard lock(mu_);
  ++simulations_;
  const auto& design = designs_.at(artifact.string());
  if (design.find("bug:hang") != std::string::npos)
    throw Error(Errc::sim_timeout, fmt::format("simulation did not terminate within {} ms", timeout.count()));
  if (design.find("bug:function") != std::string::npos) {
    const auto o = spec_.outputs().front();
    return format_mismatch_line(Discrepancy{1, o.name, BitVec(o.width, 1), BitVec(o.width, 0)}) + "\n" +
           format_result_line(1) + "\n";
  }
  return format_result_line(0) + "\n";
}

unsigned FakeToolchain::compiles() const {
  std::lock_guard lock(mu_);
  return compiles_;
}

unsigned FakeToolchain::simulations() const {
  std::lock_guard lock(mu_);
  return simulations_;
}

TempDir::TempDir() {
  std::string templ = (std::filesystem::temp_directory_path() / "avxtest-XXXXXX").string();
  if (!::mkdtemp(templ.data())) throw std::runtime_error("mkdtemp failed");
  path_ = templ;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace avxtest
