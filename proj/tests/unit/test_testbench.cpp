// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "autoverifix/testbench.hpp"
#include "autoverifix/toolchain.hpp"
#include "fixtures.hpp"

using namespace autoverifix;
using avxtest::TempDir;

namespace {

bool contains(const std::string& hay, std::string_view needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST(Testbench, StructureForSequentialDesign) {
  const auto d = avxtest::fsm2();
  const auto trace = avxtest::run_model(d, d.strong);
  const auto tb = synthesize_testbench(d.spec, trace);
  EXPECT_EQ(tb.top, "tb_top");
  EXPECT_EQ(tb.expected_cycle_count, 7u);
  EXPECT_EQ(tb.stimulus, d.strong);
  EXPECT_EQ(tb.mismatch_line_format, kMismatchFormat);
  EXPECT_TRUE(contains(tb.source, "module tb_top"));
  EXPECT_TRUE(contains(tb.source, d.spec.module_name + " tb_dut"));
  EXPECT_TRUE(contains(tb.source, "posedge") || contains(tb.source, "negedge"));
  EXPECT_TRUE(contains(tb.source, "$finish"));
  EXPECT_TRUE(contains(tb.source, "MISMATCH cycle=%0d signal=%s expected=%h observed=%h"));
  EXPECT_FALSE(contains(tb.source, "timescale"));
  EXPECT_FALSE(contains(tb.source, "$dumpfile"));
  EXPECT_TRUE(contains(synthesize_testbench(d.spec, trace, {true}).source, "$dumpfile"));
}

TEST(Testbench, DeterministicText) {
  const auto d = avxtest::counter3();
  const auto trace = avxtest::run_model(d, d.strong);
  EXPECT_EQ(synthesize_testbench(d.spec, trace).source, synthesize_testbench(d.spec, trace).source);
}

TEST(Testbench, RejectsEmptyAndForeignTraces) {
  const auto d = avxtest::adder4();
  try {
    synthesize_testbench(d.spec, SimTrace{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::empty_trace);
  }
  const auto fsm = avxtest::fsm2();
  try {
    synthesize_testbench(d.spec, avxtest::run_model(fsm, fsm.weak));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::port_mismatch);
  }
}

TEST(Testbench, ResultAndMismatchLines) {
  EXPECT_EQ(format_result_line(0), "RESULT pass mismatches=0");
  EXPECT_EQ(format_result_line(3), "RESULT fail mismatches=3");
  EXPECT_EQ(format_mismatch_line({4, "q", BitVec(3, 5), BitVec(3, 1)}), "MISMATCH cycle=4 signal=q expected=5 observed=1");
  EXPECT_EQ(format_mismatch_line({0, "w", BitVec(9, 0x1f), BitVec::unknown(9)}),
            "MISMATCH cycle=0 signal=w expected=01f observed=x");
}

TEST(Testbench, FlippedBitInSequentialTraceGivesOneMismatch) {
  if (!avxtest::verilator_available()) GTEST_SKIP() << "verilator not installed";
  const auto d = avxtest::counter3();
  auto trace = avxtest::run_model(d, d.strong);
  const std::uint64_t cycle = 4;
  auto& q = trace.cycles[cycle].outputs.at("q");
  q = BitVec(q.width(), q.value() ^ 0b010);
  const auto tb = synthesize_testbench(d.spec, trace);
  CommandToolchain tc(ToolchainConfig::verilator());
  TempDir dir;
  auto r = tc.compile({{"dut.v", d.good_verilog}, {"tb.v", tb.source}}, tb.top, dir.path());
  ASSERT_TRUE(r.ok()) << r.tool_output;
  const auto o = parse_sim_output(tc.simulate(*r.artifact, std::chrono::seconds(10)), d.spec);
  ASSERT_EQ(o.verdict, SimVerdict::fail) << o.note;
  ASSERT_EQ(o.discrepancies.size(), 1u);
  EXPECT_EQ(o.discrepancies[0].cycle, cycle);
  EXPECT_EQ(o.discrepancies[0].signal, "q");
  EXPECT_EQ(o.discrepancies[0].expected, q);
}
