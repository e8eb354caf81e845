// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "autoverifix/error.hpp"
#include "autoverifix/harness.hpp"
#include "autoverifix/model.hpp"
#include "autoverifix/toolchain.hpp"

namespace avxtest {

using namespace autoverifix;

using Values = std::map<std::string, std::uint64_t>;
/// Stateful cycle function: outputs for this cycle, then state update.
using StepFn = std::function<Values(const Values&)>;

/// A design with everything tests need: C++ reference behaviour, Python
/// source for prompts, RTL, and stimulus sets.
struct FixtureDesign {
  ProblemSpec spec;
  std::function<StepFn()> make_model;
  std::string python_source;
  std::string good_verilog;
  /// Wrong only on inputs that `weak` never applies. Empty for designs
  /// without a planted bug.
  std::string buggy_verilog;
  Stimulus weak;
  Stimulus strong;
  Stimulus golden;
  /// Stimulus reaches the lines `weak` misses.
  std::function<bool(const Stimulus&)> reaches_hidden;
};

FixtureDesign fsm2();
FixtureDesign adder4();
FixtureDesign counter3();
/// Ten seeded problems, four with planted bugs.
std::vector<FixtureDesign> ablation_suite();

Stimulus stimulus(const ProblemSpec& spec, const std::vector<Values>& rows);
SimTrace run_model(const FixtureDesign& d, const Stimulus& vectors);
/// 0.9 when the hidden lines are reached, 0.6 otherwise.
CoverageReport fixture_coverage(const FixtureDesign& d, const Stimulus& vectors);
/// Harness double backed by the C++ reference models.
HarnessResult fixture_harness_result(const FixtureDesign& d, const HarnessJob& job);
/// ProblemSpec with golden_testbench synthesized from d.golden.
ProblemSpec with_golden(const FixtureDesign& d);

std::string fenced(std::string_view lang, std::string_view body);

bool verilator_available();
std::filesystem::path fixtures_dir();

/// Toolchain double keyed on marker comments in dut.v:
///   "bug:syntax"   -> compile error at line 2
///   "bug:function" -> MISMATCH at cycle 1 on the first output
///   "bug:hang"     -> sim_timeout
///   anything else  -> RESULT pass
class FakeToolchain final : public HdlToolchain {
 public:
  explicit FakeToolchain(ProblemSpec spec) : spec_(std::move(spec)) {}

  CompileResult compile(const std::vector<SourceFile>& sources, const std::string& top,
                        const std::filesystem::path& workdir) override;
  std::string simulate(const std::filesystem::path& artifact, std::chrono::milliseconds timeout) override;

  unsigned compiles() const;
  unsigned simulations() const;

 private:
  ProblemSpec spec_;
  mutable std::mutex mu_;
  std::map<std::string, std::string> designs_;
  unsigned compiles_ = 0;
  unsigned simulations_ = 0;
};

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace avxtest
