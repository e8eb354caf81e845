// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autoverifix/model.hpp"

namespace autoverifix {

struct SourceFile {
  std::string name;  ///< file name inside the workdir, e.g. "dut.v"
  std::string text;
};

struct CompileResult {
  std::optional<std::filesystem::path> artifact;
  /// Empty on success; otherwise holds at least one error.
  std::vector<Diagnostic> diagnostics;
  std::string tool_output;

  bool ok() const { return artifact.has_value(); }
};

/// Parses compiler output into diagnostics, preserving tool order.
///
/// Recognized shapes:
///   <file>:<line>: <severity>: <message>      (icarus style)
///   <file>:<line>: <message>                  (severity error)
///   <file>:<line>:<col>: <severity>: <message> (gcc/clang style)
///   %Error[-CODE]: <file>:<line>:<col>: <message>  (verilator style)
///   %Warning-CODE: ...
/// Notes, "<file>:<line>:   : ..." lines and any other lines continue the
/// previous diagnostic; lines before the first
/// diagnostic are collected into one trailing raw diagnostic.
std::vector<Diagnostic> parse_diagnostics(std::string_view tool_output);

enum class SimVerdict { pass, fail, malformed };

const char* to_string(SimVerdict v) noexcept;

struct SimOutcome {
  std::vector<Discrepancy> discrepancies;
  SimVerdict verdict = SimVerdict::malformed;
  std::string note;  ///< why the verdict is malformed
};

/// Reads the testbench grammar. pass iff exactly one `RESULT pass
/// mismatches=0` and no MISMATCH lines; fail iff one `RESULT fail` whose count
/// equals the MISMATCH lines seen; anything else is malformed.
SimOutcome parse_sim_output(std::string_view stdout_text, const ProblemSpec& spec);

class HdlToolchain {
 public:
  virtual ~HdlToolchain() = default;

  /// Writes `sources` into `workdir` and builds a simulatable artifact with
  /// `top` as the root module. Throws Errc::precondition for an empty source
  /// list and Errc::toolchain_missing when the compiler cannot be found.
  virtual CompileResult compile(const std::vector<SourceFile>& sources, const std::string& top,
                                const std::filesystem::path& workdir) = 0;

  /// Full stdout of one simulation run. Throws Errc::sim_timeout when killed
  /// at `timeout` and Errc::sim_crash on abnormal exit.
  virtual std::string simulate(const std::filesystem::path& artifact, std::chrono::milliseconds timeout) = 0;
};

/// Placeholders: {workdir} {artifact} {top} {sources}. {sources} expands to
/// one argument per file.
struct ToolchainConfig {
  std::string compile_cmd;
  std::string run_cmd;
  std::chrono::milliseconds timeout{10'000};

  /// Verilator through the bundled tools/vlt_build.sh wrapper.
  static ToolchainConfig verilator();
  /// Icarus Verilog (iverilog + vvp).
  static ToolchainConfig icarus();
};

class CommandToolchain final : public HdlToolchain {
 public:
  explicit CommandToolchain(ToolchainConfig config) : config_(std::move(config)) {}

  CompileResult compile(const std::vector<SourceFile>& sources, const std::string& top,
                        const std::filesystem::path& workdir) override;
  std::string simulate(const std::filesystem::path& artifact, std::chrono::milliseconds timeout) override;

  /// Throws Errc::toolchain_missing unless both commands resolve.
  void check_available() const;
  const ToolchainConfig& config() const { return config_; }

 private:
  ToolchainConfig config_;
};

/// Private scratch directory removed on destruction.
class ScopedWorkdir {
 public:
  explicit ScopedWorkdir(const std::filesystem::path& parent, std::string_view prefix = "avx");
  ScopedWorkdir(const ScopedWorkdir&) = delete;
  ScopedWorkdir& operator=(const ScopedWorkdir&) = delete;
  ~ScopedWorkdir();

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace autoverifix
