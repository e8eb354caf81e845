// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace autoverifix {

struct ProcessOptions {
  std::filesystem::path cwd;
  std::string stdin_data;
  std::optional<std::chrono::milliseconds> timeout;
};

struct ProcessResult {
  int exit_code = -1;
  /// Set when the child died from a signal (including our timeout kill).
  std::optional<int> signal;
  bool timed_out = false;
  std::string out;
  std::string err;
  std::chrono::milliseconds elapsed{0};

  bool ok() const { return !timed_out && !signal && exit_code == 0; }
};

/// Runs argv[0] (PATH lookup) in its own process group. On timeout the whole
/// group is killed. Throws Errc::io when the process cannot be started.
ProcessResult run_process(const std::vector<std::string>& argv, const ProcessOptions& options = {});

/// Shell-style word splitting: whitespace separates, single and double quotes
/// group, backslash escapes the next character.
std::vector<std::string> split_command(std::string_view command);

/// Resolves a program name against PATH; paths containing '/' are checked
/// directly.
std::optional<std::filesystem::path> find_executable(std::string_view program);

}  // namespace autoverifix
