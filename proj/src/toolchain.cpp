// SPDX-License-Identifier: Apache-2.0
#include "autoverifix/toolchain.hpp"

#include <fmt/format.h>
#include <stdlib.h>

#include <fstream>
#include <regex>

#include "autoverifix/error.hpp"
#include "autoverifix/process.hpp"

#ifndef AUTOVERIFIX_TOOLS_DIR
#define AUTOVERIFIX_TOOLS_DIR "tools"
#endif

namespace autoverifix {

const char* to_string(SimVerdict v) noexcept {
  switch (v) {
    case SimVerdict::pass: return "pass";
    case SimVerdict::fail: return "fail";
    case SimVerdict::malformed: return "malformed";
  }
  return "malformed";
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return lines;
}

Severity severity_of(std::string_view word) {
  return (word.starts_with("warning")) ? Severity::warning : Severity::error;
}

std::string tail(std::string_view text, std::size_t max_chars) {
  if (text.size() <= max_chars) return std::string(text);
  return "..." + std::string(text.substr(text.size() - max_chars));
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size())
    s.replace(pos, from.size(), to);
  return s;
}

}  // namespace

std::vector<Diagnostic> parse_diagnostics(std::string_view tool_output) {
  static const std::regex verilator_located(R"(^%(Error|Warning)(-[A-Za-z0-9_]+)?: ([^:\s]+):(\d+):(?:\d+:)? ?(.*)$)");
  static const std::regex verilator_bare(R"(^%(Error|Warning)(-[A-Za-z0-9_]+)?: (.*)$)");
  static const std::regex located(
      R"(^([^:\s][^:]*):(\d+):(?:(\d+):)? (?:(error|warning|fatal error|sorry|internal error|note): )?(.*)$)");

  std::vector<Diagnostic> out;
  std::string orphans;
  auto continue_previous = [&](std::string_view line) {
    if (out.empty()) {
      if (!orphans.empty()) orphans.push_back('\n');
      orphans.append(line);
    } else {
      out.back().raw.push_back('\n');
      out.back().raw.append(line);
    }
  };

  for (auto line : split_lines(tool_output)) {
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    const std::string s(line);
    std::smatch m;
    if (std::regex_match(s, m, verilator_located)) {
      out.push_back(Diagnostic{m[1] == "Warning" ? Severity::warning : Severity::error, m[3].str(),
                               static_cast<unsigned>(std::stoul(m[4].str())), m[5].str(), s});
    } else if (std::regex_match(s, m, verilator_bare)) {
      const auto msg = m[3].str();
      if (msg.starts_with("Exiting due to") && !out.empty()) {
        continue_previous(line);
      } else {
        out.push_back(Diagnostic{m[1] == "Warning" ? Severity::warning : Severity::error, "", std::nullopt, msg, s});
      }
    } else if (std::regex_match(s, m, located)) {
      const auto rest = m[5].str();
      if (m[4] == "note" || (!m[4].matched && rest.find_first_not_of(' ') != std::string::npos &&
                             rest[rest.find_first_not_of(' ')] == ':')) {
        continue_previous(line);
        continue;
      }
      const Severity sev = m[4].matched ? severity_of(m[4].str()) : Severity::error;
      out.push_back(Diagnostic{sev, m[1].str(), static_cast<unsigned>(std::stoul(m[2].str())), m[5].str(), s});
    } else {
      continue_previous(line);
    }
  }
  if (!orphans.empty()) {
    const auto first = orphans.substr(0, orphans.find('\n'));
    out.push_back(Diagnostic{Severity::error, "", std::nullopt, first, orphans});
  }
  return out;
}

SimOutcome parse_sim_output(std::string_view stdout_text, const ProblemSpec& spec) {
  static const std::regex mismatch(R"(^MISMATCH cycle=(\d+) signal=(\S+) expected=(\S+) observed=(\S+)$)");
  static const std::regex result(R"(^RESULT (pass|fail) mismatches=(\d+)$)");

  SimOutcome outcome;
  std::vector<std::pair<bool, std::uint64_t>> results;
  for (auto line : split_lines(stdout_text)) {
    const std::string s(line);
    std::smatch m;
    if (std::regex_match(s, m, mismatch)) {
      const auto* port = spec.find_port(m[2].str());
      if (!port || port->direction != Direction::output) {
        outcome.note = fmt::format("MISMATCH names undeclared output '{}'", m[2].str());
        outcome.verdict = SimVerdict::malformed;
        return outcome;
      }
      try {
        outcome.discrepancies.push_back(Discrepancy{std::stoull(m[1].str()), m[2].str(),
                                                    parse_hex_bitvec(m[3].str(), port->width),
                                                    parse_hex_bitvec(m[4].str(), port->width)});
      } catch (const std::exception& e) {
        outcome.note = fmt::format("unparseable MISMATCH line '{}': {}", s, e.what());
        outcome.verdict = SimVerdict::malformed;
        return outcome;
      }
    } else if (std::regex_match(s, m, result)) {
      results.emplace_back(m[1] == "pass", std::stoull(m[2].str()));
    }
  }

  if (results.size() != 1) {
    outcome.note = results.empty() ? "no RESULT line" : fmt::format("{} RESULT lines", results.size());
    outcome.verdict = SimVerdict::malformed;
  } else if (results[0].first) {
    if (results[0].second == 0 && outcome.discrepancies.empty()) {
      outcome.verdict = SimVerdict::pass;
    } else {
      outcome.note = fmt::format("RESULT pass contradicts {} MISMATCH lines", outcome.discrepancies.size());
      outcome.verdict = SimVerdict::malformed;
    }
  } else if (results[0].second == outcome.discrepancies.size() && results[0].second > 0) {
    outcome.verdict = SimVerdict::fail;
  } else {
    outcome.note = fmt::format("RESULT fail reports {} mismatches but {} MISMATCH lines were printed",
                               results[0].second, outcome.discrepancies.size());
    outcome.verdict = SimVerdict::malformed;
  }
  return outcome;
}

ToolchainConfig ToolchainConfig::verilator() {
  ToolchainConfig c;
  c.compile_cmd = fmt::format("'{}/vlt_build.sh' {{workdir}} {{artifact}} {{top}} {{sources}}", AUTOVERIFIX_TOOLS_DIR);
  c.run_cmd = "{artifact}";
  return c;
}

ToolchainConfig ToolchainConfig::icarus() {
  ToolchainConfig c;
  c.compile_cmd = "iverilog -g2012 -o {artifact} -s {top} {sources}";
  c.run_cmd = "vvp -n {artifact}";
  return c;
}

namespace {

std::vector<std::string> expand(const std::string& templ, const std::filesystem::path& workdir,
                                const std::filesystem::path& artifact, const std::string& top,
                                const std::vector<std::string>& sources) {
  std::vector<std::string> argv;
  for (auto word : split_command(templ)) {
    if (word == "{sources}") {
      argv.insert(argv.end(), sources.begin(), sources.end());
      continue;
    }
    word = replace_all(std::move(word), "{workdir}", workdir.string());
    word = replace_all(std::move(word), "{artifact}", artifact.string());
    word = replace_all(std::move(word), "{top}", top);
    argv.push_back(std::move(word));
  }
  if (argv.empty()) throw Error(Errc::config, "toolchain command is empty");
  return argv;
}

}  // namespace

void CommandToolchain::check_available() const {
  for (const auto* cmd : {&config_.compile_cmd, &config_.run_cmd}) {
    auto words = split_command(*cmd);
    if (words.empty()) throw Error(Errc::config, "toolchain command is empty");
    if (words[0].find('{') != std::string::npos) continue;  // e.g. {artifact}
    if (!find_executable(words[0]))
      throw Error(Errc::toolchain_missing, fmt::format("toolchain program '{}' not found", words[0]));
  }
}

CompileResult CommandToolchain::compile(const std::vector<SourceFile>& sources, const std::string& top,
                                        const std::filesystem::path& workdir) {
  if (sources.empty()) throw Error(Errc::precondition, "compile needs at least one source file");
  std::filesystem::create_directories(workdir);
  const auto abs_workdir = std::filesystem::absolute(workdir);
  std::vector<std::string> names;
  for (const auto& src : sources) {
    std::ofstream out(abs_workdir / src.name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io, fmt::format("cannot write {}", (abs_workdir / src.name).string()));
    out << src.text;
    names.push_back(src.name);
  }
  const auto artifact = abs_workdir / "sim.out";
  std::filesystem::remove(artifact);

  auto argv = expand(config_.compile_cmd, abs_workdir, artifact, top, names);
  if (!find_executable(argv[0]))
    throw Error(Errc::toolchain_missing, fmt::format("toolchain program '{}' not found", argv[0]));

  ProcessOptions opts;
  opts.cwd = abs_workdir;
  opts.timeout = std::chrono::minutes(5);
  const auto res = run_process(argv, opts);

  CompileResult result;
  result.tool_output = res.out + res.err;
  if (res.ok() && std::filesystem::exists(artifact)) {
    result.artifact = artifact;
    return result;
  }
  if (res.exit_code == 127 && res.err.find("not found") != std::string::npos)
    throw Error(Errc::toolchain_missing, tail(res.err, 500));

  result.diagnostics = parse_diagnostics(result.tool_output);
  const bool has_error = std::any_of(result.diagnostics.begin(), result.diagnostics.end(),
                                     [](const Diagnostic& d) { return d.severity == Severity::error; });
  if (!has_error) {
    // Crash or unrecognized output: wrap everything the tool said.
    const auto why = res.timed_out ? std::string("compiler timed out")
                     : res.signal  ? fmt::format("compiler killed by signal {}", *res.signal)
                                   : fmt::format("compiler exited with status {}", res.exit_code);
    result.diagnostics.push_back(
        Diagnostic{Severity::error, "", std::nullopt, why, result.tool_output.empty() ? why : tail(result.tool_output, 4000)});
  }
  return result;
}

std::string CommandToolchain::simulate(const std::filesystem::path& artifact, std::chrono::milliseconds timeout) {
  if (!std::filesystem::exists(artifact))
    throw Error(Errc::precondition, fmt::format("artifact {} does not exist", artifact.string()));
  const auto workdir = artifact.parent_path();
  auto argv = expand(config_.run_cmd, workdir, artifact, "", {});
  ProcessOptions opts;
  opts.cwd = workdir;
  opts.timeout = timeout;
  const auto res = run_process(argv, opts);
  if (res.timed_out)
    throw Error(Errc::sim_timeout, fmt::format("simulation did not terminate within {} ms", timeout.count()));
  if (!res.ok())
    throw Error(Errc::sim_crash,
                fmt::format("simulation exited abnormally ({}): {}",
                            res.signal ? fmt::format("signal {}", *res.signal) : fmt::format("status {}", res.exit_code),
                            tail(res.out + res.err, 2000)));
  return res.out;
}

ScopedWorkdir::ScopedWorkdir(const std::filesystem::path& parent, std::string_view prefix) {
  std::filesystem::create_directories(parent);
  std::string templ = (parent / fmt::format("{}-XXXXXX", prefix)).string();
  if (!::mkdtemp(templ.data())) throw Error(Errc::io, fmt::format("mkdtemp failed under {}", parent.string()));
  path_ = templ;
}

ScopedWorkdir::~ScopedWorkdir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace autoverifix
