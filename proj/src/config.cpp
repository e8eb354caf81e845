// SPDX-License-Identifier: Apache-2.0
#include "autoverifix/config.hpp"

#include <fmt/format.h>

#include <set>

#include "autoverifix/digest.hpp"
#include "autoverifix/error.hpp"
#include "autoverifix/json_io.hpp"
#include "autoverifix/process.hpp"

namespace autoverifix {

const char* to_string(BackendMode m) noexcept {
  switch (m) {
    case BackendMode::live: return "live";
    case BackendMode::replay: return "replay";
    case BackendMode::record: return "record";
  }
  return "live";
}

BackendMode parse_backend_mode(std::string_view s) {
  for (auto m : {BackendMode::live, BackendMode::replay, BackendMode::record})
    if (s == to_string(m)) return m;
  throw Error(Errc::config, fmt::format("unknown backend mode '{}' (expected live, replay or record)", s));
}

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& why) {
  throw Error(Errc::config, fmt::format("config {}: {}", path, why));
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) bad(path.empty() ? "<root>" : path, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items())
    if (!ok.count(key)) bad(path.empty() ? key : path + "." + key, "unknown key");
}

template <typename T>
void read(const json& j, const char* key, const std::string& path, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    bad(path + "." + key, "wrong type");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

BackendConfig backend_from_json(const json& j, const std::string& path, const std::filesystem::path& base) {
  check_keys(j, path, {"mode", "model", "base_url", "transcript", "temperature", "max_tokens", "seed", "timeout_s"});
  BackendConfig c;
  std::string mode = to_string(c.mode), transcript;
  read(j, "mode", path, mode);
  c.mode = parse_backend_mode(mode);
  read(j, "model", path, c.model);
  read(j, "base_url", path, c.base_url);
  read(j, "transcript", path, transcript);
  c.transcript = resolve(base, transcript);
  read(j, "temperature", path, c.temperature);
  read(j, "max_tokens", path, c.max_tokens);
  if (auto it = j.find("seed"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) bad(path + ".seed", "expected an integer");
    c.seed = it->get<std::int64_t>();
  }
  read(j, "timeout_s", path, c.timeout_s);
  if (c.temperature < 0) bad(path + ".temperature", "must be >= 0");
  if (c.max_tokens == 0) bad(path + ".max_tokens", "must be >= 1");
  if (c.mode != BackendMode::live && c.transcript.empty()) bad(path + ".transcript", "required for replay and record");
  return c;
}

json to_json(const BackendConfig& c) {
  return json{{"mode", to_string(c.mode)},
              {"model", c.model},
              {"base_url", c.base_url},
              {"transcript", c.transcript.string()},
              {"temperature", c.temperature},
              {"max_tokens", c.max_tokens},
              {"seed", c.seed ? json(*c.seed) : json(nullptr)},
              {"timeout_s", c.timeout_s}};
}

}  // namespace

AppConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  check_keys(j, "", {"stage1", "stage2", "budget", "coverage_feedback", "harness", "toolchain", "prompts", "retry",
                     "parallelism"});
  AppConfig c;
  if (j.contains("stage1")) c.stage1 = backend_from_json(j["stage1"], "stage1", base_dir);
  if (j.contains("stage2")) c.stage2 = backend_from_json(j["stage2"], "stage2", base_dir);

  if (auto it = j.find("budget"); it != j.end()) {
    check_keys(*it, "budget",
               {"max_python_syntax_iters", "max_coverage_iters", "max_verilog_syntax_iters", "max_function_iters",
                "coverage_threshold", "max_reported_discrepancies"});
    read(*it, "max_python_syntax_iters", "budget", c.budget.max_python_syntax_iters);
    read(*it, "max_coverage_iters", "budget", c.budget.max_coverage_iters);
    read(*it, "max_verilog_syntax_iters", "budget", c.budget.max_verilog_syntax_iters);
    read(*it, "max_function_iters", "budget", c.budget.max_function_iters);
    read(*it, "coverage_threshold", "budget", c.budget.coverage_threshold);
    read(*it, "max_reported_discrepancies", "budget", c.budget.max_reported_discrepancies);
  }
  read(j, "coverage_feedback", "", c.coverage_feedback);

  if (auto it = j.find("harness"); it != j.end()) {
    check_keys(*it, "harness", {"mode", "cmd", "transcript", "time_limit_s"});
    std::string mode = "live", transcript;
    read(*it, "mode", "harness", mode);
    c.harness.mode = parse_backend_mode(mode);
    read(*it, "cmd", "harness", c.harness.cmd);
    read(*it, "transcript", "harness", transcript);
    c.harness.transcript = resolve(base_dir, transcript);
    read(*it, "time_limit_s", "harness", c.harness.time_limit_s);
    if (c.harness.mode != BackendMode::live && c.harness.transcript.empty())
      bad("harness.transcript", "required for replay and record");
    if (c.harness.time_limit_s <= 0) bad("harness.time_limit_s", "must be > 0");
  }

  if (auto it = j.find("toolchain"); it != j.end()) {
    check_keys(*it, "toolchain", {"preset", "compile_cmd", "run_cmd", "timeout_s"});
    std::string preset = "verilator";
    read(*it, "preset", "toolchain", preset);
    if (preset == "verilator") c.toolchain = ToolchainConfig::verilator();
    else if (preset == "icarus") c.toolchain = ToolchainConfig::icarus();
    else bad("toolchain.preset", fmt::format("unknown preset '{}' (expected verilator or icarus)", preset));
    read(*it, "compile_cmd", "toolchain", c.toolchain.compile_cmd);
    read(*it, "run_cmd", "toolchain", c.toolchain.run_cmd);
    double timeout_s = 10.0;
    read(*it, "timeout_s", "toolchain", timeout_s);
    if (timeout_s <= 0) bad("toolchain.timeout_s", "must be > 0");
    c.toolchain.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(timeout_s * 1000.0));
  }
  c.budget.sim_timeout = c.toolchain.timeout;

  if (auto it = j.find("prompts"); it != j.end()) {
    check_keys(*it, "prompts", {"template_dir"});
    std::string dir;
    read(*it, "template_dir", "prompts", dir);
    if (!dir.empty()) c.template_dir = resolve(base_dir, dir);
  }

  if (auto it = j.find("retry"); it != j.end()) {
    check_keys(*it, "retry", {"max_retries", "initial_backoff_ms", "multiplier", "max_backoff_ms"});
    read(*it, "max_retries", "retry", c.retry.max_retries);
    std::int64_t initial = c.retry.initial_backoff.count(), max = c.retry.max_backoff.count();
    read(*it, "initial_backoff_ms", "retry", initial);
    read(*it, "max_backoff_ms", "retry", max);
    read(*it, "multiplier", "retry", c.retry.multiplier);
    c.retry.initial_backoff = std::chrono::milliseconds(initial);
    c.retry.max_backoff = std::chrono::milliseconds(max);
  }
  read(j, "parallelism", "", c.parallelism);
  if (c.parallelism == 0) bad("parallelism", "must be >= 1");

  try {
    validate(c.budget);
  } catch (const Error& e) {
    bad("budget", e.what());
  }
  return c;
}

AppConfig load_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(Errc::config, fmt::format("{}: {}", path.string(), e.what()));
  } catch (const Error& e) {
    throw Error(Errc::config, e.what());
  }
  return config_from_json(j, path.parent_path());
}

json to_json(const AppConfig& c) {
  return json{
      {"stage1", to_json(c.stage1)},
      {"stage2", to_json(c.stage2)},
      {"budget",
       {{"max_python_syntax_iters", c.budget.max_python_syntax_iters},
        {"max_coverage_iters", c.budget.max_coverage_iters},
        {"max_verilog_syntax_iters", c.budget.max_verilog_syntax_iters},
        {"max_function_iters", c.budget.max_function_iters},
        {"coverage_threshold", c.budget.coverage_threshold},
        {"max_reported_discrepancies", c.budget.max_reported_discrepancies}}},
      {"coverage_feedback", c.coverage_feedback},
      {"harness",
       {{"mode", to_string(c.harness.mode)},
        {"cmd", c.harness.cmd},
        {"transcript", c.harness.transcript.string()},
        {"time_limit_s", c.harness.time_limit_s}}},
      {"toolchain",
       {{"compile_cmd", c.toolchain.compile_cmd},
        {"run_cmd", c.toolchain.run_cmd},
        {"timeout_s", static_cast<double>(c.toolchain.timeout.count()) / 1000.0}}},
      {"prompts", {{"template_dir", c.template_dir.string()}}},
      {"retry",
       {{"max_retries", c.retry.max_retries},
        {"initial_backoff_ms", c.retry.initial_backoff.count()},
        {"multiplier", c.retry.multiplier},
        {"max_backoff_ms", c.retry.max_backoff.count()}}},
      {"parallelism", c.parallelism}};
}

std::string config_digest(const AppConfig& config) {
  auto j = to_json(config);
  for (const char* s : {"stage1", "stage2", "harness"}) {
    j[s].erase("mode");
    j[s].erase("transcript");
  }
  j.erase("retry");
  j.erase("parallelism");
  // Template text, not its location, is what shapes the prompts.
  std::string templates;
  for (auto kind : kPromptKinds) {
    const auto stem = config.template_dir / to_string(kind);
    for (const char* suffix : {".system.txt", ".user.txt"}) {
      try {
        templates += sha256_hex(read_file(stem.string() + suffix));
      } catch (const Error&) {
        templates += "-";
      }
    }
  }
  j["prompts"] = sha256_hex(templates);
  return sha256_hex(j.dump());
}

PipelineSettings pipeline_settings(const AppConfig& config, const std::filesystem::path& scratch_dir) {
  PipelineSettings s;
  s.budget = config.budget;
  s.coverage_feedback = config.coverage_feedback;
  s.stage1_params = RequestParams{config.stage1.model, config.stage1.temperature, config.stage1.max_tokens,
                                  config.stage1.seed, 0};
  s.stage2_params = RequestParams{config.stage2.model, config.stage2.temperature, config.stage2.max_tokens,
                                  config.stage2.seed, 0};
  s.harness_time_limit_s = config.harness.time_limit_s;
  s.scratch_dir = scratch_dir;
  return s;
}

std::shared_ptr<ChatBackend> make_backend(const BackendConfig& config) {
  switch (config.mode) {
    case BackendMode::replay: return std::make_shared<ReplayBackend>(config.transcript);
    case BackendMode::record:
    case BackendMode::live: {
      HttpBackendOptions opts;
      opts.base_url = config.base_url;
      opts.timeout = std::chrono::seconds(config.timeout_s);
      auto live = std::make_shared<HttpBackend>(opts);
      if (config.mode == BackendMode::live) return live;
      return std::make_shared<RecordingBackend>(live, config.transcript);
    }
  }
  throw Error(Errc::config, "unreachable backend mode");
}

std::shared_ptr<ModelHarness> make_harness(const HarnessConfig& config) {
  if (config.mode == BackendMode::replay) return std::make_shared<ReplayHarness>(config.transcript);
  auto argv = split_command(config.cmd);
  if (argv.empty()) throw Error(Errc::config, "config harness.cmd: empty command");
  auto live = std::make_shared<SubprocessHarness>(argv);
  if (config.mode == BackendMode::live) return live;
  return std::make_shared<RecordingHarness>(live, config.transcript);
}

Runtime::Runtime(const AppConfig& config)
    : stage1_(std::make_unique<Gateway>(make_backend(config.stage1), config.retry, config.parallelism)),
      stage2_(std::make_unique<Gateway>(make_backend(config.stage2), config.retry, config.parallelism)),
      harness_(make_harness(config.harness)),
      toolchain_(std::make_unique<CommandToolchain>(config.toolchain)),
      forge_(std::make_unique<PromptForge>(PromptLibrary::load(config.template_dir))) {}

PipelineServices Runtime::services() const {
  return PipelineServices{*stage1_, *stage2_, *harness_, *toolchain_, *forge_};
}

}  // namespace autoverifix
