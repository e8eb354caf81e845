// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "autoverifix/harness.hpp"
#include "autoverifix/llm.hpp"
#include "autoverifix/model.hpp"
#include "autoverifix/pipeline.hpp"
#include "autoverifix/toolchain.hpp"

namespace autoverifix {

enum class BackendMode { live, replay, record };

const char* to_string(BackendMode m) noexcept;
BackendMode parse_backend_mode(std::string_view s);

struct BackendConfig {
  BackendMode mode = BackendMode::live;
  std::string model = "gpt-4o";
  std::string base_url = "https://api.openai.com/v1";
  /// Replay source or record destination.
  std::filesystem::path transcript;
  double temperature = 0.8;
  unsigned max_tokens = 4096;
  std::optional<std::int64_t> seed;
  unsigned timeout_s = 120;
};

struct HarnessConfig {
  BackendMode mode = BackendMode::live;
  std::string cmd = "python3 -m py_harness";
  std::filesystem::path transcript;
  double time_limit_s = 10.0;
};

/// Everything a run needs, read from one JSON file. Secrets never live here;
/// the API key comes from AUTOVERIFIX_API_KEY.
struct AppConfig {
  BackendConfig stage1;
  BackendConfig stage2;
  RunBudget budget;
  bool coverage_feedback = true;
  HarnessConfig harness;
  ToolchainConfig toolchain = ToolchainConfig::verilator();
  std::filesystem::path template_dir = PromptLibrary::default_dir();
  RetryPolicy retry;
  unsigned parallelism = 4;
};

/// Unknown keys are rejected (Errc::config, naming the key). Relative paths
/// resolve against `base_dir`.
AppConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
AppConfig load_config(const std::filesystem::path& path);
/// Normalized form with every default filled in.
nlohmann::json to_json(const AppConfig& config);
/// SHA-256 of the normalized form minus backend modes and transcript paths,
/// so recording and replaying the same settings share journal cells.
std::string config_digest(const AppConfig& config);

PipelineSettings pipeline_settings(const AppConfig& config, const std::filesystem::path& scratch_dir);

/// Owns the concrete collaborators described by a config.
class Runtime {
 public:
  explicit Runtime(const AppConfig& config);

  PipelineServices services() const;
  const PromptForge& forge() const { return *forge_; }
  HdlToolchain& toolchain() const { return *toolchain_; }

 private:
  std::unique_ptr<Gateway> stage1_;
  std::unique_ptr<Gateway> stage2_;
  std::shared_ptr<ModelHarness> harness_;
  std::unique_ptr<CommandToolchain> toolchain_;
  std::unique_ptr<PromptForge> forge_;
};

/// Gateway-ready backend for one stage section.
std::shared_ptr<ChatBackend> make_backend(const BackendConfig& config);
std::shared_ptr<ModelHarness> make_harness(const HarnessConfig& config);

}  // namespace autoverifix
