// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <variant>
#include <vector>

#include "autoverifix/error.hpp"

namespace autoverifix {

enum class Role { system, user, assistant };

struct ChatMessage {
  Role role = Role::user;
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.8;
  unsigned max_tokens = 4096;
  std::optional<std::int64_t> seed;

  // Local metadata, never sent on the wire.
  /// Prompt family that produced the request (e.g. "verilog_gen").
  std::string purpose;
  /// Stage-2 sample number; part of the replay key so n samples of the same
  /// prompt can be recorded and replayed independently.
  unsigned sample_index = 0;
};

/// Throws Errc::invalid_argument unless messages are nonempty, the first role
/// is system or user, temperature >= 0 and max_tokens >= 1.
void validate(const ChatRequest& request);

/// Replay key: SHA-256 over (model, messages, sample_index). Temperature and
/// seed are deliberately excluded.
std::string request_digest(const ChatRequest& request);

enum class FinishReason { stop, length, error };

struct TokenUsage {
  std::uint64_t prompt_tokens = 0;
  std::uint64_t completion_tokens = 0;
};

struct ChatResponse {
  std::string content;
  FinishReason finish_reason = FinishReason::stop;
  TokenUsage usage;
  /// Transport failures that were retried before this response arrived.
  std::vector<std::string> retry_errors;
};

const char* to_string(Role r) noexcept;
const char* to_string(FinishReason r) noexcept;

/// Whether a backend failure is worth retrying (transport, timeout, rate limit).
bool is_retryable(Errc code) noexcept;

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  /// One attempt. Failures are reported as autoverifix::Error.
  virtual ChatResponse send(const ChatRequest& request) = 0;
  virtual std::string name() const = 0;
};

struct RetryPolicy {
  unsigned max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{30'000};
};

/// Shareable front end over one backend: bounded in-flight requests,
/// exponential-backoff retries, and truncation checking.
class Gateway {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit Gateway(std::shared_ptr<ChatBackend> backend, RetryPolicy retry = {}, unsigned parallelism = 4,
                   Sleeper sleeper = {});

  /// Returns the full assistant message. A response cut off at the token
  /// limit raises Errc::truncated rather than being returned.
  ChatResponse complete(const ChatRequest& request) const;

  ChatBackend& backend() const { return *backend_; }

 private:
  std::shared_ptr<ChatBackend> backend_;
  RetryPolicy retry_;
  Sleeper sleeper_;
  std::shared_ptr<std::counting_semaphore<>> slots_;
};

/// Test double. Serves queued steps in order, then falls back to `handler`.
class ScriptedBackend final : public ChatBackend {
 public:
  struct Failure {
    Errc code;
    std::string message;
  };
  using Step = std::variant<ChatResponse, Failure>;
  using Handler = std::function<ChatResponse(const ChatRequest&)>;

  ScriptedBackend() = default;
  explicit ScriptedBackend(Handler handler) : handler_(std::move(handler)) {}

  ScriptedBackend& respond(std::string content, FinishReason reason = FinishReason::stop);
  ScriptedBackend& fail(Errc code, std::string message = "scripted failure");

  ChatResponse send(const ChatRequest& request) override;
  std::string name() const override { return "scripted"; }

  /// Every request received, failed attempts included.
  std::vector<ChatRequest> calls() const;
  std::size_t call_count() const;

 private:
  mutable std::mutex mu_;
  std::deque<Step> steps_;
  Handler handler_;
  std::vector<ChatRequest> calls_;
};

/// Serves recorded responses keyed by request digest. Pure: the same request
/// always yields the same bytes.
class ReplayBackend final : public ChatBackend {
 public:
  explicit ReplayBackend(const std::filesystem::path& transcript);
  explicit ReplayBackend(std::map<std::string, ChatResponse> entries) : entries_(std::move(entries)) {}

  ChatResponse send(const ChatRequest& request) override;
  std::string name() const override { return "replay"; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, ChatResponse> entries_;
};

/// Proxies another backend and appends every successful exchange to a
/// transcript file as {"digest", "response", "finish_reason"} lines.
class RecordingBackend final : public ChatBackend {
 public:
  RecordingBackend(std::shared_ptr<ChatBackend> inner, std::filesystem::path transcript);

  ChatResponse send(const ChatRequest& request) override;
  std::string name() const override { return "record(" + inner_->name() + ")"; }

 private:
  std::shared_ptr<ChatBackend> inner_;
  std::filesystem::path transcript_;
  std::mutex mu_;
};

inline constexpr const char* kApiKeyEnv = "AUTOVERIFIX_API_KEY";

struct HttpBackendOptions {
  std::string base_url;
  /// Empty means read kApiKeyEnv.
  std::string api_key;
  std::chrono::seconds timeout{120};
};

/// Chat-completions client: POST <base_url>/chat/completions with a bearer
/// token.
class HttpBackend final : public ChatBackend {
 public:
  /// Throws Errc::config when no API key is available.
  explicit HttpBackend(HttpBackendOptions options);

  ChatResponse send(const ChatRequest& request) override;
  std::string name() const override { return "http"; }

 private:
  HttpBackendOptions options_;
  std::string scheme_host_port_;
  std::string path_prefix_;
};

enum class CodeLang { python, verilog, json };

/// Contents of the first fenced block tagged `lang` (untagged fences are a
/// fallback), with exactly one trailing newline. Throws Errc::no_code_block.
std::string extract_code_block(std::string_view response, CodeLang lang);

}  // namespace autoverifix
