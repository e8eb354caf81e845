// SPDX-License-Identifier: Apache-2.0
#include "autoverifix/llm.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "autoverifix/digest.hpp"
#include "autoverifix/json_io.hpp"

namespace autoverifix {

const char* to_string(Role r) noexcept {
  switch (r) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "user";
}

const char* to_string(FinishReason r) noexcept {
  switch (r) {
    case FinishReason::stop: return "stop";
    case FinishReason::length: return "length";
    case FinishReason::error: return "error";
  }
  return "error";
}

namespace {

FinishReason parse_finish_reason(std::string_view s) {
  if (s == "stop" || s.empty()) return FinishReason::stop;
  if (s == "length") return FinishReason::length;
  return FinishReason::error;
}

}  // namespace

void validate(const ChatRequest& r) {
  if (r.messages.empty()) throw Error(Errc::invalid_argument, "chat request has no messages");
  if (r.messages.front().role == Role::assistant)
    throw Error(Errc::invalid_argument, "first message must be a system or user message");
  if (!(r.temperature >= 0.0)) throw Error(Errc::invalid_argument, "temperature must be >= 0");
  if (r.max_tokens < 1) throw Error(Errc::invalid_argument, "max_tokens must be positive");
}

std::string request_digest(const ChatRequest& r) {
  json msgs = json::array();
  for (const auto& m : r.messages) msgs.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  const json key{{"model", r.model}, {"messages", std::move(msgs)}, {"sample", r.sample_index}};
  return sha256_hex(key.dump());
}

bool is_retryable(Errc code) noexcept {
  return code == Errc::transport || code == Errc::timeout || code == Errc::rate_limited;
}

Gateway::Gateway(std::shared_ptr<ChatBackend> backend, RetryPolicy retry, unsigned parallelism, Sleeper sleeper)
    : backend_(std::move(backend)),
      retry_(retry),
      sleeper_(sleeper ? std::move(sleeper) : Sleeper([](auto d) { std::this_thread::sleep_for(d); })),
      slots_(std::make_shared<std::counting_semaphore<>>(std::max(1u, parallelism))) {
  if (!backend_) throw Error(Errc::config, "gateway has no backend");
}

ChatResponse Gateway::complete(const ChatRequest& request) const {
  validate(request);
  slots_->acquire();
  struct Release {
    std::counting_semaphore<>& s;
    ~Release() { s.release(); }
  } release{*slots_};

  std::vector<std::string> retried;
  auto delay = retry_.initial_backoff;
  for (unsigned attempt = 0;; ++attempt) {
    try {
      ChatResponse response = backend_->send(request);
      response.retry_errors = std::move(retried);
      if (response.finish_reason == FinishReason::length)
        throw Error(Errc::truncated, fmt::format("{} response hit the max_tokens limit ({})", backend_->name(),
                                                 request.max_tokens));
      if (response.finish_reason == FinishReason::error)
        throw Error(Errc::transport, fmt::format("{} backend reported an error finish", backend_->name()));
      return response;
    } catch (const Error& e) {
      if (!is_retryable(e.code())) throw;
      if (attempt >= retry_.max_retries)
        throw Error(e.code(), fmt::format("{} (gave up after {} retries)", e.what(), attempt));
      retried.push_back(fmt::format("attempt {}: {}: {}", attempt + 1, to_string(e.code()), e.what()));
      sleeper_(delay);
      delay = std::min(retry_.max_backoff, std::chrono::milliseconds(static_cast<std::int64_t>(
                                               static_cast<double>(delay.count()) * retry_.multiplier)));
    }
  }
}

ScriptedBackend& ScriptedBackend::respond(std::string content, FinishReason reason) {
  std::lock_guard lock(mu_);
  steps_.push_back(ChatResponse{std::move(content), reason, {}, {}});
  return *this;
}

ScriptedBackend& ScriptedBackend::fail(Errc code, std::string message) {
  std::lock_guard lock(mu_);
  steps_.push_back(Failure{code, std::move(message)});
  return *this;
}

ChatResponse ScriptedBackend::send(const ChatRequest& request) {
  Handler handler;
  {
    std::lock_guard lock(mu_);
    calls_.push_back(request);
    if (!steps_.empty()) {
      Step step = std::move(steps_.front());
      steps_.pop_front();
      if (auto* f = std::get_if<Failure>(&step)) throw Error(f->code, f->message);
      return std::get<ChatResponse>(std::move(step));
    }
    handler = handler_;
  }
  if (!handler) throw Error(Errc::replay_miss, "scripted backend has no response left");
  return handler(request);
}

std::vector<ChatRequest> ScriptedBackend::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

std::size_t ScriptedBackend::call_count() const {
  std::lock_guard lock(mu_);
  return calls_.size();
}

ReplayBackend::ReplayBackend(const std::filesystem::path& transcript) {
  std::istringstream in(read_file(transcript));
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      ChatResponse r;
      r.content = j.at("response").get<std::string>();
      r.finish_reason = parse_finish_reason(j.value("finish_reason", "stop"));
      entries_.insert_or_assign(j.at("digest").get<std::string>(), std::move(r));
    } catch (const json::exception& e) {
      throw Error(Errc::malformed, fmt::format("{}:{}: {}", transcript.string(), lineno, e.what()));
    }
  }
}

ChatResponse ReplayBackend::send(const ChatRequest& request) {
  const auto digest = request_digest(request);
  auto it = entries_.find(digest);
  if (it == entries_.end())
    throw Error(Errc::replay_miss, fmt::format("no transcript entry for request digest {}", digest));
  return it->second;
}

RecordingBackend::RecordingBackend(std::shared_ptr<ChatBackend> inner, std::filesystem::path transcript)
    : inner_(std::move(inner)), transcript_(std::move(transcript)) {
  if (!inner_) throw Error(Errc::config, "recording backend needs an inner backend");
  if (transcript_.has_parent_path()) std::filesystem::create_directories(transcript_.parent_path());
}

ChatResponse RecordingBackend::send(const ChatRequest& request) {
  ChatResponse response = inner_->send(request);
  const json entry{{"digest", request_digest(request)},
                   {"response", response.content},
                   {"finish_reason", to_string(response.finish_reason)}};
  std::lock_guard lock(mu_);
  std::ofstream out(transcript_, std::ios::app | std::ios::binary);
  if (!out) throw Error(Errc::io, fmt::format("cannot append to {}", transcript_.string()));
  out << entry.dump() << '\n';
  out.flush();
  return response;
}

namespace {

bool tag_matches(std::string_view tag, CodeLang lang) {
  switch (lang) {
    case CodeLang::python: return tag == "python" || tag == "py" || tag == "python3";
    case CodeLang::verilog: return tag == "verilog" || tag == "systemverilog" || tag == "sv" || tag == "v";
    case CodeLang::json: return tag == "json";
  }
  return false;
}

const char* lang_name(CodeLang lang) {
  switch (lang) {
    case CodeLang::python: return "python";
    case CodeLang::verilog: return "verilog";
    case CodeLang::json: return "json";
  }
  return "?";
}

}  // namespace

std::string extract_code_block(std::string_view response, CodeLang lang) {
  struct Block {
    std::string tag;
    std::string body;
  };
  std::vector<Block> blocks;
  std::optional<Block> open;

  std::size_t pos = 0;
  while (pos <= response.size()) {
    auto nl = response.find('\n', pos);
    auto line = response.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto trimmed = line.substr(std::min(line.find_first_not_of(" \t"), line.size()));
    if (trimmed.starts_with("```")) {
      if (open) {
        blocks.push_back(std::move(*open));
        open.reset();
      } else {
        std::string tag(trimmed.substr(3));
        tag.erase(std::remove_if(tag.begin(), tag.end(), [](char c) { return c == ' ' || c == '\t'; }), tag.end());
        std::transform(tag.begin(), tag.end(), tag.begin(), [](unsigned char c) { return std::tolower(c); });
        open = Block{std::move(tag), {}};
      }
    } else if (open) {
      open->body.append(line).push_back('\n');
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  if (open) blocks.push_back(std::move(*open));

  const Block* chosen = nullptr;
  for (const auto& b : blocks)
    if (tag_matches(b.tag, lang)) {
      chosen = &b;
      break;
    }
  if (!chosen)
    for (const auto& b : blocks)
      if (b.tag.empty()) {
        chosen = &b;
        break;
      }
  if (!chosen) throw Error(Errc::no_code_block, fmt::format("response contains no {} code block", lang_name(lang)));

  std::string body = chosen->body;
  while (!body.empty() && (body.back() == '\n' || body.back() == '\r')) body.pop_back();
  body.push_back('\n');
  return body;
}

}  // namespace autoverifix
