// SPDX-License-Identifier: Apache-2.0
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <fmt/format.h>

#include <cstdlib>

#include <nlohmann/json.hpp>

#include "autoverifix/llm.hpp"

namespace autoverifix {

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {
  if (options_.api_key.empty()) {
    const char* key = std::getenv(kApiKeyEnv);
    if (!key || !*key)
      throw Error(Errc::config, fmt::format("live backend requires the {} environment variable", kApiKeyEnv));
    options_.api_key = key;
  }
  const auto& url = options_.base_url;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(Errc::config, fmt::format("base URL '{}' lacks a scheme", url));
  auto path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

ChatResponse HttpBackend::send(const ChatRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.messages) messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  nlohmann::json body{{"model", request.model},
                      {"messages", std::move(messages)},
                      {"temperature", request.temperature},
                      {"max_tokens", request.max_tokens}};
  if (request.seed) body["seed"] = *request.seed;

  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  client.set_write_timeout(options_.timeout);
  client.set_bearer_token_auth(options_.api_key);

  auto res = client.Post(path_prefix_ + "/chat/completions", body.dump(), "application/json");
  if (!res) {
    const auto err = res.error();
    const auto code = (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout) ? Errc::timeout
                                                                                                : Errc::transport;
    throw Error(code, fmt::format("POST {}/chat/completions: {}", options_.base_url, httplib::to_string(err)));
  }
  const int status = res->status;
  if (status == 401 || status == 403)
    throw Error(Errc::auth, fmt::format("authentication rejected (HTTP {}); check {}", status, kApiKeyEnv));
  if (status == 429) throw Error(Errc::rate_limited, "rate limited (HTTP 429)");
  if (status >= 500) throw Error(Errc::transport, fmt::format("server error (HTTP {})", status));
  if (status != 200) throw Error(Errc::http_status, fmt::format("HTTP {}: {}", status, res->body));

  try {
    const auto j = nlohmann::json::parse(res->body);
    const auto& choice = j.at("choices").at(0);
    ChatResponse out;
    const auto& content = choice.at("message").at("content");
    out.content = content.is_null() ? "" : content.get<std::string>();
    const auto reason = choice.value("finish_reason", std::string("stop"));
    out.finish_reason = reason == "length" ? FinishReason::length
                        : (reason == "stop" || reason.empty()) ? FinishReason::stop
                                                               : FinishReason::error;
    if (auto u = j.find("usage"); u != j.end() && u->is_object()) {
      out.usage.prompt_tokens = u->value("prompt_tokens", std::uint64_t{0});
      out.usage.completion_tokens = u->value("completion_tokens", std::uint64_t{0});
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::http_status, fmt::format("unexpected response body: {}", e.what()));
  }
}

}  // namespace autoverifix
