// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "autoverifix/digest.hpp"
#include "autoverifix/error.hpp"
#include "autoverifix/llm.hpp"
#include "autoverifix/model.hpp"

namespace autoverifix::detail {

/// One gateway round trip as seen by a controller. `content` is empty when
/// the response was truncated.
struct Exchange {
  std::optional<std::string> content;
  std::string failure;
  std::size_t event_index = 0;
};

/// Sends `request`, logging retries and the exchange itself. Truncation is
/// returned as a failed exchange; every other gateway error propagates with
/// the stage name prepended.
inline Exchange exchange(const Gateway& gateway, const ChatRequest& request, const std::string& stage,
                         std::vector<IterationEvent>& log) {
  const auto prompt_digest = request_digest(request);
  Exchange ex;
  try {
    auto response = gateway.complete(request);
    for (const auto& why : response.retry_errors)
      log.push_back(IterationEvent{stage, "transport_retry", prompt_digest, "", why});
    ex.content = std::move(response.content);
    log.push_back(IterationEvent{stage, request.purpose, prompt_digest, sha256_hex(*ex.content), ""});
  } catch (const Error& e) {
    if (e.code() != Errc::truncated) throw Error(e.code(), stage + ": " + e.what());
    ex.failure = e.what();
    log.push_back(IterationEvent{stage, request.purpose, prompt_digest, "", "truncated"});
  }
  ex.event_index = log.size() - 1;
  return ex;
}

inline std::string first_line(std::string_view text, std::size_t max_chars = 160) {
  auto line = text.substr(0, text.find('\n'));
  if (line.size() > max_chars) return std::string(line.substr(0, max_chars)) + "...";
  return std::string(line);
}

}  // namespace autoverifix::detail
