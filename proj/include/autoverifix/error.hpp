// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace autoverifix {

enum class Errc {
  invalid_argument,
  overflow,
  malformed,
  port_mismatch,
  short_trace,
  empty_trace,
  invalid_problem,
  missing_field,
  precondition,
  no_code_block,
  truncated,
  auth,
  rate_limited,
  http_status,
  transport,
  timeout,
  replay_miss,
  config,
  io,
  harness_fault,
  toolchain_missing,
  toolchain_crash,
  sim_timeout,
  sim_crash,
};

const char* to_string(Errc code) noexcept;

/// Every failure surfaced by the library carries one of the codes above so
/// callers can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace autoverifix
