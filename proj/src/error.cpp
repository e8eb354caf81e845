// SPDX-License-Identifier: Apache-2.0
#include "autoverifix/error.hpp"

namespace autoverifix {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::overflow: return "overflow";
    case Errc::malformed: return "malformed";
    case Errc::port_mismatch: return "port_mismatch";
    case Errc::short_trace: return "short_trace";
    case Errc::empty_trace: return "empty_trace";
    case Errc::invalid_problem: return "invalid_problem";
    case Errc::missing_field: return "missing_field";
    case Errc::precondition: return "precondition";
    case Errc::no_code_block: return "no_code_block";
    case Errc::truncated: return "truncated";
    case Errc::auth: return "auth";
    case Errc::rate_limited: return "rate_limited";
    case Errc::http_status: return "http_status";
    case Errc::transport: return "transport";
    case Errc::timeout: return "timeout";
    case Errc::replay_miss: return "replay_miss";
    case Errc::config: return "config";
    case Errc::io: return "io";
    case Errc::harness_fault: return "harness_fault";
    case Errc::toolchain_missing: return "toolchain_missing";
    case Errc::toolchain_crash: return "toolchain_crash";
    case Errc::sim_timeout: return "sim_timeout";
    case Errc::sim_crash: return "sim_crash";
  }
  return "unknown";
}

}  // namespace autoverifix
