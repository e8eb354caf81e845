// SPDX-License-Identifier: Apache-2.0
#include "autoverifix/harness.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "autoverifix/digest.hpp"
#include "autoverifix/error.hpp"
#include "autoverifix/json_io.hpp"
#include "autoverifix/process.hpp"

namespace autoverifix {

const char* to_string(HarnessStatus s) noexcept {
  switch (s) {
    case HarnessStatus::ok: return "ok";
    case HarnessStatus::syntax_error: return "syntax_error";
    case HarnessStatus::runtime_error: return "runtime_error";
    case HarnessStatus::timeout: return "timeout";
    case HarnessStatus::contract_violation: return "contract_violation";
  }
  return "runtime_error";
}

namespace {

HarnessStatus parse_status(const std::string& s) {
  for (auto v : {HarnessStatus::ok, HarnessStatus::syntax_error, HarnessStatus::runtime_error, HarnessStatus::timeout,
                 HarnessStatus::contract_violation})
    if (s == to_string(v)) return v;
  throw Error(Errc::harness_fault, fmt::format("unknown harness status '{}'", s));
}

}  // namespace

HarnessJob make_harness_job(const ProblemSpec& spec, std::string model_source, Stimulus vectors,
                            double time_limit_s) {
  HarnessJob job;
  job.model_source = std::move(model_source);
  job.test_vectors = std::move(vectors);
  job.kind = spec.kind;
  job.time_limit_s = time_limit_s;
  for (const auto& p : spec.data_inputs()) job.port_widths.emplace(p.name, p.width);
  for (const auto& p : spec.outputs()) job.port_widths.emplace(p.name, p.width);
  return job;
}

nlohmann::json to_json(const HarnessJob& job) {
  return {{"model_source", job.model_source},
          {"test_vectors", to_json(job.test_vectors)},
          {"port_widths", job.port_widths},
          {"kind", to_string(job.kind)},
          {"time_limit_s", job.time_limit_s}};
}

std::string job_digest(const HarnessJob& job) { return sha256_hex(to_json(job).dump()); }

HarnessResult harness_result_from_json(const nlohmann::json& j, const ProblemSpec& spec, const HarnessJob& job) {
  HarnessResult r;
  try {
    if (!j.is_object()) throw Error(Errc::harness_fault, "harness result is not a JSON object");
    r.status = parse_status(j.at("status").get<std::string>());
    if (auto it = j.find("error_text"); it != j.end() && it->is_string()) r.error_text = it->get<std::string>();
    const auto trace_it = j.find("trace");
    const auto cov_it = j.find("coverage");
    if (r.status == HarnessStatus::ok) {
      if (trace_it == j.end() || cov_it == j.end() || cov_it->is_null())
        throw Error(Errc::harness_fault, "status ok without trace and coverage");
      r.trace = trace_from_json(*trace_it, spec);
      r.coverage = coverage_from_json(*cov_it);
      if (r.trace.cycles.size() != job.test_vectors.size())
        throw Error(Errc::harness_fault, fmt::format("trace has {} records for {} input vectors",
                                                     r.trace.cycles.size(), job.test_vectors.size()));
      for (std::size_t i = 0; i < job.test_vectors.size(); ++i)
        if (r.trace.cycles[i].inputs != job.test_vectors[i])
          throw Error(Errc::harness_fault, fmt::format("trace cycle {} inputs differ from the job's vector", i));
    } else {
      // Partial traces from failed runs are informational; keep them only if
      // they parse cleanly.
      if (trace_it != j.end()) {
        try {
          r.trace = trace_from_json(*trace_it, spec);
        } catch (const Error&) {
          r.trace = {};
        }
      }
      if (cov_it != j.end() && cov_it->is_object()) {
        try {
          r.coverage = coverage_from_json(*cov_it);
        } catch (const Error&) {
          r.coverage.reset();
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::harness_fault, fmt::format("malformed harness result: {}", e.what()));
  } catch (const Error& e) {
    if (e.code() == Errc::harness_fault) throw;
    throw Error(Errc::harness_fault, fmt::format("malformed harness result: {}", e.what()));
  }
  return r;
}

nlohmann::json to_json(const HarnessResult& r) {
  nlohmann::json j{{"status", to_string(r.status)}, {"error_text", r.error_text}, {"trace", to_json(r.trace)}};
  j["coverage"] = r.coverage ? to_json(*r.coverage) : nlohmann::json(nullptr);
  return j;
}

SubprocessHarness::SubprocessHarness(std::vector<std::string> command, std::chrono::milliseconds grace)
    : command_(std::move(command)), grace_(grace) {
  if (command_.empty()) throw Error(Errc::config, "harness command is empty");
}

HarnessResult SubprocessHarness::execute(const ProblemSpec& spec, const HarnessJob& job) {
  ProcessOptions opts;
  opts.stdin_data = to_json(job).dump();
  opts.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(std::ceil(job.time_limit_s * 1000.0))) + grace_;
  const auto res = run_process(command_, opts);
  if (res.timed_out) {
    HarnessResult r;
    r.status = HarnessStatus::timeout;
    r.error_text = fmt::format("model exceeded the wall-clock limit of {} s", job.time_limit_s);
    return r;
  }
  if (!res.ok())
    throw Error(Errc::harness_fault,
                fmt::format("harness exited with status {}{}: {}", res.exit_code,
                            res.signal ? fmt::format(" (signal {})", *res.signal) : std::string(), res.err));
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(res.out);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::harness_fault, fmt::format("harness stdout is not JSON: {}", e.what()));
  }
  return harness_result_from_json(j, spec, job);
}

ReplayHarness::ReplayHarness(const std::filesystem::path& transcript) {
  std::istringstream in(read_file(transcript));
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      entries_.insert_or_assign(j.at("digest").get<std::string>(), j.at("result"));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::malformed, fmt::format("{}:{}: {}", transcript.string(), lineno, e.what()));
    }
  }
}

HarnessResult ReplayHarness::execute(const ProblemSpec& spec, const HarnessJob& job) {
  const auto digest = job_digest(job);
  auto it = entries_.find(digest);
  if (it == entries_.end())
    throw Error(Errc::replay_miss, fmt::format("no harness transcript entry for job digest {}", digest));
  return harness_result_from_json(it->second, spec, job);
}

RecordingHarness::RecordingHarness(std::shared_ptr<ModelHarness> inner, std::filesystem::path transcript)
    : inner_(std::move(inner)), transcript_(std::move(transcript)) {
  if (!inner_) throw Error(Errc::config, "recording harness needs an inner harness");
  if (transcript_.has_parent_path()) std::filesystem::create_directories(transcript_.parent_path());
}

HarnessResult RecordingHarness::execute(const ProblemSpec& spec, const HarnessJob& job) {
  auto result = inner_->execute(spec, job);
  const nlohmann::json entry{{"digest", job_digest(job)}, {"result", to_json(result)}};
  std::lock_guard lock(mu_);
  std::ofstream out(transcript_, std::ios::app | std::ios::binary);
  if (!out) throw Error(Errc::io, fmt::format("cannot append to {}", transcript_.string()));
  out << entry.dump() << '\n';
  return result;
}

HarnessResult ScriptedHarness::execute(const ProblemSpec& spec, const HarnessJob& job) {
  {
    std::lock_guard lock(mu_);
    jobs_.push_back(job);
  }
  return handler_(spec, job);
}

std::vector<HarnessJob> ScriptedHarness::jobs() const {
  std::lock_guard lock(mu_);
  return jobs_;
}

}  // namespace autoverifix
