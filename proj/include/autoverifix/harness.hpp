// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "autoverifix/model.hpp"

namespace autoverifix {

// Client side of the reference-model harness: a separate executable that
// reads one job object on stdin and writes one result object on stdout.

enum class HarnessStatus { ok, syntax_error, runtime_error, timeout, contract_violation };

const char* to_string(HarnessStatus s) noexcept;

struct HarnessJob {
  std::string model_source;
  Stimulus test_vectors;
  /// Data inputs and outputs; clock and reset are driven by the testbench.
  std::map<std::string, unsigned> port_widths;
  DesignKind kind = DesignKind::combinational;
  double time_limit_s = 10.0;
};

HarnessJob make_harness_job(const ProblemSpec& spec, std::string model_source, Stimulus vectors,
                            double time_limit_s);

/// Wire form with keys model_source, test_vectors, port_widths, kind,
/// time_limit_s.
nlohmann::json to_json(const HarnessJob& job);
std::string job_digest(const HarnessJob& job);

struct HarnessResult {
  HarnessStatus status = HarnessStatus::ok;
  std::string error_text;
  SimTrace trace;
  std::optional<CoverageReport> coverage;
};

/// Parses and checks a result against its job: status=ok requires one trace
/// record per vector, inputs equal to the job's vectors, and a coverage
/// report. Throws Errc::harness_fault otherwise.
HarnessResult harness_result_from_json(const nlohmann::json& j, const ProblemSpec& spec, const HarnessJob& job);
nlohmann::json to_json(const HarnessResult& result);

class ModelHarness {
 public:
  virtual ~ModelHarness() = default;
  virtual HarnessResult execute(const ProblemSpec& spec, const HarnessJob& job) = 0;
};

/// Runs the harness command once per job. A wall-clock overrun of
/// time_limit_s plus `grace` is reported as status=timeout.
class SubprocessHarness final : public ModelHarness {
 public:
  explicit SubprocessHarness(std::vector<std::string> command,
                             std::chrono::milliseconds grace = std::chrono::milliseconds{2000});

  HarnessResult execute(const ProblemSpec& spec, const HarnessJob& job) override;

 private:
  std::vector<std::string> command_;
  std::chrono::milliseconds grace_;
};

/// Serves recorded results keyed by job digest. File format: one
/// {"digest", "result"} object per line.
class ReplayHarness final : public ModelHarness {
 public:
  explicit ReplayHarness(const std::filesystem::path& transcript);

  HarnessResult execute(const ProblemSpec& spec, const HarnessJob& job) override;

 private:
  std::map<std::string, nlohmann::json> entries_;
};

class RecordingHarness final : public ModelHarness {
 public:
  RecordingHarness(std::shared_ptr<ModelHarness> inner, std::filesystem::path transcript);

  HarnessResult execute(const ProblemSpec& spec, const HarnessJob& job) override;

 private:
  std::shared_ptr<ModelHarness> inner_;
  std::filesystem::path transcript_;
  std::mutex mu_;
};

/// Test double driven by a callback; keeps every job it receives.
class ScriptedHarness final : public ModelHarness {
 public:
  using Handler = std::function<HarnessResult(const ProblemSpec&, const HarnessJob&)>;
  explicit ScriptedHarness(Handler handler) : handler_(std::move(handler)) {}

  HarnessResult execute(const ProblemSpec& spec, const HarnessJob& job) override;
  std::vector<HarnessJob> jobs() const;

 private:
  Handler handler_;
  mutable std::mutex mu_;
  std::vector<HarnessJob> jobs_;
};

}  // namespace autoverifix
