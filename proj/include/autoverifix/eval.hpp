// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "autoverifix/model.hpp"
#include "autoverifix/pipeline.hpp"
#include "autoverifix/toolchain.hpp"

namespace autoverifix {

/// Unbiased pass@k estimator, 1 - C(n-c, k) / C(n, k), in product form.
/// Requires c <= n and 1 <= k <= n (Errc::invalid_argument).
double pass_at_k(std::uint64_t n, std::uint64_t c, std::uint64_t k);

struct SampleRow {
  unsigned index = 0;
  /// Absent when the sample crashed.
  std::optional<PipelineStatus> status;
  bool tb_pass = false;
  bool golden_correct = false;
  std::string digest;
  std::string note;
};

struct ProblemResult {
  std::string problem_id;
  std::uint64_t n = 0;
  /// Golden-correct samples.
  std::uint64_t c = 0;
  /// Samples that passed the stage-1 testbench.
  std::uint64_t c_tb = 0;
  std::uint64_t c_tb_and_correct = 0;
  std::vector<SampleRow> samples;

  Stage1Status stage1_status = Stage1Status::fail_reference;
  double stage1_coverage = 0.0;
  /// Golden testbench against the rendered reference trace.
  std::optional<bool> stage1_functional;

  /// Excluded from aggregates (no or broken golden testbench).
  bool excluded = false;
  std::string note;
};

/// 1 - sum(c_tb_and_correct) / sum(c_tb) over non-excluded rows; nullopt when
/// no sample passed a stage-1 testbench.
std::optional<double> fpr(const std::vector<ProblemResult>& results);

struct Judgement {
  bool golden_correct = false;
  bool tb_pass = false;
  /// Golden testbench itself failed to compile.
  bool invalid_golden = false;
  std::string note;
};

struct JudgeOptions {
  std::filesystem::path scratch_dir = std::filesystem::temp_directory_path();
  std::chrono::milliseconds sim_timeout{10'000};
};

/// Syntax and reference failures short-circuit to {false, false}.
/// Otherwise requires spec.golden_testbench (Errc::precondition).
Judgement judge_sample(const PipelineOutcome& outcome, const ProblemSpec& spec, HdlToolchain& toolchain,
                       const JudgeOptions& options = {});

/// Whether `design` passes the golden testbench. A golden testbench that does
/// not compile is reported through `invalid_golden`.
Judgement run_golden(const ProblemSpec& spec, const std::string& design, HdlToolchain& toolchain,
                     const JudgeOptions& options);

/// Verilog module with the spec's interface that plays back `trace`:
/// combinational designs as an input-keyed table, sequential designs as a
/// table indexed by clock cycles since reset.
std::string render_trace_model(const ProblemSpec& spec, const SimTrace& trace);

/// Name of the first module declared in `source`.
std::optional<std::string> first_module_name(std::string_view source);

/// Append-only JSONL store of completed cells. A torn final line is ignored
/// on load.
class Journal {
 public:
  explicit Journal(std::filesystem::path path);

  std::vector<nlohmann::json> load() const;
  void append(const nlohmann::json& record);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::mutex mu_;
};

struct BenchmarkOptions {
  unsigned samples = 10;
  unsigned jobs = 1;
  std::filesystem::path out_dir;
  /// Keys the journal; cells recorded under another digest are ignored.
  std::string config_digest;
  nlohmann::json config_snapshot = nlohmann::json::object();
  /// Judge the stage-1 reference against the golden testbench too.
  bool stage1_functional = true;
};

struct BenchmarkReport {
  unsigned samples = 0;
  std::vector<ProblemResult> problems;
  std::map<unsigned, std::optional<double>> pass_at;
  std::optional<double> fpr;
  std::optional<double> stage1_syntax_rate;
  std::optional<double> stage1_functional_rate;
  std::optional<double> stage1_mean_coverage;
  std::string config_digest;
  nlohmann::json config_snapshot;
};

inline constexpr std::array<unsigned, 3> kReportedK{1, 5, 10};

/// Pure aggregation over journal records; the sweep and `report` both go
/// through here.
BenchmarkReport build_report(const std::vector<ProblemSpec>& problems, const std::vector<nlohmann::json>& journal,
                             const BenchmarkOptions& options);

nlohmann::json to_json(const BenchmarkReport& report);
std::string to_csv(const BenchmarkReport& report);
std::string to_table(const BenchmarkReport& report);

/// Writes report.json, report.csv and report.txt into `dir`.
void write_report(const BenchmarkReport& report, const std::filesystem::path& dir);

/// Stage 1 once per problem, stage 2 `samples` times, judged against golden
/// testbenches. Completed cells found in out_dir/journal.jsonl are reused.
/// Sample-level failures are recorded, not thrown; configuration failures
/// (toolchain_missing, config, auth) abort.
BenchmarkReport run_benchmark(const std::vector<ProblemSpec>& problems, const PipelineServices& services,
                              const PipelineSettings& settings, const BenchmarkOptions& options);

}  // namespace autoverifix
