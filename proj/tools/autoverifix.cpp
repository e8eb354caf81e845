// SPDX-License-Identifier: Apache-2.0
// autoverifix command-line front end.
#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <iostream>
#include <thread>

#include "autoverifix/config.hpp"
#include "autoverifix/error.hpp"
#include "autoverifix/eval.hpp"
#include "autoverifix/json_io.hpp"
#include "autoverifix/pipeline.hpp"

namespace avx = autoverifix;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRunFailure = 1;
constexpr int kExitUsage = 2;

struct Options {
  fs::path problems;
  fs::path config;
  fs::path out = "autoverifix-out";
  fs::path transcript;
  std::string problem_id;
  unsigned samples = 10;
  unsigned jobs = std::clamp(std::thread::hardware_concurrency(), 1u, 8u);
  bool force = false;
  bool no_coverage_feedback = false;
  std::string stage1_backend;
  std::string stage2_backend;
};

/// Errors that mean the invocation itself is wrong.
bool is_usage_error(avx::Errc code) {
  using avx::Errc;
  return code == Errc::config || code == Errc::invalid_problem || code == Errc::malformed ||
         code == Errc::missing_field || code == Errc::io || code == Errc::toolchain_missing ||
         code == Errc::invalid_argument || code == Errc::overflow;
}

avx::AppConfig resolve_config(const Options& o, std::optional<avx::BackendMode> transcript_mode) {
  auto cfg = o.config.empty() ? avx::AppConfig{} : avx::load_config(o.config);
  if (!o.stage1_backend.empty()) cfg.stage1.mode = avx::parse_backend_mode(o.stage1_backend);
  if (!o.stage2_backend.empty()) cfg.stage2.mode = avx::parse_backend_mode(o.stage2_backend);
  if (o.no_coverage_feedback) cfg.coverage_feedback = false;
  if (transcript_mode) {
    if (o.transcript.empty()) throw avx::Error(avx::Errc::config, "--transcript is required");
    cfg.stage1.mode = cfg.stage2.mode = cfg.harness.mode = *transcript_mode;
    cfg.stage1.transcript = o.transcript / "stage1.jsonl";
    cfg.stage2.transcript = o.transcript / "stage2.jsonl";
    cfg.harness.transcript = o.transcript / "harness.jsonl";
    if (*transcript_mode == avx::BackendMode::record) {
      fs::create_directories(o.transcript);
      for (const auto* p : {&cfg.stage1.transcript, &cfg.stage2.transcript, &cfg.harness.transcript})
        if (fs::exists(*p)) {
          if (!o.force)
            throw avx::Error(avx::Errc::config,
                             fmt::format("{} already exists (use --force to overwrite)", p->string()));
          fs::remove(*p);
        }
    }
  }
  for (const auto* b : {&cfg.stage1, &cfg.stage2})
    if (b->mode != avx::BackendMode::live && b->transcript.empty())
      throw avx::Error(avx::Errc::config, "replay and record backends need a transcript path");
  return cfg;
}

const avx::ProblemSpec& select_problem(const std::vector<avx::ProblemSpec>& problems, const std::string& id) {
  if (!id.empty()) {
    for (const auto& p : problems)
      if (p.id == id) return p;
    throw avx::Error(avx::Errc::config, fmt::format("no problem with id '{}'", id));
  }
  if (problems.size() != 1)
    throw avx::Error(avx::Errc::config,
                     fmt::format("problem file holds {} problems; pick one with --problem", problems.size()));
  return problems.front();
}

void write_run_artifacts(const fs::path& dir, const avx::PipelineOutcome& outcome, const std::string& digest) {
  fs::create_directories(dir);
  avx::write_file_atomic(dir / "reference_model.py", outcome.reference_source);
  avx::write_file_atomic(dir / "test_vectors.json", avx::to_json(outcome.test_vectors).dump(2) + "\n");
  avx::write_file_atomic(dir / "testbench.v", outcome.testbench_source);
  avx::write_file_atomic(dir / "design.v", outcome.verilog_source);
  std::string log;
  for (const auto& e : outcome.iteration_log) log += avx::to_json(e).dump() + "\n";
  avx::write_file_atomic(dir / "iteration_log.jsonl", log);
  auto j = avx::to_json(outcome);
  avx::write_file_atomic(dir / "outcome.json", j.dump(2) + "\n");
  avx::write_file_atomic(dir / "digest.txt", digest + "\n");
}

int cmd_run(const Options& o, std::optional<avx::BackendMode> transcript_mode) {
  auto problems = avx::load_problems(o.problems);
  const auto& spec = select_problem(problems, o.problem_id);
  const auto cfg = resolve_config(o, transcript_mode);
  const auto dir = o.out / spec.id;
  if (fs::exists(dir) && !fs::is_empty(dir) && !o.force)
    throw avx::Error(avx::Errc::config, fmt::format("{} is not empty (use --force to overwrite)", dir.string()));

  avx::Runtime runtime(cfg);
  auto outcome = avx::run_pipeline(spec, runtime.services(), avx::pipeline_settings(cfg, fs::temp_directory_path()));
  const auto digest = avx::outcome_digest(outcome);
  write_run_artifacts(dir, outcome, digest);
  fmt::print("{} {} digest={}\n", spec.id, avx::to_string(outcome.status), digest);
  return outcome.status == avx::PipelineStatus::pass ? kExitOk : kExitRunFailure;
}

avx::BenchmarkOptions bench_options(const Options& o, const avx::AppConfig& cfg) {
  avx::BenchmarkOptions b;
  b.samples = o.samples;
  b.jobs = o.jobs;
  b.out_dir = o.out;
  b.config_digest = avx::config_digest(cfg);
  b.config_snapshot = avx::to_json(cfg);
  return b;
}

int cmd_bench(const Options& o) {
  auto problems = avx::load_problems(o.problems);
  const auto cfg = resolve_config(o, std::nullopt);
  if (o.force) {
    for (const char* f : {"journal.jsonl", "report.json", "report.csv", "report.txt", "timing.json"})
      fs::remove(o.out / f);
  }
  avx::Runtime runtime(cfg);
  auto report = avx::run_benchmark(problems, runtime.services(), avx::pipeline_settings(cfg, fs::temp_directory_path()),
                                   bench_options(o, cfg));
  fmt::print("{}", avx::to_table(report));
  return kExitOk;
}

int cmd_report(const Options& o) {
  auto problems = avx::load_problems(o.problems);
  const auto cfg = resolve_config(o, std::nullopt);
  avx::Journal journal(o.out / "journal.jsonl");
  if (!fs::exists(journal.path()))
    throw avx::Error(avx::Errc::config, fmt::format("no journal at {}", journal.path().string()));
  auto report = avx::build_report(problems, journal.load(), bench_options(o, cfg));
  avx::write_report(report, o.out);
  fmt::print("{}", avx::to_table(report));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage LLM pipeline for Verilog generation with a Python reference model"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* cmd, bool single) {
    cmd->add_option("problems", o.problems, "Problem JSONL file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_flag("--force", o.force, "Overwrite existing outputs");
    cmd->add_option("--stage1-backend", o.stage1_backend, "live, replay or record");
    cmd->add_option("--stage2-backend", o.stage2_backend, "live, replay or record");
    cmd->add_flag("--no-coverage-feedback", o.no_coverage_feedback, "Skip coverage-driven test refinement");
    if (single) cmd->add_option("--problem", o.problem_id, "Problem id (required when the file has several)");
  };

  auto* run = app.add_subcommand("run", "Run both stages for one problem");
  common(run, true);
  auto* bench = app.add_subcommand("bench", "Benchmark sweep with pass@k and FPR");
  common(bench, false);
  bench->add_option("--samples", o.samples, "Stage-2 samples per problem")->check(CLI::Range(1u, 1000u));
  bench->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::Range(1u, 256u));
  auto* record = app.add_subcommand("record", "Run one problem live and record every exchange");
  common(record, true);
  record->add_option("--transcript", o.transcript, "Transcript directory")->required();
  auto* replay = app.add_subcommand("replay", "Run one problem from a recorded transcript");
  common(replay, true);
  replay->add_option("--transcript", o.transcript, "Transcript directory")->required()->check(CLI::ExistingDirectory);
  auto* report = app.add_subcommand("report", "Rebuild report files from a sweep journal");
  common(report, false);
  report->add_option("--samples", o.samples, "Stage-2 samples per problem")->check(CLI::Range(1u, 1000u));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(o, std::nullopt);
    if (*bench) return cmd_bench(o);
    if (*record) return cmd_run(o, avx::BackendMode::record);
    if (*replay) return cmd_run(o, avx::BackendMode::replay);
    if (*report) return cmd_report(o);
  } catch (const avx::Error& e) {
    fmt::print(stderr, "autoverifix: {}\n", e.what());
    return is_usage_error(e.code()) ? kExitUsage : kExitRunFailure;
  } catch (const std::exception& e) {
    fmt::print(stderr, "autoverifix: {}\n", e.what());
    return kExitRunFailure;
  }
  return kExitUsage;
}
