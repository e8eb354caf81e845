// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <fstream>
#include <regex>

#include "autoverifix/config.hpp"
#include "autoverifix/json_io.hpp"
#include "autoverifix/process.hpp"
#include "scenarios.hpp"

using namespace autoverifix;
using avxtest::TempDir;
using nlohmann::json;

namespace {

std::string config_error(const json& j) {
  try {
    config_from_json(j);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::config);
    return e.what();
  }
  ADD_FAILURE() << "accepted " << j.dump();
  return {};
}

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

ProcessResult cli(const std::vector<std::string>& args, const std::filesystem::path& cwd) {
  std::vector<std::string> argv{"env", "-u", kApiKeyEnv, AVX_CLI_PATH};
  argv.insert(argv.end(), args.begin(), args.end());
  ProcessOptions opt;
  opt.cwd = cwd;
  opt.timeout = std::chrono::seconds(120);
  return run_process(argv, opt);
}

std::filesystem::path write_problems(const std::filesystem::path& dir, const std::vector<ProblemSpec>& specs) {
  std::string text;
  for (const auto& s : specs) text += to_json(s).dump() + "\n";
  const auto p = dir / "problems.jsonl";
  write(p, text);
  return p;
}

}  // namespace

TEST(Config, DefaultsAndOverrides) {
  const auto c = config_from_json(json::object());
  EXPECT_EQ(c.stage1.mode, BackendMode::live);
  EXPECT_TRUE(c.coverage_feedback);
  EXPECT_EQ(c.budget.coverage_threshold, 0.85);

  const auto o = config_from_json(
      {{"stage2", {{"mode", "replay"}, {"transcript", "t/s2.jsonl"}, {"seed", 5}, {"temperature", 0.2}}},
       {"budget", {{"max_function_iters", 7}}},
       {"coverage_feedback", false},
       {"toolchain", {{"timeout_s", 2.5}}},
       {"parallelism", 2}},
      "/base");
  EXPECT_EQ(o.stage2.mode, BackendMode::replay);
  EXPECT_EQ(o.stage2.transcript, std::filesystem::path("/base/t/s2.jsonl"));
  EXPECT_EQ(o.stage2.seed, 5);
  EXPECT_EQ(o.budget.max_function_iters, 7u);
  EXPECT_EQ(o.budget.sim_timeout, std::chrono::milliseconds(2500));
  EXPECT_FALSE(o.coverage_feedback);
  EXPECT_EQ(config_from_json(to_json(o)).stage2.transcript, o.stage2.transcript);
}

TEST(Config, RejectsUnknownKeysByPath) {
  EXPECT_NE(config_error({{"stage3", {}}}).find("stage3"), std::string::npos);
  EXPECT_NE(config_error({{"budget", {{"max_iters", 1}}}}).find("budget.max_iters"), std::string::npos);
  EXPECT_NE(config_error({{"stage1", {{"api_key", "sk-x"}}}}).find("stage1.api_key"), std::string::npos);
  EXPECT_NE(config_error({{"stage1", {{"mode", "replay"}}}}).find("stage1.transcript"), std::string::npos);
  EXPECT_NE(config_error({{"stage1", {{"mode", "dry"}}}}).find("'dry'"), std::string::npos);
  EXPECT_NE(config_error({{"toolchain", {{"preset", "vcs"}}}}).find("toolchain.preset"), std::string::npos);
  EXPECT_NE(config_error({{"budget", {{"max_coverage_iters", "3"}}}}).find("wrong type"), std::string::npos);
  EXPECT_NE(config_error({{"parallelism", 0}}).find("parallelism"), std::string::npos);
  EXPECT_NE(config_error({{"budget", {{"coverage_threshold", 1.5}}}}).find("budget"), std::string::npos);
}

TEST(Config, LoadReportsFileAndSyntax) {
  TempDir dir;
  write(dir.path() / "bad.json", "{\"stage1\": ");
  try {
    load_config(dir.path() / "bad.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::config);
    EXPECT_NE(std::string(e.what()).find("bad.json"), std::string::npos);
  }
  write(dir.path() / "ok.json", R"({"harness": {"mode": "record", "transcript": "h.jsonl"}})");
  EXPECT_EQ(load_config(dir.path() / "ok.json").harness.transcript, dir.path() / "h.jsonl");
}

TEST(Config, DigestIgnoresModesTranscriptsAndRetry) {
  AppConfig a;
  AppConfig b = a;
  b.stage1.mode = BackendMode::replay;
  b.stage1.transcript = "/x/stage1.jsonl";
  b.harness.mode = BackendMode::record;
  b.harness.transcript = "/x/h.jsonl";
  b.retry.max_retries = 9;
  b.parallelism = 1;
  EXPECT_EQ(config_digest(a), config_digest(b));
  EXPECT_EQ(config_digest(a).size(), 64u);

  AppConfig c = a;
  c.stage2.temperature = 0.1;
  EXPECT_NE(config_digest(a), config_digest(c));
  AppConfig d = a;
  d.coverage_feedback = false;
  EXPECT_NE(config_digest(a), config_digest(d));
}

TEST(Config, DigestFollowsTemplateText) {
  TempDir dir;
  for (const auto& e : std::filesystem::directory_iterator(PromptLibrary::default_dir()))
    std::filesystem::copy_file(e.path(), dir.path() / e.path().filename());
  AppConfig a;
  AppConfig b;
  b.template_dir = dir.path();
  EXPECT_EQ(config_digest(a), config_digest(b));
  write(dir.path() / "function_fix.user.txt", "changed {{verilog_source}}");
  EXPECT_NE(config_digest(a), config_digest(b));
}

TEST(Config, SettingsCarryStageParams) {
  AppConfig c;
  c.stage1.model = "m1";
  c.stage2.seed = 11;
  const auto s = pipeline_settings(c, "/scratch");
  EXPECT_EQ(s.stage1_params.model, "m1");
  EXPECT_EQ(s.stage2_params.seed, 11);
  EXPECT_EQ(s.scratch_dir, std::filesystem::path("/scratch"));
}

TEST(Cli, UsageErrorsExitTwo) {
  TempDir dir;
  const auto problems = write_problems(dir.path(), {avxtest::adder4().spec});
  auto r = cli({"bench", problems.string(), "--samples", "0"}, dir.path());
  EXPECT_EQ(r.exit_code, 2) << r.err;
  r = cli({"frobnicate"}, dir.path());
  EXPECT_EQ(r.exit_code, 2);
  r = cli({"run", (dir.path() / "absent.jsonl").string()}, dir.path());
  EXPECT_EQ(r.exit_code, 2);
  r = cli({"--help"}, dir.path());
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("bench"), std::string::npos);
}

TEST(Cli, MissingApiKeyNamesVariable) {
  TempDir dir;
  const auto problems = write_problems(dir.path(), {avxtest::adder4().spec});
  const auto r = cli({"run", problems.string()}, dir.path());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find(kApiKeyEnv), std::string::npos) << r.err;
}

TEST(Cli, InvalidProblemCitesField) {
  TempDir dir;
  auto j = to_json(avxtest::adder4().spec);
  j.erase("module_name");
  write(dir.path() / "p.jsonl", j.dump() + "\n");
  const auto r = cli({"run", (dir.path() / "p.jsonl").string()}, dir.path());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("module_name"), std::string::npos) << r.err;
}

TEST(Cli, SeveralProblemsNeedSelection) {
  TempDir dir;
  const auto problems = write_problems(dir.path(), {avxtest::adder4().spec, avxtest::fsm2().spec});
  const auto r = cli({"run", problems.string()}, dir.path());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("--problem"), std::string::npos) << r.err;
}

TEST(Cli, ReplayIsReproducibleAndMissNamesDigest) {
  if (!avxtest::verilator_available()) GTEST_SKIP() << "verilator not installed";
  TempDir dir;
  const auto d = avxtest::fsm2();
  CommandToolchain tc(ToolchainConfig::verilator());
  const auto recorded = avxtest::record_transcript(d, dir.path() / "tx", tc);
  ASSERT_EQ(recorded.status, PipelineStatus::pass);
  const auto problems = write_problems(dir.path(), {d.spec});

  auto a = cli({"replay", problems.string(), "--transcript", "tx", "--out", "a"}, dir.path());
  auto b = cli({"replay", problems.string(), "--transcript", "tx", "--out", "b"}, dir.path());
  ASSERT_EQ(a.exit_code, 0) << a.err;
  ASSERT_EQ(b.exit_code, 0) << b.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("digest=" + outcome_digest(recorded)), std::string::npos) << a.out;
  EXPECT_EQ(read_file(dir.path() / "a" / d.spec.id / "outcome.json"),
            read_file(dir.path() / "b" / d.spec.id / "outcome.json"));
  for (const char* f : {"reference_model.py", "test_vectors.json", "testbench.v", "design.v", "iteration_log.jsonl",
                        "digest.txt"})
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "a" / d.spec.id / f)) << f;

  auto again = cli({"replay", problems.string(), "--transcript", "tx", "--out", "a"}, dir.path());
  EXPECT_EQ(again.exit_code, 2);
  EXPECT_NE(again.err.find("--force"), std::string::npos);

  write(dir.path() / "tx" / "stage2.jsonl", "");
  auto miss = cli({"replay", problems.string(), "--transcript", "tx", "--out", "c"}, dir.path());
  EXPECT_EQ(miss.exit_code, 1);
  EXPECT_NE(miss.err.find("no transcript entry"), std::string::npos) << miss.err;
  EXPECT_TRUE(std::regex_search(miss.err, std::regex("[0-9a-f]{64}"))) << miss.err;
}

TEST(Samples, ShippedConfigMatchesDefaults) {
  const auto c = load_config(std::filesystem::path(AVX_SHARE_DIR) / "config.example.json");
  EXPECT_EQ(config_digest(c), config_digest(AppConfig{}));
}

TEST(Samples, ShippedProblemsLoad) {
  const auto problems = load_problems(std::filesystem::path(AVX_SHARE_DIR) / "problems.jsonl");
  EXPECT_EQ(problems.size(), 10u);
  for (const auto& p : problems) EXPECT_TRUE(p.golden_testbench.has_value()) << p.id;
}
