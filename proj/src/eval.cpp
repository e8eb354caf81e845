// SPDX-License-Identifier: Apache-2.0
#include "autoverifix/eval.hpp"

#include <fmt/format.h>

#include <atomic>
#include <fstream>
#include <regex>
#include <set>
#include <thread>

#include "autoverifix/error.hpp"
#include "autoverifix/json_io.hpp"

namespace autoverifix {

double pass_at_k(std::uint64_t n, std::uint64_t c, std::uint64_t k) {
  if (c > n) throw Error(Errc::invalid_argument, fmt::format("pass@k: c={} exceeds n={}", c, n));
  if (k < 1 || k > n) throw Error(Errc::invalid_argument, fmt::format("pass@k: k={} outside [1, n={}]", k, n));
  if (k == 1) return static_cast<double>(c) / static_cast<double>(n);
  if (n - c < k) return 1.0;
  double miss = 1.0;
  for (std::uint64_t j = 0; j < k; ++j)
    miss *= static_cast<double>(n - c - j) / static_cast<double>(n - j);
  return 1.0 - miss;
}

std::optional<double> fpr(const std::vector<ProblemResult>& results) {
  std::uint64_t tb = 0, both = 0;
  for (const auto& r : results) {
    if (r.excluded) continue;
    tb += r.c_tb;
    both += r.c_tb_and_correct;
  }
  if (tb == 0) return std::nullopt;
  return 1.0 - static_cast<double>(both) / static_cast<double>(tb);
}

std::optional<std::string> first_module_name(std::string_view source) {
  static const std::regex module_re(R"((^|[^A-Za-z0-9_$])module\s+([A-Za-z_][A-Za-z0-9_$]*))");
  // Strip comments so a commented-out module is not picked.
  static const std::regex comments(R"(//[^\n]*|/\*[\s\S]*?\*/)");
  const auto text = std::regex_replace(std::string(source), comments, " ");
  std::smatch m;
  if (!std::regex_search(text, m, module_re)) return std::nullopt;
  return m[2].str();
}

namespace {

std::string binary_literal(const std::vector<BitVec>& parts) {
  unsigned width = 0;
  std::string bits;
  for (const auto& v : parts) {
    width += v.width();
    for (int b = static_cast<int>(v.width()) - 1; b >= 0; --b)
      bits.push_back(v.is_unknown() ? 'x' : ((v.value() >> b) & 1u) ? '1' : '0');
  }
  return fmt::format("{}'b{}", width, bits);
}

std::string range(unsigned width) { return width == 1 ? "" : fmt::format("[{}:0] ", width - 1); }

std::string output_assignments(const ProblemSpec& spec, const SignalMap* outputs) {
  std::string s;
  for (const auto& p : spec.outputs()) {
    const auto v = outputs ? outputs->at(p.name) : BitVec(p.width, 0);
    s += fmt::format("{} = {}; ", p.name, binary_literal({v}));
  }
  return s;
}

}  // namespace

std::string render_trace_model(const ProblemSpec& spec, const SimTrace& trace) {
  std::string v = fmt::format("module {} (\n", spec.module_name);
  for (std::size_t i = 0; i < spec.ports.size(); ++i) {
    const auto& p = spec.ports[i];
    v += fmt::format("  {} {}{}{}{}\n", p.direction == Direction::input ? "input wire" : "output reg",
                     range(p.width), "", p.name, i + 1 < spec.ports.size() ? "," : "");
  }
  v += ");\n";
  const auto inputs = spec.data_inputs();

  if (spec.kind == DesignKind::sequential) {
    const auto* clk = spec.clock();
    const auto* rst = spec.reset();
    v += "  reg [31:0] avx_cycle = 32'd0;\n";
    v += fmt::format("  always @(posedge {}) begin\n", clk ? clk->name : "clk");
    if (rst) v += fmt::format("    if ({}) avx_cycle <= 32'd0;\n    else avx_cycle <= avx_cycle + 32'd1;\n", rst->name);
    else v += "    avx_cycle <= avx_cycle + 32'd1;\n";
    v += "  end\n  always @* begin\n    case (avx_cycle)\n";
    for (std::size_t i = 0; i < trace.cycles.size(); ++i)
      v += fmt::format("      32'd{}: begin {}end\n", i, output_assignments(spec, &trace.cycles[i].outputs));
    v += fmt::format("      default: begin {}end\n    endcase\n  end\n", output_assignments(spec, nullptr));
  } else if (inputs.empty()) {
    v += fmt::format("  always @* begin {}end\n",
                     output_assignments(spec, trace.cycles.empty() ? nullptr : &trace.cycles[0].outputs));
  } else {
    std::string sel;
    for (std::size_t i = 0; i < inputs.size(); ++i) sel += (i ? ", " : "") + inputs[i].name;
    v += fmt::format("  always @* begin\n    case ({{{}}})\n", sel);
    std::set<std::string> seen;
    for (const auto& rec : trace.cycles) {
      std::vector<BitVec> key;
      for (const auto& p : inputs) key.push_back(rec.inputs.at(p.name));
      auto lit = binary_literal(key);
      if (lit.find('x') != std::string::npos || !seen.insert(lit).second) continue;
      v += fmt::format("      {}: begin {}end\n", lit, output_assignments(spec, &rec.outputs));
    }
    v += fmt::format("      default: begin {}end\n    endcase\n  end\n", output_assignments(spec, nullptr));
  }
  v += "endmodule\n";
  return v;
}

Judgement run_golden(const ProblemSpec& spec, const std::string& design, HdlToolchain& toolchain,
                     const JudgeOptions& options) {
  if (!spec.golden_testbench)
    throw Error(Errc::precondition, fmt::format("problem {} has no golden testbench", spec.id));
  const auto& golden = *spec.golden_testbench;
  Judgement j;
  const auto top = first_module_name(golden);
  if (!top) {
    j.invalid_golden = true;
    j.note = "golden testbench declares no module";
    return j;
  }
  ScopedWorkdir work(options.scratch_dir, "avx-golden");
  auto compiled = toolchain.compile({SourceFile{"dut.v", design}, SourceFile{"golden_tb.v", golden}}, *top, work.path());
  if (!compiled.ok()) {
    // Decide whose fault it is with an interface-exact stub.
    ScopedWorkdir stub_work(options.scratch_dir, "avx-golden-stub");
    auto stub = toolchain.compile({SourceFile{"dut.v", render_trace_model(spec, {})}, SourceFile{"golden_tb.v", golden}},
                                  *top, stub_work.path());
    if (!stub.ok()) {
      j.invalid_golden = true;
      j.note = "golden testbench does not compile";
    } else {
      j.note = "design does not compile with the golden testbench";
    }
    return j;
  }
  try {
    auto outcome = parse_sim_output(toolchain.simulate(*compiled.artifact, options.sim_timeout), spec);
    j.golden_correct = outcome.verdict == SimVerdict::pass;
    if (outcome.verdict == SimVerdict::fail)
      j.note = fmt::format("golden testbench reported {} mismatch(es)", outcome.discrepancies.size());
    else if (outcome.verdict == SimVerdict::malformed)
      j.note = "golden simulation output malformed: " + outcome.note;
  } catch (const Error& e) {
    if (e.code() != Errc::sim_timeout && e.code() != Errc::sim_crash) throw;
    j.note = e.code() == Errc::sim_timeout ? "golden simulation timed out" : "golden simulation crashed";
  }
  return j;
}

Judgement judge_sample(const PipelineOutcome& outcome, const ProblemSpec& spec, HdlToolchain& toolchain,
                       const JudgeOptions& options) {
  if (outcome.status == PipelineStatus::fail_syntax || outcome.status == PipelineStatus::fail_reference) return {};
  if (!spec.golden_testbench)
    throw Error(Errc::precondition, fmt::format("problem {} has no golden testbench", spec.id));
  auto j = run_golden(spec, outcome.verilog_source, toolchain, options);
  j.tb_pass = outcome.status == PipelineStatus::pass;
  return j;
}

// ---------------------------------------------------------------- journal

Journal::Journal(std::filesystem::path path) : path_(std::move(path)) {}

std::vector<json> Journal::load() const {
  std::vector<json> out;
  std::ifstream in(path_);
  if (!in) return out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception&) {
      // torn write from an interrupted sweep
    }
  }
  return out;
}

void Journal::append(const json& record) {
  std::lock_guard lock(mu_);
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw Error(Errc::io, fmt::format("cannot append to {}", path_.string()));
  out << record.dump() << '\n';
  out.flush();
  if (!out) throw Error(Errc::io, fmt::format("write to {} failed", path_.string()));
}

// ---------------------------------------------------------------- report

namespace {

constexpr const char* kFunctionalNote =
    "stage-1 functional correctness: golden testbench run against a Verilog playback of the reference trace";

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

struct JournalIndex {
  std::map<std::string, json> refs;
  std::map<std::pair<std::string, unsigned>, json> samples;
};

JournalIndex index_journal(const std::vector<json>& records, const std::string& digest) {
  JournalIndex idx;
  for (const auto& r : records) {
    if (!r.is_object() || r.value("config", "") != digest) continue;
    const auto kind = r.value("kind", "");
    if (kind == "reference") idx.refs[r.value("problem", "")] = r;
    else if (kind == "sample") idx.samples[{r.value("problem", ""), r.value("sample", 0u)}] = r;
  }
  return idx;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + '"';
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt::format("{:.4f}", *v) : "n/a"; }

std::optional<double> problem_pass_at(const ProblemResult& r, unsigned k) {
  if (r.excluded || k > r.n || r.n == 0) return std::nullopt;
  return pass_at_k(r.n, r.c, k);
}

}  // namespace

BenchmarkReport build_report(const std::vector<ProblemSpec>& problems, const std::vector<json>& journal,
                             const BenchmarkOptions& options) {
  const auto idx = index_journal(journal, options.config_digest);
  BenchmarkReport report;
  report.samples = options.samples;
  report.config_digest = options.config_digest;
  report.config_snapshot = options.config_snapshot;

  for (const auto& spec : problems) {
    ProblemResult row;
    row.problem_id = spec.id;
    row.n = options.samples;
    if (auto it = idx.refs.find(spec.id); it != idx.refs.end() && it->second.contains("stage1") &&
                                          !it->second.at("stage1").is_null()) {
      const auto& s1 = it->second.at("stage1");
      row.stage1_status = parse_stage1_status(s1.at("status").get<std::string>());
      if (row.stage1_status != Stage1Status::fail_reference) row.stage1_coverage = s1.at("coverage").at("ratio").get<double>();
      if (const auto& f = it->second.at("functional"); !f.is_null()) row.stage1_functional = f.get<bool>();
      if (it->second.value("invalid_golden", false)) {
        row.excluded = true;
        row.note = "golden testbench does not compile";
      }
    } else {
      row.note = it == idx.refs.end() ? "stage 1 not run" : "stage 1 crashed: " + it->second.value("note", "");
    }
    if (!spec.golden_testbench) {
      row.excluded = true;
      row.note = "no golden testbench";
    }

    for (unsigned i = 0; i < options.samples; ++i) {
      SampleRow s;
      s.index = i;
      if (auto it = idx.samples.find({spec.id, i}); it != idx.samples.end()) {
        const auto& r = it->second;
        if (!r.at("status").is_null()) s.status = parse_pipeline_status(r.at("status").get<std::string>());
        s.tb_pass = r.value("tb_pass", false);
        s.golden_correct = r.value("golden_correct", false);
        s.digest = r.value("digest", "");
        s.note = r.value("note", "");
        if (r.value("invalid_golden", false) && !row.excluded) {
          row.excluded = true;
          row.note = "golden testbench does not compile";
        }
      } else {
        s.note = "not run";
      }
      row.c += s.golden_correct;
      row.c_tb += s.tb_pass;
      row.c_tb_and_correct += s.golden_correct && s.tb_pass;
      row.samples.push_back(std::move(s));
    }
    report.problems.push_back(std::move(row));
  }

  for (unsigned k : kReportedK) {
    double sum = 0;
    std::size_t count = 0;
    for (const auto& r : report.problems)
      if (auto v = problem_pass_at(r, k)) sum += *v, ++count;
    report.pass_at[k] = count && k <= options.samples ? std::optional<double>(sum / count) : std::nullopt;
  }
  report.fpr = fpr(report.problems);

  std::size_t syntax_ok = 0, func_n = 0, func_ok = 0, cov_n = 0;
  double cov_sum = 0;
  for (const auto& r : report.problems) {
    if (r.stage1_status != Stage1Status::fail_reference) {
      ++syntax_ok;
      ++cov_n;
      cov_sum += r.stage1_coverage;
    }
    if (r.stage1_functional && !r.excluded) {
      ++func_n;
      func_ok += *r.stage1_functional;
    }
  }
  if (!report.problems.empty()) report.stage1_syntax_rate = static_cast<double>(syntax_ok) / report.problems.size();
  if (func_n) report.stage1_functional_rate = static_cast<double>(func_ok) / func_n;
  if (cov_n) report.stage1_mean_coverage = cov_sum / cov_n;
  return report;
}

json to_json(const BenchmarkReport& report) {
  json aggregates;
  for (const auto& [k, v] : report.pass_at) aggregates[fmt::format("pass@{}", k)] = opt(v);
  aggregates["fpr"] = opt(report.fpr);
  aggregates["stage1_syntax_rate"] = opt(report.stage1_syntax_rate);
  aggregates["stage1_functional_rate"] = opt(report.stage1_functional_rate);
  aggregates["stage1_mean_coverage"] = opt(report.stage1_mean_coverage);

  json rows = json::array();
  for (const auto& r : report.problems) {
    json samples = json::array();
    for (const auto& s : r.samples)
      samples.push_back({{"index", s.index},
                         {"status", s.status ? json(to_string(*s.status)) : json("error")},
                         {"tb_pass", s.tb_pass},
                         {"golden_correct", s.golden_correct},
                         {"digest", s.digest},
                         {"note", s.note}});
    json pa;
    for (unsigned k : kReportedK) pa[fmt::format("pass@{}", k)] = opt(problem_pass_at(r, k));
    rows.push_back({{"problem_id", r.problem_id},
                    {"n", r.n},
                    {"c", r.c},
                    {"c_tb", r.c_tb},
                    {"c_tb_and_correct", r.c_tb_and_correct},
                    {"pass_at", std::move(pa)},
                    {"stage1_status", to_string(r.stage1_status)},
                    {"stage1_coverage", r.stage1_coverage},
                    {"stage1_functional", r.stage1_functional ? json(*r.stage1_functional) : json(nullptr)},
                    {"excluded", r.excluded},
                    {"note", r.note},
                    {"samples", std::move(samples)}});
  }
  return json{{"samples", report.samples},
              {"config_digest", report.config_digest},
              {"config", report.config_snapshot},
              {"aggregates", std::move(aggregates)},
              {"problems", std::move(rows)},
              {"notes", json::array({kFunctionalNote})}};
}

std::string to_csv(const BenchmarkReport& report) {
  std::string out =
      "problem_id,n,c,c_tb,c_tb_and_correct,pass@1,pass@5,pass@10,stage1_status,stage1_coverage,"
      "stage1_functional,excluded,note\n";
  for (const auto& r : report.problems) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{:.4f},{},{},{}\n", csv_field(r.problem_id), r.n, r.c, r.c_tb,
                       r.c_tb_and_correct, fmt_opt(problem_pass_at(r, 1)), fmt_opt(problem_pass_at(r, 5)),
                       fmt_opt(problem_pass_at(r, 10)), to_string(r.stage1_status), r.stage1_coverage,
                       r.stage1_functional ? (*r.stage1_functional ? "true" : "false") : "n/a",
                       r.excluded ? "true" : "false", csv_field(r.note));
  }
  return out;
}

std::string to_table(const BenchmarkReport& report) {
  std::size_t w = 10;
  for (const auto& r : report.problems) w = std::max(w, r.problem_id.size());
  std::string out = fmt::format("{:<{}}  {:>3} {:>3} {:>4} {:>7} {:>7} {:>7}  {:<26} {:>8}\n", "problem", w, "n",
                                "c", "c_tb", "pass@1", "pass@5", "pass@10", "stage1", "coverage");
  for (const auto& r : report.problems) {
    out += fmt::format("{:<{}}  {:>3} {:>3} {:>4} {:>7} {:>7} {:>7}  {:<26} {:>7.1f}%{}\n", r.problem_id, w, r.n, r.c,
                       r.c_tb, fmt_opt(problem_pass_at(r, 1)), fmt_opt(problem_pass_at(r, 5)),
                       fmt_opt(problem_pass_at(r, 10)), to_string(r.stage1_status), r.stage1_coverage * 100.0,
                       r.note.empty() ? "" : "  (" + r.note + ")");
  }
  out += "\n";
  for (const auto& [k, v] : report.pass_at) out += fmt::format("pass@{:<3} {}\n", k, fmt_opt(v));
  out += fmt::format("FPR       {}\n", fmt_opt(report.fpr));
  out += fmt::format("stage-1 syntactic correctness   {}\n", fmt_opt(report.stage1_syntax_rate));
  out += fmt::format("stage-1 functional correctness  {}\n", fmt_opt(report.stage1_functional_rate));
  out += fmt::format("stage-1 mean line coverage      {}\n", fmt_opt(report.stage1_mean_coverage));
  return out;
}

void write_report(const BenchmarkReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "report.json", to_json(report).dump(2) + "\n");
  write_file_atomic(dir / "report.csv", to_csv(report));
  write_file_atomic(dir / "report.txt", to_table(report));
}

// ---------------------------------------------------------------- sweep

namespace {

bool is_fatal(Errc code) {
  return code == Errc::toolchain_missing || code == Errc::config || code == Errc::auth;
}

/// Runs fn(i) for i in [0, count) on up to `jobs` threads. Stops handing out
/// work after the first exception and rethrows it.
template <typename Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn fn) {
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr first;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      if (stop) return;
      const auto i = next++;
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!first) first = std::current_exception();
        stop = true;
      }
    }
  };
  const unsigned width = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  std::vector<std::thread> threads;
  for (unsigned t = 1; t < width; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace

BenchmarkReport run_benchmark(const std::vector<ProblemSpec>& problems, const PipelineServices& services,
                              const PipelineSettings& settings, const BenchmarkOptions& options) {
  if (options.samples == 0) throw Error(Errc::invalid_argument, "samples must be at least 1");
  std::filesystem::create_directories(options.out_dir);
  Journal journal(options.out_dir / "journal.jsonl");
  auto idx = index_journal(journal.load(), options.config_digest);

  JudgeOptions judge;
  judge.scratch_dir = settings.scratch_dir;
  judge.sim_timeout = settings.budget.sim_timeout;

  std::mutex timing_mu;
  json timing = json::object();
  auto record_time = [&](const std::string& key, std::chrono::steady_clock::time_point t0) {
    std::lock_guard lock(timing_mu);
    timing[key] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  const auto sweep_start = std::chrono::steady_clock::now();

  // Stage 1.
  std::vector<std::optional<ReferenceProduct>> refs(problems.size());
  std::vector<std::string> ref_errors(problems.size());
  std::vector<std::size_t> todo;
  for (std::size_t p = 0; p < problems.size(); ++p) {
    auto it = idx.refs.find(problems[p].id);
    if (it == idx.refs.end()) {
      todo.push_back(p);
    } else if (!it->second.at("stage1").is_null()) {
      ReferenceProduct product;
      product.stage1 = stage1_from_json(it->second.at("stage1"), problems[p]);
      if (product.stage1.status != Stage1Status::fail_reference)
        product.testbench = synthesize_testbench(problems[p], product.stage1.trace, settings.testbench);
      refs[p] = std::move(product);
    } else {
      ref_errors[p] = it->second.value("note", "stage 1 crashed");
    }
  }
  parallel_for(todo.size(), options.jobs, [&](std::size_t t) {
    const auto p = todo[t];
    const auto& spec = problems[p];
    const auto t0 = std::chrono::steady_clock::now();
    json rec{{"kind", "reference"}, {"config", options.config_digest}, {"problem", spec.id},
             {"stage1", nullptr},   {"functional", nullptr},            {"invalid_golden", false},
             {"note", ""}};
    try {
      auto product = build_reference(spec, services, settings);
      rec["stage1"] = to_json(product.stage1);
      if (options.stage1_functional && spec.golden_testbench && product.testbench) {
        auto j = run_golden(spec, render_trace_model(spec, product.stage1.trace), services.toolchain, judge);
        rec["invalid_golden"] = j.invalid_golden;
        if (!j.invalid_golden) rec["functional"] = j.golden_correct;
        rec["note"] = j.note;
      }
      refs[p] = std::move(product);
    } catch (const Error& e) {
      if (is_fatal(e.code())) throw;
      rec["note"] = e.what();
      ref_errors[p] = e.what();
    }
    journal.append(rec);
    record_time("stage1/" + spec.id, t0);
  });

  // Stage 2 samples.
  std::vector<std::pair<std::size_t, unsigned>> cells;
  for (std::size_t p = 0; p < problems.size(); ++p)
    for (unsigned i = 0; i < options.samples; ++i)
      if (!idx.samples.count({problems[p].id, i})) cells.emplace_back(p, i);
  parallel_for(cells.size(), options.jobs, [&](std::size_t t) {
    const auto [p, i] = cells[t];
    const auto& spec = problems[p];
    const auto t0 = std::chrono::steady_clock::now();
    json rec{{"kind", "sample"}, {"config", options.config_digest}, {"problem", spec.id}, {"sample", i},
             {"status", nullptr}, {"digest", ""}, {"tb_pass", false}, {"golden_correct", false},
             {"invalid_golden", false}, {"note", ""}, {"outcome", nullptr}};
    if (!refs[p]) {
      rec["note"] = "stage 1 crashed: " + ref_errors[p];
    } else {
      try {
        auto outcome = run_sample(spec, *refs[p], services, settings, i);
        rec["status"] = to_string(outcome.status);
        rec["digest"] = outcome_digest(outcome);
        rec["outcome"] = to_json(outcome);
        if (spec.golden_testbench) {
          auto j = judge_sample(outcome, spec, services.toolchain, judge);
          rec["tb_pass"] = j.tb_pass;
          rec["golden_correct"] = j.golden_correct;
          rec["invalid_golden"] = j.invalid_golden;
          rec["note"] = j.note;
        } else {
          rec["tb_pass"] = outcome.status == PipelineStatus::pass;
        }
      } catch (const Error& e) {
        if (is_fatal(e.code())) throw;
        rec["note"] = e.what();
      }
    }
    journal.append(rec);
    record_time(fmt::format("sample/{}/{}", spec.id, i), t0);
  });

  auto report = build_report(problems, journal.load(), options);
  write_report(report, options.out_dir);
  timing["total"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - sweep_start).count();
  write_file_atomic(options.out_dir / "timing.json", timing.dump(2) + "\n");
  return report;
}

}  // namespace autoverifix
