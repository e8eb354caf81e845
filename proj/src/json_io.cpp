// SPDX-License-Identifier: Apache-2.0
#include "autoverifix/json_io.hpp"

#include <fmt/format.h>

#include <fstream>
#include <set>
#include <sstream>

#include "autoverifix/digest.hpp"
#include "autoverifix/error.hpp"

namespace autoverifix {

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw Error(Errc::invalid_problem, fmt::format("{}: {}", field, why));
}

const json& require(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) bad_field(path.empty() ? "<root>" : path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad_field(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string require_string(const json& j, const char* key, const std::string& path) {
  const auto& v = require(j, key, path);
  if (!v.is_string()) bad_field(path.empty() ? key : path + "." + key, "expected a string");
  return v.get<std::string>();
}

template <class Enum, std::size_t N>
Enum parse_enum(const std::string& text, const std::array<Enum, N>& values, const std::string& field) {
  for (auto v : values)
    if (text == to_string(v)) return v;
  bad_field(field, fmt::format("unknown value '{}'", text));
}

BitVec value_from_json(const json& v, unsigned width, const std::string& where) {
  if (v.is_number_unsigned()) return BitVec(width, v.get<std::uint64_t>());
  if (v.is_number_integer()) {
    if (v.get<std::int64_t>() < 0) throw Error(Errc::malformed, fmt::format("{}: negative value", where));
    return BitVec(width, v.get<std::uint64_t>());
  }
  if (v.is_string()) return parse_bitvec(v.get<std::string>(), width);
  throw Error(Errc::malformed, fmt::format("{}: expected an integer", where));
}

json value_to_json(const BitVec& v) {
  if (v.is_unknown()) return "x";
  return v.value();
}

SignalMap signals_from_json(const json& j, const ProblemSpec& spec, const std::string& where) {
  if (!j.is_object()) throw Error(Errc::malformed, fmt::format("{}: expected an object", where));
  SignalMap out;
  for (const auto& [name, v] : j.items()) {
    const auto* port = spec.find_port(name);
    if (!port) throw Error(Errc::port_mismatch, fmt::format("{}: unknown port '{}'", where, name));
    out.emplace(name, value_from_json(v, port->width, where + "." + name));
  }
  return out;
}

json signals_to_json(const SignalMap& m) {
  json j = json::object();
  for (const auto& [name, v] : m) j[name] = value_to_json(v);
  return j;
}

constexpr std::array kStatuses{PipelineStatus::pass, PipelineStatus::fail_syntax, PipelineStatus::fail_function,
                               PipelineStatus::fail_reference, PipelineStatus::budget_exhausted};

}  // namespace

ProblemSpec problem_from_json(const json& j) {
  ProblemSpec spec;
  spec.id = require_string(j, "id", "");
  spec.description = require_string(j, "description", "");
  spec.module_name = require_string(j, "module_name", "");
  spec.kind = parse_enum(require_string(j, "kind", ""),
                         std::array{DesignKind::combinational, DesignKind::sequential}, "kind");
  const auto& ports = require(j, "ports", "");
  if (!ports.is_array()) bad_field("ports", "expected an array");
  for (std::size_t i = 0; i < ports.size(); ++i) {
    const auto path = fmt::format("ports[{}]", i);
    PortDecl p;
    p.name = require_string(ports[i], "name", path);
    p.direction = parse_enum(require_string(ports[i], "direction", path),
                             std::array{Direction::input, Direction::output}, path + ".direction");
    const auto& w = require(ports[i], "width", path);
    if (!w.is_number_integer() || w.get<std::int64_t>() < 1 || w.get<std::int64_t>() > kMaxPortWidth)
      bad_field(path + ".width", fmt::format("expected an integer in [1, {}]", kMaxPortWidth));
    p.width = w.get<unsigned>();
    p.role = parse_enum(require_string(ports[i], "role", path),
                        std::array{PortRole::data, PortRole::clock, PortRole::reset}, path + ".role");
    spec.ports.push_back(std::move(p));
  }
  if (auto it = j.find("golden_testbench"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) bad_field("golden_testbench", "expected a string");
    spec.golden_testbench = it->get<std::string>();
  }
  validate(spec);
  return spec;
}

json to_json(const ProblemSpec& spec) {
  json ports = json::array();
  for (const auto& p : spec.ports)
    ports.push_back({{"name", p.name}, {"direction", to_string(p.direction)}, {"width", p.width},
                     {"role", to_string(p.role)}});
  json j{{"id", spec.id},           {"description", spec.description}, {"module_name", spec.module_name},
         {"ports", std::move(ports)}, {"kind", to_string(spec.kind)}};
  if (spec.golden_testbench) j["golden_testbench"] = *spec.golden_testbench;
  return j;
}

std::vector<ProblemSpec> parse_problems(std::string_view text) {
  std::vector<ProblemSpec> out;
  std::set<std::string> ids;
  std::istringstream in{std::string(text)};
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j;
      try {
        j = json::parse(line);
      } catch (const json::parse_error& e) {
        throw Error(Errc::invalid_problem, fmt::format("invalid JSON: {}", e.what()));
      }
      auto spec = problem_from_json(j);
      if (!ids.insert(spec.id).second) bad_field("id", fmt::format("duplicate id '{}'", spec.id));
      out.push_back(std::move(spec));
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("line {}: {}", lineno, e.what()));
    }
  }
  return out;
}

std::vector<ProblemSpec> load_problems(const std::filesystem::path& path) {
  try {
    return parse_problems(read_file(path));
  } catch (const Error& e) {
    if (e.code() == Errc::io) throw;
    throw Error(e.code(), fmt::format("{}: {}", path.string(), e.what()));
  }
}

Stimulus stimulus_from_json(const json& j, const ProblemSpec& spec) {
  if (!j.is_array()) throw Error(Errc::malformed, "test vectors: expected an array");
  const auto inputs = spec.data_inputs();
  Stimulus out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto where = fmt::format("test vectors[{}]", i);
    SignalMap m;
    if (j[i].is_object()) {
      m = signals_from_json(j[i], spec, where);
    } else if (inputs.size() == 1) {
      // A bare sequence of integers drives the single data input.
      m.emplace(inputs[0].name, value_from_json(j[i], inputs[0].width, where));
    } else {
      throw Error(Errc::malformed, fmt::format("{}: expected an object of input values", where));
    }
    if (m.size() != inputs.size())
      throw Error(Errc::port_mismatch, fmt::format("{}: must bind every data input exactly once", where));
    for (const auto& p : inputs)
      if (!m.contains(p.name)) throw Error(Errc::port_mismatch, fmt::format("{}: missing input '{}'", where, p.name));
    out.push_back(std::move(m));
  }
  return out;
}

json to_json(const Stimulus& stimulus) {
  json j = json::array();
  for (const auto& m : stimulus) j.push_back(signals_to_json(m));
  return j;
}

SimTrace trace_from_json(const json& j, const ProblemSpec& spec) {
  if (!j.is_array()) throw Error(Errc::malformed, "trace: expected an array");
  SimTrace trace;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto where = fmt::format("trace[{}]", i);
    const auto& rec = j[i];
    if (!rec.is_object()) throw Error(Errc::malformed, where + ": expected an object");
    CycleRecord c;
    c.cycle_index = rec.value("cycle", static_cast<std::uint64_t>(i));
    c.inputs = signals_from_json(rec.value("inputs", json::object()), spec, where + ".inputs");
    c.outputs = signals_from_json(rec.value("outputs", json::object()), spec, where + ".outputs");
    if (auto it = rec.find("state"); it != rec.end() && it->is_object()) {
      std::map<std::string, std::string> state;
      for (const auto& [k, v] : it->items()) state.emplace(k, v.is_string() ? v.get<std::string>() : v.dump());
      c.state = std::move(state);
    }
    trace.cycles.push_back(std::move(c));
  }
  validate_trace(spec, trace);
  return trace;
}

json to_json(const SimTrace& trace) {
  json j = json::array();
  for (const auto& c : trace.cycles) {
    json rec{{"cycle", c.cycle_index}, {"inputs", signals_to_json(c.inputs)}, {"outputs", signals_to_json(c.outputs)}};
    if (c.state) rec["state"] = *c.state;
    j.push_back(std::move(rec));
  }
  return j;
}

CoverageReport coverage_from_json(const json& j) {
  if (!j.is_object()) throw Error(Errc::malformed, "coverage: expected an object");
  CoverageReport r;
  try {
    r.total_lines = j.at("total_lines").get<std::uint64_t>();
    r.covered_lines = j.at("covered_lines").get<std::uint64_t>();
    r.ratio = j.at("ratio").get<double>();
    r.uncovered_lines = j.value("uncovered_lines", std::vector<std::uint64_t>{});
    r.uncovered_branch_count = j.value("uncovered_branch_count", std::uint64_t{0});
  } catch (const json::exception& e) {
    throw Error(Errc::malformed, fmt::format("coverage: {}", e.what()));
  }
  validate(r);
  return r;
}

json to_json(const CoverageReport& r) {
  return {{"total_lines", r.total_lines},
          {"covered_lines", r.covered_lines},
          {"ratio", r.ratio},
          {"uncovered_lines", r.uncovered_lines},
          {"uncovered_branch_count", r.uncovered_branch_count}};
}

json to_json(const Diagnostic& d) {
  return {{"severity", to_string(d.severity)},
          {"file", d.file},
          {"line", d.line ? json(*d.line) : json(nullptr)},
          {"message", d.message},
          {"raw", d.raw}};
}

Diagnostic diagnostic_from_json(const json& j) {
  Diagnostic d;
  d.severity = j.at("severity").get<std::string>() == "warning" ? Severity::warning : Severity::error;
  d.file = j.at("file").get<std::string>();
  if (!j.at("line").is_null()) d.line = j.at("line").get<unsigned>();
  d.message = j.at("message").get<std::string>();
  d.raw = j.at("raw").get<std::string>();
  return d;
}

json to_json(const Discrepancy& d) {
  return {{"cycle", d.cycle},
          {"signal", d.signal},
          {"width", d.expected.width()},
          {"expected", format_bitvec(d.expected)},
          {"observed", format_bitvec(d.observed)}};
}

Discrepancy discrepancy_from_json(const json& j) {
  const auto width = j.at("width").get<unsigned>();
  return Discrepancy{j.at("cycle").get<std::uint64_t>(), j.at("signal").get<std::string>(),
                     parse_hex_bitvec(j.at("expected").get<std::string>(), width),
                     parse_hex_bitvec(j.at("observed").get<std::string>(), width)};
}

json to_json(const IterationEvent& e) {
  return {{"stage", e.stage},
          {"kind", e.kind},
          {"prompt_digest", e.prompt_digest},
          {"response_digest", e.response_digest},
          {"summary", e.summary}};
}

IterationEvent event_from_json(const json& j) {
  return IterationEvent{j.at("stage").get<std::string>(), j.at("kind").get<std::string>(),
                        j.at("prompt_digest").get<std::string>(), j.at("response_digest").get<std::string>(),
                        j.at("summary").get<std::string>()};
}

PipelineStatus parse_pipeline_status(std::string_view s) {
  for (auto v : kStatuses)
    if (s == to_string(v)) return v;
  throw Error(Errc::malformed, fmt::format("unknown pipeline status '{}'", s));
}

json to_json(const PipelineOutcome& o) {
  json log = json::array();
  for (const auto& e : o.iteration_log) log.push_back(to_json(e));
  return {{"problem_id", o.problem_id},
          {"status", to_string(o.status)},
          {"reference_source", o.reference_source},
          {"test_vectors", to_json(o.test_vectors)},
          {"testbench_source", o.testbench_source},
          {"verilog_source", o.verilog_source},
          {"coverage", to_json(o.coverage)},
          {"iteration_log", std::move(log)}};
}

PipelineOutcome outcome_from_json(const json& j, const ProblemSpec& spec) {
  PipelineOutcome o;
  o.problem_id = j.at("problem_id").get<std::string>();
  o.status = parse_pipeline_status(j.at("status").get<std::string>());
  o.reference_source = j.at("reference_source").get<std::string>();
  o.test_vectors = stimulus_from_json(j.at("test_vectors"), spec);
  o.testbench_source = j.at("testbench_source").get<std::string>();
  o.verilog_source = j.at("verilog_source").get<std::string>();
  o.coverage = coverage_from_json(j.at("coverage"));
  for (const auto& e : j.at("iteration_log")) o.iteration_log.push_back(event_from_json(e));
  return o;
}

std::string outcome_digest(const PipelineOutcome& outcome) { return sha256_hex(to_json(outcome).dump()); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io, fmt::format("cannot write {}", tmp.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(Errc::io, fmt::format("short write to {}", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace autoverifix
