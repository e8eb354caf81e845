// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "autoverifix/model.hpp"

namespace autoverifix {

using json = nlohmann::json;

// Problem sets: one ProblemSpec object per line. Errors name the failing field.
ProblemSpec problem_from_json(const json& j);
json to_json(const ProblemSpec& spec);
std::vector<ProblemSpec> load_problems(const std::filesystem::path& jsonl);
std::vector<ProblemSpec> parse_problems(std::string_view jsonl_text);

// Port values travel as JSON integers; widths come from the owning spec.
Stimulus stimulus_from_json(const json& j, const ProblemSpec& spec);
json to_json(const Stimulus& stimulus);
SimTrace trace_from_json(const json& j, const ProblemSpec& spec);
json to_json(const SimTrace& trace);

CoverageReport coverage_from_json(const json& j);
json to_json(const CoverageReport& report);

json to_json(const Diagnostic& d);
Diagnostic diagnostic_from_json(const json& j);
json to_json(const Discrepancy& d);
Discrepancy discrepancy_from_json(const json& j);

json to_json(const IterationEvent& e);
IterationEvent event_from_json(const json& j);

json to_json(const PipelineOutcome& outcome);
PipelineOutcome outcome_from_json(const json& j, const ProblemSpec& spec);
/// SHA-256 over the outcome's canonical JSON.
std::string outcome_digest(const PipelineOutcome& outcome);

PipelineStatus parse_pipeline_status(std::string_view s);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace autoverifix
