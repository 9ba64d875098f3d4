#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "advpara/types.hpp"

namespace advpara {

nlohmann::json to_json(const LabeledExample& ex);
nlohmann::json to_json(const ConstraintReport& r);
nlohmann::json to_json(const Candidate& c);
nlohmann::json to_json(const CandidateSet& s);

LabeledExample example_from_json(const nlohmann::json& j);
ConstraintReport report_from_json(const nlohmann::json& j);
Candidate candidate_from_json(const nlohmann::json& j);
CandidateSet candidate_set_from_json(const nlohmann::json& j);

// JSON Lines helpers. Each row is written compactly on its own line.
void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& rows);
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace advpara
