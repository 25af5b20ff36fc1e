// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <teamlab/domain.hpp>

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace teamlab
{

/// Insertion-ordered JSON so serialized records diff cleanly.
using Json = nlohmann::ordered_json;

Json to_json(const Question& q);
Json to_json(const AgentTurn& t);
Json to_json(const Verdict& v);
Json to_json(const Instruction& i);
Json to_json(const ScoreSet& s);
Json to_json(const Transcript& t);

Question question_from_json(const Json& j);
AgentTurn turn_from_json(const Json& j);
Verdict verdict_from_json(const Json& j);
Instruction instruction_from_json(const Json& j);
ScoreSet score_set_from_json(const Json& j);
Transcript transcript_from_json(const Json& j);

/// One compact JSON object per line, no trailing whitespace.
std::string to_jsonl_line(const Json& j);

/// Reads every nonblank line as JSON; throws DatasetError(MalformedRecord) on bad lines.
std::vector<Json> read_jsonl(const std::filesystem::path& path);

void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& rows);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

} // namespace teamlab
