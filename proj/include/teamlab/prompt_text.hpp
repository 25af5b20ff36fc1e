// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <teamlab/backend.hpp>
#include <teamlab/domain.hpp>

#include <exception>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace teamlab
{

inline constexpr std::size_t kContextCharsPerAgent = 1500;
inline constexpr std::string_view kNoAnswer = "(no answer)";

/// Question text followed by one "X. body" line per option.
[[nodiscard]] std::string render_question(const Question& q);

/// Cuts to at most `max_bytes` without splitting a UTF-8 sequence.
[[nodiscard]] std::string truncate_utf8(std::string_view s, std::size_t max_bytes);

/// "Agent k: <raw_text>" blocks joined by blank lines, in the given order.
/// Abstaining turns read "(no answer)"; each reply is cut to 1,500 chars.
[[nodiscard]] std::string render_context(std::span<const AgentTurn> turns);

/// "Agent 2, Agent 3, Agent 4"
[[nodiscard]] std::string agent_list(std::span<const int> ids);

/// "Agent 2: ___" scaffold lines, one per id.
[[nodiscard]] std::string instruction_scaffold(std::span<const int> ids);

struct CallOutcome
{
    std::string text;
    std::exception_ptr error;
};

/// Issues every request concurrently and waits for all of them; results
/// come back in request order regardless of completion order.
[[nodiscard]] std::vector<CallOutcome> complete_all(Backend& backend, const std::vector<ChatRequest>& requests);

} // namespace teamlab
