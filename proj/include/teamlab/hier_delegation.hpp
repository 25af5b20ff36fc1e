// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <teamlab/backend.hpp>
#include <teamlab/domain.hpp>
#include <teamlab/persona.hpp>

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace teamlab
{

enum class HierShape
{
    /// Leader (agent 1) over members 2, 3, 4.
    L1,
    /// Leader (agent 1) over managers 2 and 3; manager 2 runs members 4, 5
    /// and manager 3 runs members 6, 7.
    L2,
};

[[nodiscard]] std::string to_string(HierShape s);
[[nodiscard]] HierShape hier_shape_from_string(std::string_view s);

inline constexpr int kLeaderId = 1;

struct HierConfig
{
    HierShape shape = HierShape::L1;
    /// Member answer rounds, in [2,4]; the leader's final call follows the last.
    int max_rounds = 2;
    /// One per agent in id order (leader first) when present.
    std::optional<std::vector<Persona>> personas;
    std::uint64_t seed = 0;
    std::string model_name;
    std::string team_config_id;
};

/// Who reports to whom for a given shape.
struct TeamLayout
{
    std::vector<int> managers;
    std::vector<int> members;
    /// manager id -> member ids it relays to; empty for L1.
    std::map<int, std::vector<int>> reports;

    [[nodiscard]] int total() const { return 1 + static_cast<int>(managers.size() + members.size()); }
    /// Agents receiving the leader's instructions directly.
    [[nodiscard]] const std::vector<int>& direct_reports() const { return managers.empty() ? members : managers; }
};

[[nodiscard]] TeamLayout layout_for(HierShape shape);

void validate(const HierConfig& cfg);

struct InstructionSet
{
    int round = 0;
    std::map<int, std::string> entries;
};

/// Splits "Agent k: ..." lines; any expected id without a line receives the
/// whole text (broadcast fallback).
[[nodiscard]] InstructionSet parse_instructions(std::string_view leader_text, std::span<const int> expected_ids, int round = 0);

enum class LeaderPhase
{
    Initial,
    Refine,
    Final,
};

/// Everything that varies between the leader and an L2 manager prompt.
struct LeaderPromptContext
{
    /// Agents this author instructs, e.g. {2, 3, 4}.
    std::vector<int> instructs;
    std::string team_description;
    std::optional<Persona> persona;
    /// Set for managers: the directive they received from the leader.
    std::optional<std::string> upstream_instruction;
    bool manager = false;
};

/// `member_answers` must be empty exactly for the initial phase.
[[nodiscard]] ChatRequest build_leader_prompt(LeaderPhase phase,
                                              const Question& q,
                                              std::span<const AgentTurn> member_answers,
                                              const LeaderPromptContext& ctx);

/// Throws ValidationError when the instruction is empty.
[[nodiscard]] ChatRequest build_member_prompt(const Question& q,
                                              std::string_view instruction,
                                              const std::optional<Persona>& persona);

/// "Agent 2, Agent 3, Agent 4" for L1, with persona tags and manager
/// reports spelled out when present.
[[nodiscard]] std::string describe_team(const TeamLayout& layout,
                                        std::span<const int> ids,
                                        const std::optional<std::vector<Persona>>& personas);

/// The standing system framing of `agent_id` within a hierarchical team
/// (role, reporting line and persona), without any task content.
[[nodiscard]] std::string hier_framing(const HierConfig& cfg, int agent_id);

/// Leader-led delegation: per-round instructions, member answers, and a
/// final leader decision that may overrule every member.
///
/// Throws IncompleteRun on backend failure and LeaderAbstained when the
/// final answer does not parse after one reprompt.
[[nodiscard]] Transcript run_hier(const Question& q, const HierConfig& cfg, Backend& backend);

/// Majority of the members' last-round answers, for reporting only.
[[nodiscard]] std::optional<Label> member_majority(const Transcript& t, HierShape shape);

} // namespace teamlab
