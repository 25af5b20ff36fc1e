// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <teamlab/backend.hpp>
#include <teamlab/domain.hpp>
#include <teamlab/persona.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace teamlab
{

struct FlatConfig
{
    /// Odd team size: 3, 5 or 7, or 1 for the single-agent ablation.
    int n_agents = 3;
    /// Total debate rounds including round 0, in [2,4].
    int max_rounds = 2;
    std::optional<std::vector<Persona>> personas;
    std::uint64_t seed = 0;
    std::string model_name;
    /// Recorded on the transcript; derived from the shape when empty.
    std::string team_config_id;
};

void validate(const FlatConfig& cfg);

enum class FlatPhase
{
    Initial,
    Refine,
    Final,
};

/// True iff every answer is present and they are all equal.
[[nodiscard]] bool consensus(std::span<const std::optional<Label>> answers);

/// Modal present answer; ties go to the tied label held by the lowest
/// agent index. Throws AllAbstained when nothing is present.
[[nodiscard]] Label majority_vote(std::span<const std::optional<Label>> answers);

/// System text for agent `agent_id`: persona sentence, then the role line.
[[nodiscard]] std::string flat_system_text(int agent_id, const std::optional<Persona>& persona);

/// `context` is the previous round's turns in agent order; it must be
/// empty exactly for the initial phase.
[[nodiscard]] ChatRequest build_flat_prompt(FlatPhase phase,
                                            const Question& q,
                                            int agent_id,
                                            std::span<const AgentTurn> context,
                                            const std::optional<Persona>& persona);

/// Multi-round peer debate with early consensus exit and majority vote.
///
/// Round 0 asks each agent independently. Each later round first checks
/// consensus on the previous round and stops if it holds; otherwise every
/// agent sees all previous-round replies. The last budgeted round uses the
/// consensus prompt. The verdict is the majority of the last executed round.
///
/// Throws IncompleteRun (carrying the partial transcript) on backend
/// failure and TeamAbstained when no final-round answer parses.
[[nodiscard]] Transcript run_flat_debate(const Question& q, const FlatConfig& cfg, Backend& backend);

} // namespace teamlab
