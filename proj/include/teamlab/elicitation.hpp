// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <teamlab/backend.hpp>
#include <teamlab/domain.hpp>

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace teamlab
{

enum class ProbeKind
{
    Open,
    Likert,
};

struct ProbeItem
{
    ProbePhase phase = ProbePhase::Pre;
    int index = 1;
    std::string_view text;
    ProbeKind kind = ProbeKind::Likert;
};

/// Pre: five items, 1-2 open and 3-5 Likert. Post: six Likert items.
[[nodiscard]] std::span<const ProbeItem> probe_items(ProbePhase phase);

[[nodiscard]] std::string to_string(ProbePhase phase);

/// Numbered answers "k. v", "k: v", "k) v" or "Qk: v" with v in [1,5],
/// optionally written "v/5". Out-of-range values are absent, never clamped.
/// A later answer for the same k overrides an earlier one.
[[nodiscard]] std::map<int, int> parse_likert(std::string_view text, int n_items);

/// Text of each numbered segment, trimmed; empty segments are omitted.
[[nodiscard]] std::map<int, std::string> parse_numbered(std::string_view text, int n_items);

/// Who is being interviewed and the system framing they worked under.
struct ProbeAgent
{
    int agent_id = 0;
    std::string framing;
};

/// Round count and final answer, the only task context a post probe sees.
[[nodiscard]] std::string transcript_summary(const Transcript& t);

/// `summary` must be present exactly for the post phase.
[[nodiscard]] ChatRequest build_probe_prompt(ProbePhase phase,
                                             const ProbeAgent& agent,
                                             const std::optional<std::string>& summary);

/// Interviews every agent concurrently; results come back in agent order.
/// Throws the first BackendError encountered.
[[nodiscard]] std::vector<ScoreSet> run_probe(ProbePhase phase,
                                              std::span<const ProbeAgent> agents,
                                              Backend& backend,
                                              const std::optional<std::string>& summary = std::nullopt,
                                              const std::string& model_name = {});

[[nodiscard]] ScoreSet score_response(ProbePhase phase, int agent_id, std::string raw);

struct ProbeDelta
{
    int pre_index = 0;
    int post_index = 0;
    int delta = 0;

    bool operator==(const ProbeDelta&) const = default;
};

/// Pre 3/4/5 against post 2/3/4; delta = post - pre. Pairs with a missing
/// side are skipped.
[[nodiscard]] std::vector<ProbeDelta> pair_pre_post(const ScoreSet& pre, const ScoreSet& post);

} // namespace teamlab
