// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <teamlab/errors.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace teamlab
{

/// An option letter, always uppercase 'A'..'Z'.
using Label = char;

enum class DatasetId
{
    CS,
    ST,
    SQA,
    IH,
};

[[nodiscard]] std::string to_string(DatasetId id);
[[nodiscard]] DatasetId dataset_from_string(std::string_view name);

struct Option
{
    Label label = 'A';
    std::string body;

    bool operator==(const Option&) const = default;
};

struct Question
{
    std::string id;
    std::string text;
    std::vector<Option> options;
    Label gold = 'A';
    DatasetId dataset = DatasetId::CS;

    /// Option letters in order, e.g. "ABCDE".
    [[nodiscard]] std::string labels() const;

    bool operator==(const Question&) const = default;
};

/// Throws ValidationError naming the offending field.
void validate_question(const Question& q);

/// Uppercases labels (and gold) in place; datasets disagree on casing.
void normalize_labels(Question& q);

struct AgentTurn
{
    int agent_id = 0;
    int round = 0;
    std::string raw_text;
    std::optional<Label> answer;
    std::string explanation;
    std::optional<double> confidence;

    bool operator==(const AgentTurn&) const = default;
};

enum class DecidedBy
{
    Majority,
    Leader,
};

struct Verdict
{
    Label final_answer = 'A';
    DecidedBy decided_by = DecidedBy::Majority;
    int rounds_used = 1;
    bool correct = false;

    bool operator==(const Verdict&) const = default;
};

/// One directive delivered to `agent_id` by `issuer` in a hierarchical round.
struct Instruction
{
    int round = 0;
    int agent_id = 0;
    int issuer = 0;
    std::string text;

    bool operator==(const Instruction&) const = default;
};

enum class ProbePhase
{
    Pre,
    Post,
};

struct ScoreSet
{
    int agent_id = 0;
    ProbePhase phase = ProbePhase::Pre;
    std::map<int, int> scores;
    std::map<int, std::string> free_text;
    /// Likert items the agent did not answer in range; never imputed.
    std::vector<int> missing;
    std::string raw_text;

    bool operator==(const ScoreSet&) const = default;
};

enum class TeamStructure
{
    Flat,
    Hierarchical,
};

[[nodiscard]] std::string to_string(TeamStructure s);

enum class RunStatus
{
    Ok,
    Abstained,
    Timeout,
};

struct Transcript
{
    std::string question_id;
    std::string team_config_id;
    TeamStructure structure = TeamStructure::Flat;
    std::vector<AgentTurn> turns;
    std::optional<std::vector<Instruction>> instructions;
    std::optional<Verdict> verdict;
    RunStatus status = RunStatus::Ok;
    std::optional<std::vector<ScoreSet>> pre_probe;
    std::optional<std::vector<ScoreSet>> post_probe;
    std::uint64_t seed = 0;

    bool operator==(const Transcript&) const = default;
};

/// Sorts turns by (round, agent_id), stable for equal keys.
void sort_turns(std::vector<AgentTurn>& turns);

/// Extracts the chosen option from free model text.
///
/// Priority: the last "Answer: X" / "Answer is X" whose X is a valid label,
/// else the last standalone "X." / "(X)" / "X)" token, else nothing.
[[nodiscard]] std::optional<Label> parse_answer(std::string_view raw, std::string_view labels);

/// Reads a volunteered "confidence: 0.x" value in [0,1], if any.
[[nodiscard]] std::optional<double> parse_confidence(std::string_view raw);

/// Text after an "Explanation:" marker, else the whole reply trimmed.
[[nodiscard]] std::string extract_explanation(std::string_view raw);

[[nodiscard]] AgentTurn make_turn(int agent_id, int round, std::string raw, std::string_view labels);

/// Thrown by the team engines when the backend fails mid-run.
class IncompleteRun: public BackendError
{
  public:
    IncompleteRun(const BackendError& cause, Transcript partial):
        BackendError(cause), _partial(std::move(partial))
    {
    }

    [[nodiscard]] const Transcript& partial() const noexcept { return _partial; }

  private:
    Transcript _partial;
};

/// Flat verdict impossible: no final-round answer parsed.
class TeamAbstained: public AllAbstained
{
  public:
    explicit TeamAbstained(Transcript partial): _partial(std::move(partial)) {}

    [[nodiscard]] const Transcript& partial() const noexcept { return _partial; }

  private:
    Transcript _partial;
};

class LeaderAbstained: public LeaderUnparseable
{
  public:
    explicit LeaderAbstained(Transcript partial):
        LeaderUnparseable("leader final answer unparseable after reprompt"), _partial(std::move(partial))
    {
    }

    [[nodiscard]] const Transcript& partial() const noexcept { return _partial; }

  private:
    Transcript _partial;
};

[[nodiscard]] std::string trim(std::string_view s);

} // namespace teamlab
