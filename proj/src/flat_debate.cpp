// SPDX-License-Identifier: Apache-2.0
#include <teamlab/flat_debate.hpp>
#include <teamlab/prompt_text.hpp>

#include <array>

namespace teamlab
{

namespace
{

std::string role_line(int agent_id)
{
    return "You are a reasoning agent " + std::to_string(agent_id)
           + ". You are here to answer multiple choice reasoning questions.";
}

std::vector<std::optional<Label>> answers_of(std::span<const AgentTurn> turns)
{
    std::vector<std::optional<Label>> out;
    out.reserve(turns.size());
    for (const auto& t: turns)
        out.push_back(t.answer);
    return out;
}

} // namespace

void validate(const FlatConfig& cfg)
{
    using Kind = ValidationError::Kind;
    if (cfg.n_agents != 1 && cfg.n_agents != 3 && cfg.n_agents != 5 && cfg.n_agents != 7)
        throw ValidationError(Kind::InvalidConfig, "n_agents", "must be one of 1, 3, 5, 7");
    if (cfg.max_rounds < 2 || cfg.max_rounds > 4)
        throw ValidationError(Kind::InvalidConfig, "max_rounds", "must lie in [2,4]");
    if (cfg.personas && static_cast<int>(cfg.personas->size()) != cfg.n_agents)
        throw ValidationError(Kind::InvalidConfig, "personas", "length must equal n_agents");
}

bool consensus(std::span<const std::optional<Label>> answers)
{
    if (answers.empty() || !answers.front())
        return false;
    for (const auto& a: answers)
        if (a != answers.front())
            return false;
    return true;
}

Label majority_vote(std::span<const std::optional<Label>> answers)
{
    std::array<int, 26> counts {};
    std::array<int, 26> first_holder {};
    first_holder.fill(-1);
    for (std::size_t i = 0; i < answers.size(); ++i)
    {
        if (!answers[i])
            continue;
        auto const slot = static_cast<std::size_t>(*answers[i] - 'A');
        ++counts[slot];
        if (first_holder[slot] < 0)
            first_holder[slot] = static_cast<int>(i);
    }

    int best = -1;
    for (std::size_t s = 0; s < counts.size(); ++s)
    {
        if (counts[s] == 0)
            continue;
        auto const b = static_cast<std::size_t>(best);
        if (best < 0 || counts[s] > counts[b] || (counts[s] == counts[b] && first_holder[s] < first_holder[b]))
            best = static_cast<int>(s);
    }
    if (best < 0)
        throw AllAbstained();
    return static_cast<Label>('A' + best);
}

std::string flat_system_text(int agent_id, const std::optional<Persona>& persona)
{
    return (persona ? render_persona(*persona) + " " : std::string()) + role_line(agent_id);
}

ChatRequest build_flat_prompt(FlatPhase phase,
                              const Question& q,
                              int agent_id,
                              std::span<const AgentTurn> context,
                              const std::optional<Persona>& persona)
{
    if ((phase == FlatPhase::Initial) != context.empty())
        throw ValidationError(ValidationError::Kind::PreconditionViolated,
                              "context",
                              "must be empty exactly for the initial phase");

    ChatRequest req;
    req.system = flat_system_text(agent_id, persona);
    req.max_tokens = kAgentMaxTokens;

    auto const question = render_question(q);
    std::string body;
    switch (phase)
    {
        case FlatPhase::Initial:
            body = "Please answer the following question by selecting only one option.\n\n"
                   "Question: " + question + "\nAnswer: ___";
            break;
        case FlatPhase::Refine:
            body = "You are part of a team of agents. You are expected to help your team get to the correct answer.\n\n"
                   "You will be given the question and your previous response and your team members’ previous responses.\n\n"
                   "Here are your previous answers from your team: " + render_context(context) + "\n\n"
                   "Take a moment to reflect on the responses and then engage in conversation to come to the right answer.\n\n"
                   "Question: " + question + "\nAnswer: ___";
            break;
        case FlatPhase::Final:
            body = "Agents, review the conversation: " + render_context(context) + ".\n\n"
                   "Come to a consensus on the best final answer for the question:\n\n"
                   "Question: " + question + "\nAnswer: ___";
            break;
    }
    req.messages.push_back(ChatMessage { Role::User, std::move(body) });
    return req;
}

Transcript run_flat_debate(const Question& q, const FlatConfig& cfg, Backend& backend)
{
    validate(cfg);
    auto const labels = q.labels();

    Transcript transcript;
    transcript.question_id = q.id;
    transcript.team_config_id = cfg.team_config_id.empty()
                                    ? "flat-n" + std::to_string(cfg.n_agents) + "-r" + std::to_string(cfg.max_rounds)
                                    : cfg.team_config_id;
    transcript.structure = TeamStructure::Flat;
    transcript.seed = cfg.seed;

    std::vector<AgentTurn> previous;
    int rounds_used = 0;
    for (int round = 0; round < cfg.max_rounds; ++round)
    {
        if (round > 0 && consensus(answers_of(previous)))
            break;

        auto const phase = round == 0 ? FlatPhase::Initial
                           : round == cfg.max_rounds - 1 ? FlatPhase::Final
                                                         : FlatPhase::Refine;
        std::vector<ChatRequest> requests;
        for (int agent = 0; agent < cfg.n_agents; ++agent)
        {
            std::optional<Persona> persona;
            if (cfg.personas)
                persona = (*cfg.personas)[static_cast<std::size_t>(agent)];
            auto req = build_flat_prompt(phase, q, agent, previous, persona);
            req.model_name = cfg.model_name;
            requests.push_back(std::move(req));
        }

        auto outcomes = complete_all(backend, requests);
        std::vector<AgentTurn> current;
        std::exception_ptr failure;
        for (int agent = 0; agent < cfg.n_agents; ++agent)
        {
            auto& outcome = outcomes[static_cast<std::size_t>(agent)];
            if (outcome.error)
            {
                if (!failure)
                    failure = outcome.error;
                continue;
            }
            current.push_back(make_turn(agent, round, std::move(outcome.text), labels));
        }
        transcript.turns.insert(transcript.turns.end(), current.begin(), current.end());

        if (failure)
        {
            try
            {
                std::rethrow_exception(failure);
            }
            catch (const BackendError& e)
            {
                throw IncompleteRun(e, transcript);
            }
        }
        previous = std::move(current);
        rounds_used = round + 1;
    }

    auto const final_answers = answers_of(previous);
    Label answer = 'A';
    try
    {
        answer = majority_vote(final_answers);
    }
    catch (const AllAbstained&)
    {
        transcript.status = RunStatus::Abstained;
        throw TeamAbstained(transcript);
    }
    transcript.verdict = Verdict {
        .final_answer = answer,
        .decided_by = DecidedBy::Majority,
        .rounds_used = rounds_used,
        .correct = answer == q.gold,
    };
    return transcript;
}

} // namespace teamlab
