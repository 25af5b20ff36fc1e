// SPDX-License-Identifier: Apache-2.0
#include <teamlab/flat_debate.hpp>
#include <teamlab/hier_delegation.hpp>
#include <teamlab/prompt_text.hpp>

#include <algorithm>
#include <cctype>

namespace teamlab
{

namespace
{

constexpr std::string_view kReprompt = "Please answer with a single option letter.";

std::optional<Persona> persona_of(const std::optional<std::vector<Persona>>& personas, int id)
{
    if (!personas)
        return std::nullopt;
    return (*personas)[static_cast<std::size_t>(id - 1)];
}

// Recognizes "Agent 3: text", "- **Agent 3:** text", "To Agent 3: text".
std::optional<std::pair<int, std::string>> agent_header(std::string_view line)
{
    std::size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '-' || line[i] == '*' || line[i] == '#' || line[i] == '>'))
        ++i;
    auto ci = [&](std::string_view word) {
        if (i + word.size() > line.size())
            return false;
        for (std::size_t k = 0; k < word.size(); ++k)
            if (std::tolower(static_cast<unsigned char>(line[i + k])) != word[k])
                return false;
        return true;
    };
    if (ci("to "))
        i += 3;
    if (!ci("agent"))
        return std::nullopt;
    i += 5;
    while (i < line.size() && line[i] == ' ')
        ++i;
    int id = 0;
    auto const digits_start = i;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i])))
        id = id * 10 + (line[i++] - '0');
    if (i == digits_start)
        return std::nullopt;
    while (i < line.size() && (line[i] == '*' || line[i] == ' '))
        ++i;
    if (i >= line.size() || line[i] != ':')
        return std::nullopt;
    ++i;
    auto rest = trim(line.substr(i));
    while (!rest.empty() && rest.front() == '*')
        rest.erase(rest.begin());
    while (!rest.empty() && rest.back() == '*')
        rest.pop_back();
    return std::pair { id, trim(rest) };
}

std::string leader_role(const LeaderPromptContext& ctx)
{
    return ctx.manager ? "You are a manager of a reasoning team reporting to the team leader."
                       : "You are the team leader of a reasoning team.";
}

} // namespace

std::string to_string(HierShape s)
{
    return s == HierShape::L1 ? "L1" : "L2";
}

HierShape hier_shape_from_string(std::string_view s)
{
    if (s == "L1")
        return HierShape::L1;
    if (s == "L2")
        return HierShape::L2;
    throw ValidationError(ValidationError::Kind::InvalidConfig, "shape", "unknown hierarchy shape '" + std::string(s) + "'");
}

TeamLayout layout_for(HierShape shape)
{
    TeamLayout layout;
    if (shape == HierShape::L1)
    {
        layout.members = { 2, 3, 4 };
        return layout;
    }
    layout.managers = { 2, 3 };
    layout.members = { 4, 5, 6, 7 };
    layout.reports[2] = { 4, 5 };
    layout.reports[3] = { 6, 7 };
    return layout;
}

void validate(const HierConfig& cfg)
{
    using Kind = ValidationError::Kind;
    if (cfg.max_rounds < 2 || cfg.max_rounds > 4)
        throw ValidationError(Kind::InvalidConfig, "max_rounds", "must lie in [2,4]");
    auto const total = layout_for(cfg.shape).total();
    if (cfg.personas && static_cast<int>(cfg.personas->size()) != total)
        throw ValidationError(Kind::InvalidConfig, "personas", "length must equal " + std::to_string(total));
}

InstructionSet parse_instructions(std::string_view leader_text, std::span<const int> expected_ids, int round)
{
    if (expected_ids.empty())
        throw ValidationError(ValidationError::Kind::PreconditionViolated, "expected_ids", "must be nonempty");

    InstructionSet set;
    set.round = round;
    std::optional<int> open;
    std::size_t pos = 0;
    while (pos <= leader_text.size())
    {
        auto end = leader_text.find('\n', pos);
        if (end == std::string_view::npos)
            end = leader_text.size();
        auto const line = leader_text.substr(pos, end - pos);
        pos = end + 1;

        if (auto header = agent_header(line))
        {
            open.reset();
            auto const [id, rest] = *header;
            bool const expected = std::find(expected_ids.begin(), expected_ids.end(), id) != expected_ids.end();
            if (expected && !set.entries.contains(id))
            {
                set.entries[id] = rest;
                open = id;
            }
            continue;
        }
        auto const text = trim(line);
        if (text.empty())
        {
            open.reset();
            continue;
        }
        if (open)
        {
            auto& entry = set.entries[*open];
            entry += entry.empty() ? text : "\n" + text;
        }
    }

    auto const fallback = trim(leader_text);
    for (auto id: expected_ids)
    {
        auto it = set.entries.find(id);
        if (it == set.entries.end() || it->second.empty())
            set.entries[id] = fallback;
    }
    return set;
}

std::string describe_team(const TeamLayout& layout, std::span<const int> ids, const std::optional<std::vector<Persona>>& personas)
{
    std::string out;
    for (auto id: ids)
    {
        if (!out.empty())
            out += ", ";
        out += "Agent " + std::to_string(id);
        std::vector<std::string> notes;
        if (auto p = persona_of(personas, id))
            notes.push_back(describe_persona(*p));
        if (auto it = layout.reports.find(id); it != layout.reports.end())
            notes.push_back("manages " + agent_list(it->second));
        if (!notes.empty())
        {
            out += " (";
            for (std::size_t i = 0; i < notes.size(); ++i)
                out += (i ? "; " : "") + notes[i];
            out += ")";
        }
    }
    return out;
}

ChatRequest build_leader_prompt(LeaderPhase phase,
                                const Question& q,
                                std::span<const AgentTurn> member_answers,
                                const LeaderPromptContext& ctx)
{
    if ((phase == LeaderPhase::Initial) != member_answers.empty())
        throw ValidationError(ValidationError::Kind::PreconditionViolated,
                              "member_answers",
                              "must be empty exactly for the initial phase");

    auto const persona = ctx.persona ? render_persona(*ctx.persona) + " " : std::string();
    auto const question = render_question(q);
    auto const upstream = ctx.upstream_instruction ? "Leader's Instruction: " + *ctx.upstream_instruction + "\n" : std::string();

    ChatRequest req;
    req.max_tokens = kLeaderMaxTokens;
    std::string body;
    switch (phase)
    {
        case LeaderPhase::Initial:
            req.system = persona + leader_role(ctx)
                         + " The goal of the team is to answer reasoning questions as accurately as possible. "
                           "You manage the following agents: " + ctx.team_description + ".\n\n"
                           "Your role is to delegate tasks to your team members so that they can provide you with useful information.\n\n"
                           "Create clear instructions for each agent.";
            body = upstream + "Question: " + question + "\nTeam Members: " + agent_list(ctx.instructs) + "\nInstructions:\n"
                   + instruction_scaffold(ctx.instructs);
            break;
        case LeaderPhase::Refine:
            req.system = persona + leader_role(ctx) + " You manage the following agents: " + ctx.team_description
                         + ". Your team members have submitted initial answers to the question.\n\n"
                           "Review their responses and provide each member with updated instructions to reaffirm or correct their reasoning.\n\n"
                           "Your instructions must be clear and under 10 words.";
            body = upstream + "Team Members’ Answers: " + render_context(member_answers) + "\nQuestion: " + question
                   + "\nInstructions:\n" + instruction_scaffold(ctx.instructs);
            break;
        case LeaderPhase::Final:
            req.system = persona + leader_role(ctx)
                         + " Your team members have responded based on your updated instructions.\n\n"
                           "Reflect on their responses and provide the final correct answer. Your answer may differ from your team members'.";
            body = "Team Members’ Final Answers: " + render_context(member_answers) + "\nQuestion: " + question
                   + "\nFinal Answer: ___";
            break;
    }
    req.messages.push_back(ChatMessage { Role::User, std::move(body) });
    return req;
}

ChatRequest build_member_prompt(const Question& q, std::string_view instruction, const std::optional<Persona>& persona)
{
    if (trim(instruction).empty())
        throw ValidationError(ValidationError::Kind::PreconditionViolated, "instruction", "must be nonempty");

    ChatRequest req;
    req.max_tokens = kAgentMaxTokens;
    req.system = "You are a team member of a reasoning team. " + (persona ? render_persona(*persona) + " " : std::string())
                 + "You are led by team leader Agent 1. Your role is to answer based on the leader's instruction to help solve the reasoning question.";
    req.messages.push_back(ChatMessage {
        Role::User,
        "Question: " + render_question(q) + "\nInstruction: " + std::string(instruction) + "\nAnswer: ___",
    });
    return req;
}

std::string hier_framing(const HierConfig& cfg, int agent_id)
{
    auto const layout = layout_for(cfg.shape);
    auto const persona = persona_of(cfg.personas, agent_id);
    auto const prefix = persona ? render_persona(*persona) + " " : std::string();
    if (agent_id == kLeaderId)
        return prefix + "You are the team leader of a reasoning team. The goal of the team is to answer reasoning questions as accurately as possible. "
               "You manage the following agents: " + describe_team(layout, layout.direct_reports(), cfg.personas) + ".";
    if (auto it = layout.reports.find(agent_id); it != layout.reports.end())
        return prefix + "You are a manager of a reasoning team reporting to the team leader. "
               "The goal of the team is to answer reasoning questions as accurately as possible. "
               "You manage the following agents: " + describe_team(layout, it->second, cfg.personas) + ".";
    return "You are a team member of a reasoning team. " + prefix
           + "You are led by team leader Agent 1. Your role is to answer based on the leader's instruction to help solve the reasoning question.";
}

Transcript run_hier(const Question& q, const HierConfig& cfg, Backend& backend)
{
    validate(cfg);
    auto const labels = q.labels();
    auto const layout = layout_for(cfg.shape);
    auto const direct = layout.direct_reports();

    Transcript transcript;
    transcript.question_id = q.id;
    transcript.team_config_id = cfg.team_config_id.empty()
                                    ? "hier-" + to_string(cfg.shape) + "-r" + std::to_string(cfg.max_rounds)
                                    : cfg.team_config_id;
    transcript.structure = TeamStructure::Hierarchical;
    transcript.seed = cfg.seed;
    transcript.instructions.emplace();

    auto call = [&](ChatRequest req) {
        req.model_name = cfg.model_name;
        try
        {
            return backend.complete(req);
        }
        catch (const BackendError& e)
        {
            sort_turns(transcript.turns);
            throw IncompleteRun(e, transcript);
        }
    };
    auto instruction_turn = [](int id, int round, std::string raw) {
        AgentTurn t;
        t.agent_id = id;
        t.round = round;
        t.explanation = trim(raw);
        t.raw_text = std::move(raw);
        return t;
    };

    LeaderPromptContext leader_ctx;
    leader_ctx.instructs = direct;
    leader_ctx.team_description = describe_team(layout, direct, cfg.personas);
    leader_ctx.persona = persona_of(cfg.personas, kLeaderId);

    std::vector<AgentTurn> previous_members;
    for (int round = 0; round < cfg.max_rounds; ++round)
    {
        auto const phase = round == 0 ? LeaderPhase::Initial : LeaderPhase::Refine;
        auto leader_text = call(build_leader_prompt(phase, q, previous_members, leader_ctx));
        auto const top = parse_instructions(leader_text, direct, round);
        transcript.turns.push_back(instruction_turn(kLeaderId, round, std::move(leader_text)));
        for (const auto& [id, text]: top.entries)
            transcript.instructions->push_back(Instruction { round, id, kLeaderId, text });

        std::map<int, std::string> member_instruction;
        if (layout.managers.empty())
            member_instruction = top.entries;
        else
        {
            for (auto manager: layout.managers)
            {
                auto const& team = layout.reports.at(manager);
                LeaderPromptContext mctx;
                mctx.manager = true;
                mctx.instructs = team;
                mctx.team_description = describe_team(layout, team, cfg.personas);
                mctx.persona = persona_of(cfg.personas, manager);
                mctx.upstream_instruction = top.entries.at(manager);

                std::vector<AgentTurn> team_answers;
                for (const auto& t: previous_members)
                    if (std::find(team.begin(), team.end(), t.agent_id) != team.end())
                        team_answers.push_back(t);

                auto manager_text = call(build_leader_prompt(phase, q, team_answers, mctx));
                auto const relayed = parse_instructions(manager_text, team, round);
                transcript.turns.push_back(instruction_turn(manager, round, std::move(manager_text)));
                for (const auto& [id, text]: relayed.entries)
                {
                    transcript.instructions->push_back(Instruction { round, id, manager, text });
                    member_instruction[id] = text;
                }
            }
        }

        std::vector<ChatRequest> requests;
        for (auto member: layout.members)
        {
            auto req = build_member_prompt(q, member_instruction.at(member), persona_of(cfg.personas, member));
            req.model_name = cfg.model_name;
            requests.push_back(std::move(req));
        }
        auto outcomes = complete_all(backend, requests);
        std::vector<AgentTurn> current;
        std::exception_ptr failure;
        for (std::size_t i = 0; i < layout.members.size(); ++i)
        {
            if (outcomes[i].error)
            {
                if (!failure)
                    failure = outcomes[i].error;
                continue;
            }
            current.push_back(make_turn(layout.members[i], round, std::move(outcomes[i].text), labels));
        }
        transcript.turns.insert(transcript.turns.end(), current.begin(), current.end());
        if (failure)
        {
            sort_turns(transcript.turns);
            try
            {
                std::rethrow_exception(failure);
            }
            catch (const BackendError& e)
            {
                throw IncompleteRun(e, transcript);
            }
        }
        previous_members = std::move(current);
    }

    auto final_req = build_leader_prompt(LeaderPhase::Final, q, previous_members, leader_ctx);
    auto final_text = call(final_req);
    auto answer = parse_answer(final_text, labels);
    if (!answer)
    {
        auto retry = final_req;
        retry.messages.push_back(ChatMessage { Role::Assistant, final_text });
        retry.messages.push_back(ChatMessage { Role::User, std::string(kReprompt) });
        auto second = call(retry);
        answer = parse_answer(second, labels);
        final_text += "\n\n" + second;
    }
    transcript.turns.push_back(make_turn(kLeaderId, cfg.max_rounds, std::move(final_text), labels));
    transcript.turns.back().answer = answer;
    sort_turns(transcript.turns);

    if (!answer)
    {
        transcript.status = RunStatus::Abstained;
        throw LeaderAbstained(transcript);
    }
    transcript.verdict = Verdict {
        .final_answer = *answer,
        .decided_by = DecidedBy::Leader,
        .rounds_used = cfg.max_rounds,
        .correct = *answer == q.gold,
    };
    return transcript;
}

std::optional<Label> member_majority(const Transcript& t, HierShape shape)
{
    auto const layout = layout_for(shape);
    int last = -1;
    for (const auto& turn: t.turns)
        if (std::find(layout.members.begin(), layout.members.end(), turn.agent_id) != layout.members.end())
            last = std::max(last, turn.round);
    std::vector<std::optional<Label>> answers;
    for (const auto& turn: t.turns)
        if (turn.round == last && std::find(layout.members.begin(), layout.members.end(), turn.agent_id) != layout.members.end())
            answers.push_back(turn.answer);
    try
    {
        return majority_vote(answers);
    }
    catch (const AllAbstained&)
    {
        return std::nullopt;
    }
}

} // namespace teamlab
