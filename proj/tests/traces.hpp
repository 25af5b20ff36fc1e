// SPDX-License-Identifier: Apache-2.0
// Hand-traced team runs on scripted backends. Each scenario spells out the
// full expected transcript and returns a list of mismatches (empty on pass).
#pragma once

#include <teamlab/flat_debate.hpp>
#include <teamlab/hier_delegation.hpp>
#include <teamlab/json_io.hpp>
#include <teamlab/scripted_backend.hpp>

#include <algorithm>
#include <string>
#include <vector>

namespace traces
{

using namespace teamlab;

using Failures = std::vector<std::string>;

inline Question door_question()
{
    Question q;
    q.id = "trace-door";
    q.text = "A revolving door is convenient for two direction travel, but it also serves as a security measure at a what?";
    q.options = { { 'A', "bank" }, { 'B', "library" }, { 'C', "department store" }, { 'D', "mall" }, { 'E', "new york" } };
    q.gold = 'A';
    q.dataset = DatasetId::CS;
    return q;
}

inline ScriptRule rule(std::vector<std::string> patterns, std::string response)
{
    return ScriptRule { ScriptRule::Match::Substring, std::move(patterns), std::move(response) };
}

inline AgentTurn turn(int agent, int round, const std::string& raw, std::optional<Label> answer)
{
    return AgentTurn { agent, round, raw, answer, trim(raw), std::nullopt };
}

inline void compare(Failures& f, const Transcript& got, const Transcript& want)
{
    if (got == want)
        return;
    f.push_back("transcript differs\n  got:  " + to_json(got).dump() + "\n  want: " + to_json(want).dump());
}

inline void expect(Failures& f, bool ok, const std::string& what)
{
    if (!ok)
        f.push_back(what);
}

inline bool contains(const std::string& hay, const std::string& needle)
{
    return hay.find(needle) != std::string::npos;
}

/// Unanimous round 0 ends the debate before any refinement prompt.
inline Failures flat_unanimous_early_exit()
{
    Failures f;
    auto const q = door_question();
    ScriptedBackend inner(0, { rule({ "Answer: ___" }, "A bank uses it for security. Answer: A") });
    RecordingBackend backend(inner);
    FlatConfig cfg;
    cfg.n_agents = 3;
    cfg.max_rounds = 3;
    auto const got = run_flat_debate(q, cfg, backend);

    auto const raw = std::string("A bank uses it for security. Answer: A");
    Transcript want;
    want.question_id = q.id;
    want.team_config_id = "flat-n3-r3";
    want.structure = TeamStructure::Flat;
    want.turns = { turn(0, 0, raw, 'A'), turn(1, 0, raw, 'A'), turn(2, 0, raw, 'A') };
    want.verdict = Verdict { 'A', DecidedBy::Majority, 1, true };
    compare(f, got, want);
    expect(f, backend.exchanges().size() == 3, "expected exactly 3 backend calls");
    return f;
}

/// Agent 2 dissents in round 0 and converts after seeing the team's answers.
inline Failures flat_dissent_converts()
{
    Failures f;
    auto const q = door_question();
    ScriptedBackend inner(0,
                          { rule({ "reasoning agent 2.", "Please answer the following" }, "Perhaps a library. Answer: B"),
                            rule({ "Answer: ___" }, "Answer: A") });
    RecordingBackend backend(inner);
    FlatConfig cfg;
    cfg.n_agents = 3;
    cfg.max_rounds = 2;
    auto const got = run_flat_debate(q, cfg, backend);

    Transcript want;
    want.question_id = q.id;
    want.team_config_id = "flat-n3-r2";
    want.turns = { turn(0, 0, "Answer: A", 'A'),
                   turn(1, 0, "Answer: A", 'A'),
                   turn(2, 0, "Perhaps a library. Answer: B", 'B'),
                   turn(0, 1, "Answer: A", 'A'),
                   turn(1, 1, "Answer: A", 'A'),
                   turn(2, 1, "Answer: A", 'A') };
    want.verdict = Verdict { 'A', DecidedBy::Majority, 2, true };
    compare(f, got, want);

    auto const log = backend.exchanges();
    expect(f, log.size() == 6, "expected 6 backend calls");
    int final_prompts = 0;
    for (const auto& ex: log)
    {
        auto const text = flatten_prompt(ex.request);
        if (!contains(text, "Come to a consensus on the best final answer"))
            continue;
        ++final_prompts;
        expect(f,
               contains(text, "Agent 0: Answer: A\n\nAgent 1: Answer: A\n\nAgent 2: Perhaps a library. Answer: B"),
               "final prompt must embed all round-0 answers in agent order");
    }
    expect(f, final_prompts == 3, "round 1 must use the consensus prompt for all three agents");
    return f;
}

/// Persistent split over three rounds with an abstention in round 0.
inline Failures flat_split_majority()
{
    Failures f;
    auto const q = door_question();
    ScriptedBackend inner(0,
                          { rule({ "reasoning agent 0." }, "Answer: A"),
                            rule({ "reasoning agent 1." }, "Answer: C"),
                            rule({ "reasoning agent 2.", "Please answer the following" }, "I am not sure."),
                            rule({ "reasoning agent 2." }, "Answer: C") });
    RecordingBackend backend(inner);
    FlatConfig cfg;
    cfg.n_agents = 3;
    cfg.max_rounds = 3;
    auto const got = run_flat_debate(q, cfg, backend);

    Transcript want;
    want.question_id = q.id;
    want.team_config_id = "flat-n3-r3";
    want.turns = { turn(0, 0, "Answer: A", 'A'), turn(1, 0, "Answer: C", 'C'), turn(2, 0, "I am not sure.", std::nullopt),
                   turn(0, 1, "Answer: A", 'A'), turn(1, 1, "Answer: C", 'C'), turn(2, 1, "Answer: C", 'C'),
                   turn(0, 2, "Answer: A", 'A'), turn(1, 2, "Answer: C", 'C'), turn(2, 2, "Answer: C", 'C') };
    want.verdict = Verdict { 'C', DecidedBy::Majority, 3, false };
    compare(f, got, want);

    int refine = 0;
    int final = 0;
    for (const auto& ex: backend.exchanges())
    {
        auto const text = flatten_prompt(ex.request);
        if (contains(text, "Here are your previous answers from your team"))
        {
            ++refine;
            expect(f, contains(text, "Agent 2: (no answer)"), "abstaining slot must read (no answer)");
        }
        if (contains(text, "Come to a consensus on the best final answer"))
        {
            ++final;
            expect(f, contains(text, "Agent 0: Answer: A\n\nAgent 1: Answer: C\n\nAgent 2: Answer: C"), "final prompt embeds round-1 answers");
        }
    }
    expect(f, refine == 3 && final == 3, "expected one refine and one final round");
    return f;
}

inline std::vector<Instruction> l1_instructions(int round, const std::vector<std::string>& texts)
{
    return { { round, 2, kLeaderId, texts[0] }, { round, 3, kLeaderId, texts[1] }, { round, 4, kLeaderId, texts[2] } };
}

/// Leader delegates, members split A/C/A, leader confirms A.
inline Failures hier_l1_delegation()
{
    Failures f;
    auto const q = door_question();
    auto const plan = std::string("Agent 2: Focus on the security aspect.\nAgent 3: Consider common locations.\nAgent 4: Check the question wording.");
    ScriptedBackend inner(0,
                          { rule({ "Final Answer: ___" }, "Final Answer: A. bank"),
                            rule({ "You are the team leader" }, plan),
                            rule({ "Instruction: Focus on the security aspect." }, "Security matters most at a bank. Answer: A"),
                            rule({ "Instruction: Consider common locations." }, "Stores have them too. Answer: C"),
                            rule({ "Instruction: Check the question wording." }, "Answer: A") });
    RecordingBackend backend(inner);
    HierConfig cfg;
    cfg.shape = HierShape::L1;
    cfg.max_rounds = 2;
    auto const got = run_hier(q, cfg, backend);

    auto const m2 = std::string("Security matters most at a bank. Answer: A");
    auto const m3 = std::string("Stores have them too. Answer: C");
    Transcript want;
    want.question_id = q.id;
    want.team_config_id = "hier-L1-r2";
    want.structure = TeamStructure::Hierarchical;
    want.turns = { turn(1, 0, plan, std::nullopt), turn(2, 0, m2, 'A'), turn(3, 0, m3, 'C'), turn(4, 0, "Answer: A", 'A'),
                   turn(1, 1, plan, std::nullopt), turn(2, 1, m2, 'A'), turn(3, 1, m3, 'C'), turn(4, 1, "Answer: A", 'A'),
                   turn(1, 2, "Final Answer: A. bank", 'A') };
    std::vector<std::string> texts { "Focus on the security aspect.", "Consider common locations.", "Check the question wording." };
    want.instructions = l1_instructions(0, texts);
    for (auto& i: l1_instructions(1, texts))
        want.instructions->push_back(i);
    want.verdict = Verdict { 'A', DecidedBy::Leader, 2, true };
    compare(f, got, want);

    bool saw_refine = false;
    for (const auto& ex: backend.exchanges())
    {
        auto const text = flatten_prompt(ex.request);
        if (contains(text, "under 10 words"))
        {
            saw_refine = true;
            expect(f, contains(text, "Agent 2: " + m2 + "\n\nAgent 3: " + m3 + "\n\nAgent 4: Answer: A"), "leader refine prompt embeds member answers in order");
        }
    }
    expect(f, saw_refine, "round 1 leader prompt must be a refinement prompt");
    expect(f, member_majority(got, HierShape::L1) == 'A', "member majority should be A");
    return f;
}

/// Unstructured leader text is broadcast; members all say B; leader overrules with D.
inline Failures hier_l1_veto()
{
    Failures f;
    auto const q = door_question();
    auto const plan = std::string("Everyone, think carefully about where security matters.");
    ScriptedBackend inner(0,
                          { rule({ "Final Answer: ___" }, "Final Answer: D"),
                            rule({ "You are the team leader" }, plan),
                            rule({ "You are a team member" }, "Answer: B") });
    HierConfig cfg;
    cfg.shape = HierShape::L1;
    cfg.max_rounds = 3;
    auto const got = run_hier(q, cfg, inner);

    Transcript want;
    want.question_id = q.id;
    want.team_config_id = "hier-L1-r3";
    want.structure = TeamStructure::Hierarchical;
    want.instructions.emplace();
    for (int r = 0; r < 3; ++r)
    {
        want.turns.push_back(turn(1, r, plan, std::nullopt));
        for (int m = 2; m <= 4; ++m)
            want.turns.push_back(turn(m, r, "Answer: B", 'B'));
        for (auto& i: l1_instructions(r, { plan, plan, plan }))
            want.instructions->push_back(i);
    }
    want.turns.push_back(turn(1, 3, "Final Answer: D", 'D'));
    want.verdict = Verdict { 'D', DecidedBy::Leader, 3, false };
    compare(f, got, want);

    bool differs_from_all = true;
    for (const auto& t: got.turns)
        if (t.agent_id != kLeaderId && t.answer == 'D')
            differs_from_all = false;
    expect(f, differs_from_all, "leader answer should differ from every member");
    expect(f, member_majority(got, HierShape::L1) == 'B', "member majority should be B");
    return f;
}

/// Leader instructs two managers, each relays to its two members.
inline Failures hier_l2_two_tier()
{
    Failures f;
    auto const q = door_question();
    auto const top = std::string("Agent 2: Handle the location angle.\nAgent 3: Handle the wording angle.");
    auto const mid2 = std::string("Agent 4: List likely places.\nAgent 5: Rank places by security.");
    auto const mid3 = std::string("Agent 6: Parse the wording.\nAgent 7: Spot the trick.");
    ScriptedBackend inner(0,
                          { rule({ "Final Answer: ___" }, "Final Answer: C"),
                            rule({ "You are the team leader" }, top),
                            rule({ "You are a manager", "Leader's Instruction: Handle the location angle." }, mid2),
                            rule({ "You are a manager", "Leader's Instruction: Handle the wording angle." }, mid3),
                            rule({ "Instruction: List likely places." }, "Answer: A"),
                            rule({ "Instruction: Rank places by security." }, "Answer: C"),
                            rule({ "Instruction: Parse the wording." }, "Answer: C"),
                            rule({ "Instruction: Spot the trick." }, "Answer: C") });
    RecordingBackend backend(inner);
    HierConfig cfg;
    cfg.shape = HierShape::L2;
    cfg.max_rounds = 2;
    auto const got = run_hier(q, cfg, backend);

    Transcript want;
    want.question_id = q.id;
    want.team_config_id = "hier-L2-r2";
    want.structure = TeamStructure::Hierarchical;
    want.instructions.emplace();
    for (int r = 0; r < 2; ++r)
    {
        want.turns.push_back(turn(1, r, top, std::nullopt));
        want.turns.push_back(turn(2, r, mid2, std::nullopt));
        want.turns.push_back(turn(3, r, mid3, std::nullopt));
        want.turns.push_back(turn(4, r, "Answer: A", 'A'));
        want.turns.push_back(turn(5, r, "Answer: C", 'C'));
        want.turns.push_back(turn(6, r, "Answer: C", 'C'));
        want.turns.push_back(turn(7, r, "Answer: C", 'C'));
        want.instructions->push_back({ r, 2, 1, "Handle the location angle." });
        want.instructions->push_back({ r, 3, 1, "Handle the wording angle." });
        want.instructions->push_back({ r, 4, 2, "List likely places." });
        want.instructions->push_back({ r, 5, 2, "Rank places by security." });
        want.instructions->push_back({ r, 6, 3, "Parse the wording." });
        want.instructions->push_back({ r, 7, 3, "Spot the trick." });
    }
    want.turns.push_back(turn(1, 2, "Final Answer: C", 'C'));
    want.verdict = Verdict { 'C', DecidedBy::Leader, 2, false };
    compare(f, got, want);

    // Each member instruction traces to a manager turn, which traces to a leader turn, in the same round.
    auto const layout = layout_for(HierShape::L2);
    for (const auto& ins: *got.instructions)
    {
        if (ins.issuer == kLeaderId)
            continue;
        auto const& team = layout.reports.at(ins.issuer);
        expect(f, std::find(team.begin(), team.end(), ins.agent_id) != team.end(), "member instruction issued by a foreign manager");
        auto has_turn = [&](int id) {
            return std::any_of(got.turns.begin(), got.turns.end(), [&](const AgentTurn& t) { return t.agent_id == id && t.round == ins.round; });
        };
        expect(f, has_turn(ins.issuer) && has_turn(kLeaderId), "instruction chain broken");
    }

    for (const auto& ex: backend.exchanges())
    {
        auto const text = flatten_prompt(ex.request);
        if (contains(text, "Leader's Instruction: Handle the location angle.") && contains(text, "Team Members’ Answers"))
        {
            expect(f, contains(text, "Agent 4: Answer: A\n\nAgent 5: Answer: C"), "manager 2 sees its own members");
            expect(f, !contains(text, "Agent 6"), "manager 2 must not see manager 3's members");
        }
        if (contains(text, "You are the team leader") && contains(text, "Team Members’ Answers"))
            expect(f,
                   contains(text, "Agent 4: Answer: A\n\nAgent 5: Answer: C\n\nAgent 6: Answer: C\n\nAgent 7: Answer: C"),
                   "leader refine prompt carries raw member answers upward");
    }
    return f;
}

} // namespace traces
