// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include <teamlab/elicitation.hpp>
#include <teamlab/rng.hpp>
#include <teamlab/scripted_backend.hpp>

#include <doctest.h>

using namespace teamlab;

namespace
{

ScoreSet likert(ProbePhase phase, std::map<int, int> scores)
{
    ScoreSet s;
    s.phase = phase;
    s.scores = std::move(scores);
    return s;
}

} // namespace

TEST_SUITE("elicitation")
{
    TEST_CASE("probe items")
    {
        auto const pre = probe_items(ProbePhase::Pre);
        REQUIRE(pre.size() == 5);
        CHECK(pre[0].kind == ProbeKind::Open);
        CHECK(pre[1].kind == ProbeKind::Open);
        for (std::size_t i = 2; i < 5; ++i)
            CHECK(pre[i].kind == ProbeKind::Likert);
        CHECK(pre[0].text == "What do you think is the primary goal of the team?");
        CHECK(pre[4].text == "How confident are you in the team’s ability to integrate diverse perspectives during the task?");

        auto const post = probe_items(ProbePhase::Post);
        REQUIRE(post.size() == 6);
        for (std::size_t i = 0; i < 6; ++i)
        {
            CHECK(post[i].kind == ProbeKind::Likert);
            CHECK(post[i].index == static_cast<int>(i) + 1);
        }
        CHECK(post[0].text == "How do you think your team performed to achieve the goal?");
        CHECK(post[3].text == "Were you able to understand your team members?");
    }

    TEST_CASE("parse_likert examples")
    {
        CHECK(parse_likert("1. 4\n2. 5", 5) == std::map<int, int> { { 1, 4 }, { 2, 5 } });
        CHECK(parse_likert("Q3: 2/5", 5) == std::map<int, int> { { 3, 2 } });
        CHECK(parse_likert("my score is high", 5).empty());
        CHECK_THROWS_AS((void)parse_likert("1. 4", 0), ValidationError);
    }

    TEST_CASE("parse_likert edge cases")
    {
        CHECK(parse_likert("1. 4\n1. 2", 5) == std::map<int, int> { { 1, 2 } });
        CHECK(parse_likert("1) 3\n2: 5", 5) == std::map<int, int> { { 1, 3 }, { 2, 5 } });
        CHECK(parse_likert("1. 7\n2. 0", 5).empty());
        CHECK(parse_likert("1. 4.5", 5).empty());
        CHECK(parse_likert("6. 4", 5).empty());
        CHECK(parse_likert("1. I would say **4** overall", 5) == std::map<int, int> { { 1, 4 } });
        CHECK(parse_likert("3. 4. 5. 5.", 5) == std::map<int, int> { { 3, 4 }, { 5, 5 } });
    }

    TEST_CASE("scripted agent answers are scored per item")
    {
        auto const s = score_response(ProbePhase::Pre, 2, "1. goal text 2. role text 3. 4 4. 5 5. 5");
        CHECK(s.scores == std::map<int, int> { { 3, 4 }, { 4, 5 }, { 5, 5 } });
        CHECK(s.free_text.at(1) == "goal text");
        CHECK(s.free_text.at(2) == "role text");
        CHECK(s.missing.empty());

        auto const omit = score_response(ProbePhase::Pre, 2, "1. solve it\n2. helper\n3. 4\n4. 5");
        CHECK(omit.missing == std::vector { 5 });
        CHECK_FALSE(omit.scores.contains(5));
    }

    TEST_CASE("pair_pre_post examples")
    {
        auto const pre = likert(ProbePhase::Pre, { { 3, 5 }, { 4, 5 }, { 5, 5 } });
        auto const post = likert(ProbePhase::Post, { { 2, 4 }, { 3, 4 }, { 4, 4 } });
        auto const d = pair_pre_post(pre, post);
        REQUIRE(d.size() == 3);
        CHECK(d[0] == ProbeDelta { 3, 2, -1 });
        CHECK(d[1] == ProbeDelta { 4, 3, -1 });
        CHECK(d[2] == ProbeDelta { 5, 4, -1 });

        auto const same = pair_pre_post(likert(ProbePhase::Pre, { { 3, 4 }, { 4, 4 }, { 5, 4 } }), post);
        for (const auto& x: same)
            CHECK(x.delta == 0);

        auto const two = pair_pre_post(likert(ProbePhase::Pre, { { 3, 5 }, { 4, 5 } }), post);
        CHECK(two.size() == 2);
    }

    TEST_CASE("pair_pre_post: at most three pairs, antisymmetric under swapped values")
    {
        Rng rng(4);
        for (int i = 0; i < 500; ++i)
        {
            std::map<int, int> a;
            std::map<int, int> b;
            for (int k = 0; k < 3; ++k)
            {
                if (rng.below(5) != 0)
                    a[3 + k] = 1 + static_cast<int>(rng.below(5));
                if (rng.below(5) != 0)
                    b[2 + k] = 1 + static_cast<int>(rng.below(5));
            }
            auto const d = pair_pre_post(likert(ProbePhase::Pre, a), likert(ProbePhase::Post, b));
            CHECK(d.size() <= 3);
            // Swap the values across phases: pre takes the post answers and vice versa.
            std::map<int, int> a2;
            std::map<int, int> b2;
            for (auto [k, v]: b)
                a2[k + 1] = v;
            for (auto [k, v]: a)
                b2[k - 1] = v;
            auto const e = pair_pre_post(likert(ProbePhase::Pre, a2), likert(ProbePhase::Post, b2));
            REQUIRE(e.size() == d.size());
            for (std::size_t j = 0; j < d.size(); ++j)
                CHECK(e[j].delta == -d[j].delta);
        }
    }

    TEST_CASE("probe prompts carry every question verbatim and no task content")
    {
        ProbeAgent agent { 1, "You are a reasoning agent 1. You are here to answer multiple choice reasoning questions." };
        auto const pre = build_probe_prompt(ProbePhase::Pre, agent, std::nullopt);
        CHECK(pre.system == agent.framing);
        auto const pre_text = flatten_prompt(pre);
        for (const auto& item: probe_items(ProbePhase::Pre))
            CHECK(pre_text.find(std::to_string(item.index) + ". " + std::string(item.text)) != std::string::npos);
        CHECK(pre_text.find("Question:") == std::string::npos);

        CHECK_THROWS_AS((void)build_probe_prompt(ProbePhase::Post, agent, std::nullopt), ValidationError);
        CHECK_THROWS_AS((void)build_probe_prompt(ProbePhase::Pre, agent, std::string("x")), ValidationError);

        Transcript t;
        t.turns.push_back({ 0, 0, "Answer: A", 'A', "", {} });
        t.verdict = Verdict { 'A', DecidedBy::Majority, 1, true };
        auto const summary = transcript_summary(t);
        CHECK(summary == "Your team worked through 1 round and gave the final answer A.");
        auto const post_text = flatten_prompt(build_probe_prompt(ProbePhase::Post, agent, summary));
        for (const auto& item: probe_items(ProbePhase::Post))
            CHECK(post_text.find(std::string(item.text)) != std::string::npos);
        CHECK(post_text.find(summary) != std::string::npos);

        Transcript none;
        none.turns.push_back({ 0, 1, "?", {}, "", {} });
        CHECK(transcript_summary(none) == "Your team worked through 2 rounds and did not reach a final answer.");
    }

    TEST_CASE("run_probe interviews each agent and never touches the transcript")
    {
        ScriptedBackend b(0,
                          { { ScriptRule::Match::Substring, { "agent 0.", "Before the task" }, "1. solve well 2. answerer 3. 5 4. 5 5. 5" },
                            { ScriptRule::Match::Substring, { "Before the task" }, "1. teamwork 2. critic 3. 3 4. 4" },
                            { ScriptRule::Match::Substring, { "The task is complete" }, "1. 4 2. 4 3. 4 4. 4 5. 3 6. 3" } });
        std::vector<ProbeAgent> agents { { 0, "You are a reasoning agent 0." }, { 1, "You are a reasoning agent 1." } };
        auto const pre = run_probe(ProbePhase::Pre, agents, b);
        REQUIRE(pre.size() == 2);
        CHECK(pre[0].agent_id == 0);
        CHECK(pre[0].scores == std::map<int, int> { { 3, 5 }, { 4, 5 }, { 5, 5 } });
        CHECK(pre[1].missing == std::vector { 5 });

        Transcript t;
        t.verdict = Verdict { 'B', DecidedBy::Majority, 2, false };
        auto const before = t;
        auto const post = run_probe(ProbePhase::Post, agents, b, transcript_summary(t));
        CHECK(t == before);
        CHECK(post[1].scores.size() == 6);
        CHECK(post[1].phase == ProbePhase::Post);
        auto const deltas = pair_pre_post(pre[0], post[0]);
        CHECK(deltas.size() == 3);
        CHECK(deltas[0].delta == -1);
    }

    struct Broken final: Backend
    {
        std::string complete(const ChatRequest&) override { throw BackendError(BackendError::Kind::Network, true, "down"); }
    };

    TEST_CASE("run_probe propagates backend errors")
    {
        Broken b;
        std::vector<ProbeAgent> agents { { 0, "x" } };
        CHECK_THROWS_AS((void)run_probe(ProbePhase::Pre, agents, b), BackendError);
    }
}
