// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include <teamlab/json_io.hpp>
#include <teamlab/rng.hpp>

#include <doctest.h>

using namespace teamlab;

TEST_SUITE("domain")
{
    TEST_CASE("parse_answer examples")
    {
        CHECK(parse_answer("Answer: A", "ABCDE") == 'A');
        CHECK(parse_answer("I lean B, but (C) is safer. Answer: C", "ABCDE") == 'C');
        CHECK_FALSE(parse_answer("no idea, sorry", "ABCDE").has_value());
    }

    TEST_CASE("parse_answer phrase variants and token fallback")
    {
        CHECK(parse_answer("The answer is B.", "ABCDE") == 'B');
        CHECK(parse_answer("answer: d", "ABCDE") == std::nullopt);
        CHECK(parse_answer("First (A), then B) and finally E. done", "ABCDE") == 'E');
        CHECK(parse_answer("I pick (B)", "ABCDE") == 'B');
        // A label outside the set is not an answer.
        CHECK_FALSE(parse_answer("Answer: F", "ABCDE").has_value());
        // The article "A" inside prose is not a token.
        CHECK_FALSE(parse_answer("A cat sat on the mat", "ABCDE").has_value());
        CHECK(parse_answer("Final Answer: B", "AB") == 'B');
    }

    TEST_CASE("parse_answer phrase wins over trailing tokens")
    {
        CHECK(parse_answer("Answer: A\nBut also consider (B).", "ABCDE") == 'A');
    }

    TEST_CASE("property: Answer: X followed by label-free text yields X")
    {
        Rng rng(11);
        const std::string alphabet = "abcdefghijklmnopqrstuvwxyz ,;!?\n0123456789";
        for (int trial = 0; trial < 2000; ++trial)
        {
            auto const n_labels = 2 + rng.below(25);
            std::string labels;
            for (std::uint64_t i = 0; i < n_labels; ++i)
                labels.push_back(static_cast<char>('A' + i));
            auto const x = labels[rng.below(n_labels)];
            std::string tail;
            auto const len = rng.below(80);
            for (std::uint64_t i = 0; i < len; ++i)
                tail.push_back(alphabet[rng.below(alphabet.size())]);
            auto const text = std::string("Answer: ") + x + "\n" + tail;
            REQUIRE(parse_answer(text, labels) == x);
            CHECK(parse_answer(text, labels) == parse_answer(text, labels));
        }
    }

    TEST_CASE("validate_question")
    {
        auto q = testing::make_question("cs-1", 5, 'C');
        CHECK_NOTHROW(validate_question(q));

        auto bad_gold = q;
        bad_gold.gold = 'F';
        try
        {
            validate_question(bad_gold);
            FAIL("expected GoldNotInOptions");
        }
        catch (const ValidationError& e)
        {
            CHECK(e.kind() == ValidationError::Kind::GoldNotInOptions);
            CHECK(e.field() == "gold");
        }

        auto one = testing::make_question("x", 1, 'A');
        try
        {
            validate_question(one);
            FAIL("expected TooFewOptions");
        }
        catch (const ValidationError& e)
        {
            CHECK(e.kind() == ValidationError::Kind::TooFewOptions);
            CHECK(e.field() == "options");
        }

        auto dup = q;
        dup.options[1].label = 'A';
        try
        {
            validate_question(dup);
            FAIL("expected DuplicateLabel");
        }
        catch (const ValidationError& e)
        {
            CHECK(e.kind() == ValidationError::Kind::DuplicateLabel);
        }
    }

    TEST_CASE("labels normalize to uppercase")
    {
        auto q = testing::make_question("x", 3, 'b');
        q.options[0].label = 'a';
        q.options[1].label = 'b';
        q.options[2].label = 'c';
        normalize_labels(q);
        CHECK(q.labels() == "ABC");
        CHECK(q.gold == 'B');
        CHECK_NOTHROW(validate_question(q));
    }

    TEST_CASE("confidence is read only when volunteered")
    {
        CHECK(parse_confidence("Answer: A. Confidence: 0.8") == doctest::Approx(0.8));
        CHECK(parse_confidence("confidence = 75%") == doctest::Approx(0.75));
        CHECK_FALSE(parse_confidence("Answer: A").has_value());
        CHECK_FALSE(parse_confidence("Confidence: 8/10").has_value());
        CHECK_FALSE(parse_confidence("Confidence: 3").has_value());
    }

    TEST_CASE("make_turn fills every field")
    {
        auto const t = make_turn(2, 1, "Explanation: it rains. Answer: B", "ABC");
        CHECK(t.agent_id == 2);
        CHECK(t.round == 1);
        CHECK(t.answer == 'B');
        CHECK(t.explanation == "it rains. Answer: B");
        CHECK_FALSE(t.confidence.has_value());
    }

    TEST_CASE("sort_turns orders by round then agent")
    {
        std::vector<AgentTurn> turns { { 2, 1, "c", {}, "", {} }, { 0, 1, "b", {}, "", {} }, { 1, 0, "a", {}, "", {} } };
        sort_turns(turns);
        CHECK(turns[0].raw_text == "a");
        CHECK(turns[1].raw_text == "b");
        CHECK(turns[2].raw_text == "c");
    }

    Transcript random_transcript(Rng & rng)
    {
        Transcript t;
        t.question_id = "q" + std::to_string(rng.below(1000));
        t.team_config_id = "cfg-" + std::to_string(rng.below(10));
        t.structure = rng.below(2) ? TeamStructure::Hierarchical : TeamStructure::Flat;
        auto const n = rng.below(6);
        for (std::uint64_t i = 0; i < n; ++i)
        {
            AgentTurn turn;
            turn.agent_id = static_cast<int>(rng.below(7));
            turn.round = static_cast<int>(rng.below(4));
            turn.raw_text = "text \"quoted\"\nline ’ " + std::to_string(i);
            if (rng.below(2))
                turn.answer = static_cast<char>('A' + rng.below(5));
            turn.explanation = "why " + std::to_string(i);
            if (rng.below(2))
                turn.confidence = static_cast<double>(rng.below(101)) / 100.0;
            t.turns.push_back(turn);
        }
        sort_turns(t.turns);
        if (t.structure == TeamStructure::Hierarchical)
        {
            t.instructions.emplace();
            t.instructions->push_back({ 0, 2, 1, "Focus on the premise." });
        }
        if (rng.below(4) != 0)
            t.verdict = Verdict { static_cast<char>('A' + rng.below(3)),
                                  t.structure == TeamStructure::Hierarchical ? DecidedBy::Leader : DecidedBy::Majority,
                                  1 + static_cast<int>(rng.below(4)),
                                  rng.below(2) == 1 };
        t.status = t.verdict ? RunStatus::Ok : (rng.below(2) ? RunStatus::Abstained : RunStatus::Timeout);
        if (rng.below(2))
        {
            ScoreSet s;
            s.agent_id = 1;
            s.scores = { { 3, 4 }, { 4, 5 } };
            s.free_text = { { 1, "be clear" } };
            s.missing = { 5 };
            s.raw_text = "1. be clear";
            t.pre_probe = std::vector { s };
            s.phase = ProbePhase::Post;
            t.post_probe = std::vector { s };
        }
        t.seed = rng.below(1u << 30) * 4096 + 17;
        return t;
    }

    TEST_CASE("property: transcript JSON round-trip")
    {
        Rng rng(5);
        for (int i = 0; i < 300; ++i)
        {
            auto const t = random_transcript(rng);
            auto const line = to_jsonl_line(to_json(t));
            CHECK(line.find('\n') == std::string::npos);
            auto const back = transcript_from_json(Json::parse(line));
            REQUIRE(back == t);
        }
    }

    TEST_CASE("transcript keys follow field names in a stable order")
    {
        Transcript t;
        t.question_id = "q1";
        auto const j = to_json(t);
        std::vector<std::string> keys;
        for (auto it = j.begin(); it != j.end(); ++it)
            keys.push_back(it.key());
        CHECK(keys
              == std::vector<std::string> { "question_id", "team_config_id", "structure", "turns", "instructions", "verdict", "status", "pre_probe", "post_probe", "seed" });
    }

    TEST_CASE("question JSON round-trip")
    {
        auto q = testing::make_question("ih-9", 3, 'C');
        q.dataset = DatasetId::IH;
        CHECK(question_from_json(to_json(q)) == q);
    }
}
