// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include <teamlab/datasets.hpp>
#include <teamlab/errors.hpp>

#include <doctest.h>

#include <fstream>
#include <map>
#include <set>

using namespace teamlab;

namespace
{

std::map<char, int> gold_counts(const std::vector<Question>& qs)
{
    std::map<char, int> counts;
    for (const auto& q: qs)
        ++counts[q.gold];
    return counts;
}

std::vector<Question> synthetic(int per_label_a, int per_label_b, int per_label_c)
{
    std::vector<Question> qs;
    int id = 0;
    auto add = [&](int n, char gold) {
        for (int i = 0; i < n; ++i)
        {
            auto q = testing::make_question("s" + std::to_string(id++), 3, gold);
            q.dataset = DatasetId::IH;
            qs.push_back(q);
        }
    };
    add(per_label_a, 'A');
    add(per_label_b, 'B');
    add(per_label_c, 'C');
    return qs;
}

void write_text(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary);
    out << text;
}

DatasetError::Kind kind_of(auto&& fn)
{
    try
    {
        fn();
    }
    catch (const DatasetError& e)
    {
        return e.kind();
    }
    FAIL("expected DatasetError");
    return DatasetError::Kind::Io;
}

} // namespace

TEST_SUITE("datasets")
{
    TEST_CASE("commonsense record maps choices and answer key")
    {
        auto const raw = Json::parse(R"({"answerKey":"A","id":"x1","question":{"stem":"Where is a bank?",
            "choices":[{"label":"A","text":"town"},{"label":"B","text":"sea"},{"label":"C","text":"sky"},
                       {"label":"D","text":"moon"},{"label":"E","text":"cave"}]}})");
        auto const q = adapt_record(DatasetId::CS, raw, 1);
        CHECK(q.id == "x1");
        CHECK(q.text == "Where is a bank?");
        CHECK(q.labels() == "ABCDE");
        CHECK(q.options[4].body == "cave");
        CHECK(q.gold == 'A');
        CHECK(q.dataset == DatasetId::CS);
    }

    TEST_CASE("yes/no record maps true to A")
    {
        auto const q = adapt_record(DatasetId::ST, Json::parse(R"({"qid":"s1","question":"Is ice cold?","answer":true})"), 1);
        CHECK(q.labels() == "AB");
        CHECK(q.options[0].body == "yes");
        CHECK(q.gold == 'A');
        auto const no = adapt_record(DatasetId::ST, Json::parse(R"({"qid":"s2","question":"Is fire cold?","answer":false})"), 2);
        CHECK(no.gold == 'B');
    }

    TEST_CASE("social record joins context and question")
    {
        auto const q = adapt_record(DatasetId::SQA,
                                    Json::parse(R"({"context":"Kai lent a pen.","question":"How does Kai feel?",
                                        "answerA":"kind","answerB":"sad","answerC":"tired","label":"2"})"),
                                    4);
        CHECK(q.text == "Kai lent a pen.\nHow does Kai feel?");
        CHECK(q.labels() == "ABC");
        CHECK(q.options[1].body == "sad");
        CHECK(q.gold == 'B');
    }

    TEST_CASE("hate record maps classes to three options")
    {
        auto const q = adapt_record(DatasetId::IH, Json::parse(R"({"ID":"h1","post":"some post","class":"implicit_hate"})"), 1);
        CHECK(q.labels() == "ABC");
        CHECK(q.gold == 'A');
        CHECK(q.text.find("some post") != std::string::npos);
        CHECK(adapt_record(DatasetId::IH, Json::parse(R"({"ID":"h2","post":"p","class":"explicit_hate"})"), 2).gold == 'B');
        CHECK(adapt_record(DatasetId::IH, Json::parse(R"({"ID":"h3","post":"p","class":"not_hate"})"), 3).gold == 'C');
    }

    TEST_CASE("unknown class or answer is rejected")
    {
        CHECK(kind_of([] { (void)adapt_record(DatasetId::IH, Json::parse(R"({"ID":"h","post":"p","class":"spam"})"), 3); })
              == DatasetError::Kind::UnknownLabel);
        CHECK(kind_of([] { (void)adapt_record(DatasetId::ST, Json::parse(R"({"qid":"s","question":"q","answer":"maybe"})"), 1); })
              == DatasetError::Kind::UnknownLabel);
    }

    TEST_CASE("malformed line reports its number")
    {
        testing::TempDir dir("ds-bad");
        auto const p = dir.path() / "bad.jsonl";
        write_text(p, R"({"ID":"h1","post":"p","class":"not_hate"})"
                      "\n{not json\n");
        try
        {
            (void)load_questions(DatasetId::IH, p);
            FAIL("expected MalformedRecord");
        }
        catch (const DatasetError& e)
        {
            CHECK(e.kind() == DatasetError::Kind::MalformedRecord);
            CHECK(e.line() == 2);
        }
    }

    TEST_CASE("missing file is an io error")
    {
        CHECK(kind_of([] { (void)load_questions(DatasetId::CS, "/nonexistent/none.jsonl"); }) == DatasetError::Kind::Io);
    }

    TEST_CASE("fixture files load in order")
    {
        auto const cs = load_questions(DatasetId::CS, testing::fixture("cs_dev.jsonl"));
        REQUIRE(cs.size() == 20);
        CHECK(cs.front().id == "cs-001");
        CHECK(cs.back().id == "cs-020");
        CHECK(gold_counts(cs)['A'] == 9);

        auto const ih = load_questions(DatasetId::IH, testing::fixture("ih_test.jsonl"));
        REQUIRE(ih.size() == 20);
        auto const counts = gold_counts(ih);
        CHECK(counts.at('A') == 9);
        CHECK(counts.at('B') == 4);
        CHECK(counts.at('C') == 7);

        CHECK(load_questions(DatasetId::ST, testing::fixture("st_dev.jsonl")).size() == 6);
        CHECK(load_questions(DatasetId::SQA, testing::fixture("sqa_dev.jsonl")).size() == 6);
    }

    TEST_CASE("per-class sampling gives exact counts")
    {
        auto const ih = load_questions(DatasetId::IH, testing::fixture("ih_test.jsonl"));
        auto const s = subsample(ih, Sampling::classes(4), 7);
        CHECK(s.size() == 12);
        for (const auto& [label, n]: gold_counts(s))
            CHECK(n == 4);
        CHECK(kind_of([&] { (void)subsample(ih, Sampling::classes(5), 7); }) == DatasetError::Kind::ClassTooSmall);
    }

    TEST_CASE("per-class sampling at production sizes")
    {
        auto const qs = synthetic(900, 650, 700);
        auto const big = subsample(qs, Sampling::classes(500), 1);
        CHECK(big.size() == 1500);
        for (const auto& [label, n]: gold_counts(big))
            CHECK(n == 500);
        auto const small = subsample(qs, Sampling::classes(100), 1);
        CHECK(small.size() == 300);
        for (const auto& [label, n]: gold_counts(small))
            CHECK(n == 100);
    }

    TEST_CASE("fraction sampling is sized and deterministic")
    {
        std::vector<Question> qs;
        for (int i = 0; i < 1000; ++i)
            qs.push_back(testing::make_question("q" + std::to_string(i), 2, 'A'));
        auto const a = subsample(qs, Sampling::share(0.1), 3);
        auto const b = subsample(qs, Sampling::share(0.1), 3);
        auto const c = subsample(qs, Sampling::share(0.1), 4);
        CHECK(a.size() == 100);
        CHECK(a == b);
        CHECK(a != c);
        CHECK(subsample(qs, Sampling::share(0.15), 3).size() == 150);
    }

    TEST_CASE("property: samples are ordered subsets without repeats")
    {
        auto const qs = synthetic(40, 30, 35);
        std::map<std::string, std::size_t> position;
        for (std::size_t i = 0; i < qs.size(); ++i)
            position[qs[i].id] = i;
        for (std::uint64_t seed = 0; seed < 50; ++seed)
        {
            for (auto const& sampling: { Sampling::classes(1 + static_cast<int>(seed % 30)), Sampling::share(0.05 + 0.018 * static_cast<double>(seed)) })
            {
                auto const s = subsample(qs, sampling, seed);
                std::set<std::string> seen;
                std::size_t last = 0;
                for (std::size_t i = 0; i < s.size(); ++i)
                {
                    REQUIRE(seen.insert(s[i].id).second);
                    auto const pos = position.at(s[i].id);
                    if (i > 0)
                        REQUIRE(pos > last);
                    last = pos;
                }
            }
        }
    }

    TEST_CASE("full sampling returns everything")
    {
        auto const qs = synthetic(3, 2, 1);
        CHECK(subsample(qs, Sampling::full(), 9) == qs);
    }

    TEST_CASE("save then load is the identity")
    {
        testing::TempDir dir("ds-rt");
        auto const cs = load_questions(DatasetId::CS, testing::fixture("cs_dev.jsonl"));
        auto const p = dir.path() / "norm.jsonl";
        save_questions(p, cs);
        CHECK(load_questions(DatasetId::CS, p) == cs);
        auto const ih = load_questions(DatasetId::IH, testing::fixture("ih_test.jsonl"));
        save_questions(p, ih);
        CHECK(load_questions(DatasetId::IH, p) == ih);
    }

    TEST_CASE("load applies the sampling spec")
    {
        DatasetSpec spec;
        spec.dataset = DatasetId::IH;
        spec.split = "test";
        spec.path = testing::fixture("ih_test.jsonl");
        spec.sampling = Sampling::classes(3);
        spec.seed = 11;
        auto const a = load(spec);
        CHECK(a.size() == 9);
        CHECK(load(spec) == a);
    }

    TEST_CASE("sampling strings")
    {
        CHECK(sampling_from_string("full") == Sampling::full());
        CHECK(sampling_from_string("per_class:500") == Sampling::classes(500));
        CHECK(sampling_from_string("fraction:0.25") == Sampling::share(0.25));
        CHECK(sampling_from_string("fraction").fraction == doctest::Approx(kDefaultFraction));
        CHECK(sampling_from_string(to_string(Sampling::classes(7))) == Sampling::classes(7));
        CHECK(sampling_from_string(to_string(Sampling::share(0.1))) == Sampling::share(0.1));
        CHECK_THROWS((void)sampling_from_string("sometimes"));
        CHECK_THROWS_AS(validate(Sampling::share(1.5)), ValidationError);
        CHECK_THROWS_AS(validate(Sampling::classes(0)), ValidationError);
    }
}
