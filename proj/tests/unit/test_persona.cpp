// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include <teamlab/persona.hpp>
#include <teamlab/rng.hpp>

#include <doctest.h>

#include <set>

using namespace teamlab;

namespace
{

// Integer form of mean(1 - sum p^2): sum_d (n^2 - sum_c count^2) / (4 n^2).
double hand_gini(const std::vector<Persona>& team)
{
    long n = static_cast<long>(team.size());
    long numerator = 0;
    for (int d = 0; d < 4; ++d)
    {
        std::map<int, long> counts;
        for (const auto& p: team)
            ++counts[p.category(d)];
        long sq = 0;
        for (auto [c, k]: counts)
            sq += k * k;
        numerator += n * n - sq;
    }
    return static_cast<double>(numerator) / static_cast<double>(4 * n * n);
}

} // namespace

TEST_SUITE("persona")
{
    TEST_CASE("48 distinct personas in lexicographic order")
    {
        auto const all = enumerate_personas();
        CHECK(all.size() == 48);
        CHECK(std::set<Persona>(all.begin(), all.end()).size() == 48);
        CHECK(all.front() == Persona { Gender::Male, AgeBand::YoungAdult, Ethnicity::White, Occupation::WhiteCollar });
        CHECK(std::is_sorted(all.begin(), all.end()));
        for (std::size_t i = 0; i < all.size(); ++i)
            CHECK(all[i].index() == static_cast<int>(i));
    }

    TEST_CASE("render examples")
    {
        CHECK(render_persona({ Gender::Male, AgeBand::YoungAdult, Ethnicity::White, Occupation::BlueCollar })
              == "You are male and of age 18 to 24. You identify as white and work a blue collar job.");
        CHECK(render_persona({ Gender::Female, AgeBand::Senior, Ethnicity::Asian, Occupation::WhiteCollar })
              == "You are female and of age 55 and above. You identify as asian and work a white collar job.");
        CHECK(render_persona({ Gender::Male, AgeBand::YoungWorkingProfessional, Ethnicity::Black, Occupation::WhiteCollar })
                  .find("25 to 34")
              != std::string::npos);
        CHECK(render_persona({ Gender::Male, AgeBand::WorkingProfessional, Ethnicity::Black, Occupation::WhiteCollar })
                  .find("35 to 54")
              != std::string::npos);
        std::set<std::string> rendered;
        for (const auto& p: enumerate_personas())
            rendered.insert(render_persona(p));
        CHECK(rendered.size() == 48);
    }

    TEST_CASE("gini examples")
    {
        Persona base { Gender::Male, AgeBand::YoungAdult, Ethnicity::White, Occupation::WhiteCollar };
        std::vector<Persona> same { base, base, base };
        CHECK(gini_index(same) == 0.0);

        auto f = base;
        f.gender = Gender::Female;
        std::vector<Persona> genders { base, f, f };
        CHECK(gini_index(genders) == doctest::Approx(1.0 / 9.0).epsilon(1e-15));

        std::vector<Persona> spread { { Gender::Male, AgeBand::YoungAdult, Ethnicity::White, Occupation::WhiteCollar },
                                      { Gender::Male, AgeBand::YoungWorkingProfessional, Ethnicity::Black, Occupation::WhiteCollar },
                                      { Gender::Female, AgeBand::WorkingProfessional, Ethnicity::Asian, Occupation::BlueCollar } };
        CHECK(gini_index(spread) == doctest::Approx(5.0 / 9.0).epsilon(1e-15));
        CHECK_THROWS_AS((void)gini_index(std::vector<Persona> {}), ValidationError);
    }

    TEST_CASE("gini: hand formula, bounds and permutation invariance on random teams")
    {
        auto const space = enumerate_personas();
        Rng rng(99);
        for (int trial = 0; trial < 3000; ++trial)
        {
            auto const size = 1 + rng.below(7);
            std::vector<Persona> team;
            for (std::uint64_t i = 0; i < size; ++i)
                team.push_back(space[rng.below(48)]);
            auto const g = gini_index(team);
            REQUIRE(g == doctest::Approx(hand_gini(team)).epsilon(1e-12));
            CHECK(g >= 0.0);
            CHECK(g < 1.0);
            // Per-dimension bound 1 - 1/min(n, arity) caps the mean.
            double cap = 0;
            for (int d = 0; d < 4; ++d)
                cap += 1.0 - 1.0 / std::min<double>(static_cast<double>(size), kPersonaArity[static_cast<std::size_t>(d)]);
            CHECK(g <= cap / 4.0 + 1e-12);
            auto shuffled = team;
            rng.shuffle(shuffled);
            CHECK(gini_index(shuffled) == doctest::Approx(g).epsilon(1e-15));
            bool const identical = std::all_of(team.begin(), team.end(), [&](const Persona& p) { return p == team[0]; });
            CHECK((g == 0.0) == identical);
        }
    }

    TEST_CASE("stratified sample: 3 agents, 5 per stratum")
    {
        auto const a = stratified_sample(3, 5, 42);
        REQUIRE(a.teams.size() == 15);
        std::map<Stratum, int> per;
        for (const auto& t: a.teams)
        {
            ++per[t.stratum];
            CHECK(t.personas.size() == 3);
            CHECK(std::set<Persona>(t.personas.begin(), t.personas.end()).size() == 3);
            CHECK(t.gini == gini_index(t.personas));
            CHECK(classify(t.gini, a.low_cut, a.high_cut) == t.stratum);
        }
        CHECK(per[Stratum::Low] == 5);
        CHECK(per[Stratum::Medium] == 5);
        CHECK(per[Stratum::High] == 5);
        CHECK(a.low_cut <= a.high_cut);

        auto const b = stratified_sample(3, 5, 42);
        REQUIRE(b.teams.size() == a.teams.size());
        for (std::size_t i = 0; i < a.teams.size(); ++i)
        {
            CHECK(a.teams[i].personas == b.teams[i].personas);
            CHECK(a.teams[i].gini == b.teams[i].gini);
        }
        auto const c = stratified_sample(3, 5, 43);
        bool any_diff = false;
        for (std::size_t i = 0; i < a.teams.size(); ++i)
            any_diff = any_diff || a.teams[i].personas != c.teams[i].personas;
        CHECK(any_diff);
    }

    TEST_CASE("stratified sample errors")
    {
        CHECK_THROWS_AS((void)stratified_sample(49, 5, 0), InsufficientDistinct);
        CHECK_THROWS_AS((void)stratified_sample(1, 5, 0), ValidationError);
    }

    TEST_CASE("larger teams sample too")
    {
        for (int size: { 4, 5, 7 })
        {
            auto const s = stratified_sample(size, 5, 7);
            CHECK(s.teams.size() == 15);
        }
    }

    TEST_CASE("team sample JSON round-trip")
    {
        auto const s = stratified_sample(5, 2, 3);
        for (const auto& t: s.teams)
        {
            auto const back = team_sample_from_json(Json::parse(to_json(t).dump()));
            CHECK(back.personas == t.personas);
            CHECK(back.gini == t.gini);
            CHECK(back.stratum == t.stratum);
        }
    }
}
