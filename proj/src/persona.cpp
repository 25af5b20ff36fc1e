// SPDX-License-Identifier: Apache-2.0
#include <teamlab/persona.hpp>
#include <teamlab/rng.hpp>

#include <algorithm>
#include <set>

namespace teamlab
{

namespace
{

constexpr std::array<const char*, 2> kGenderNames { "male", "female" };
constexpr std::array<const char*, 4> kAgeNames { "young adult", "young working professional", "working professional", "senior" };
constexpr std::array<const char*, 4> kAgeRanges { "18 to 24", "25 to 34", "35 to 54", "55 and above" };
constexpr std::array<const char*, 3> kEthnicityNames { "White", "Black", "Asian" };
constexpr std::array<const char*, 3> kEthnicityLower { "white", "black", "asian" };
constexpr std::array<const char*, 2> kOccupationNames { "white-collar", "blue-collar" };
constexpr std::array<const char*, 2> kOccupationPhrase { "white collar", "blue collar" };

template <std::size_t N>
int index_of(const std::array<const char*, N>& names, const std::string& value, const char* field)
{
    for (std::size_t i = 0; i < N; ++i)
        if (value == names[i])
            return static_cast<int>(i);
    throw ValidationError(ValidationError::Kind::InvalidConfig, field, "unknown value '" + value + "'");
}

} // namespace

int Persona::category(int d) const
{
    switch (d)
    {
        case 0: return static_cast<int>(gender);
        case 1: return static_cast<int>(age);
        case 2: return static_cast<int>(ethnicity);
        default: return static_cast<int>(occupation);
    }
}

int Persona::index() const
{
    return ((category(0) * 4 + category(1)) * 3 + category(2)) * 2 + category(3);
}

std::vector<Persona> enumerate_personas()
{
    std::vector<Persona> out;
    out.reserve(kPersonaSpaceSize);
    for (int g = 0; g < 2; ++g)
        for (int a = 0; a < 4; ++a)
            for (int e = 0; e < 3; ++e)
                for (int o = 0; o < 2; ++o)
                    out.push_back(Persona {
                        static_cast<Gender>(g),
                        static_cast<AgeBand>(a),
                        static_cast<Ethnicity>(e),
                        static_cast<Occupation>(o),
                    });
    return out;
}

std::string render_persona(const Persona& p)
{
    return std::string("You are ") + kGenderNames[p.category(0)] + " and of age " + kAgeRanges[p.category(1)]
           + ". You identify as " + kEthnicityLower[p.category(2)] + " and work a " + kOccupationPhrase[p.category(3)]
           + " job.";
}

std::string describe_persona(const Persona& p)
{
    return std::string(kGenderNames[p.category(0)]) + ", " + kAgeRanges[p.category(1)] + ", "
           + kEthnicityNames[p.category(2)] + ", " + kOccupationPhrase[p.category(3)];
}

double gini_index(std::span<const Persona> team)
{
    if (team.empty())
        throw ValidationError(ValidationError::Kind::PreconditionViolated, "team", "must be nonempty");
    auto const n = static_cast<double>(team.size());
    double total = 0.0;
    for (int d = 0; d < 4; ++d)
    {
        std::array<int, 4> counts {};
        for (const auto& p: team)
            ++counts[static_cast<std::size_t>(p.category(d))];
        double sum_sq = 0.0;
        for (int c: counts)
            sum_sq += (c / n) * (c / n);
        total += 1.0 - sum_sq;
    }
    return total / 4.0;
}

std::string to_string(Stratum s)
{
    switch (s)
    {
        case Stratum::Low: return "low";
        case Stratum::Medium: return "medium";
        case Stratum::High: return "high";
    }
    return "?";
}

Stratum classify(double gini, double low_cut, double high_cut)
{
    if (gini < low_cut)
        return Stratum::Low;
    if (gini < high_cut)
        return Stratum::Medium;
    return Stratum::High;
}

StratifiedSample stratified_sample(int team_size, int k_per_stratum, std::uint64_t seed)
{
    if (team_size > kPersonaSpaceSize)
        throw InsufficientDistinct("team of " + std::to_string(team_size) + " needs more than 48 distinct personas");
    if (team_size < 2)
        throw ValidationError(ValidationError::Kind::PreconditionViolated, "team_size", "must be at least 2");
    if (k_per_stratum < 1)
        throw ValidationError(ValidationError::Kind::PreconditionViolated, "k_per_stratum", "must be at least 1");

    auto const space = enumerate_personas();
    Rng rng(derive_seed(seed, "stratified_sample"));

    std::vector<std::vector<Persona>> pool;
    std::vector<double> ginis;
    pool.reserve(kCandidatePoolSize);
    ginis.reserve(kCandidatePoolSize);
    for (std::size_t i = 0; i < kCandidatePoolSize; ++i)
    {
        std::vector<Persona> team;
        for (auto idx: rng.sample_indices(space.size(), static_cast<std::size_t>(team_size)))
            team.push_back(space[idx]);
        ginis.push_back(gini_index(team));
        pool.push_back(std::move(team));
    }

    auto sorted = ginis;
    std::sort(sorted.begin(), sorted.end());
    StratifiedSample out;
    out.low_cut = sorted[kCandidatePoolSize / 3];
    out.high_cut = sorted[2 * kCandidatePoolSize / 3];

    for (auto const stratum: { Stratum::Low, Stratum::Medium, Stratum::High })
    {
        std::set<std::vector<Persona>> taken;
        int got = 0;
        for (std::size_t i = 0; i < pool.size() && got < k_per_stratum; ++i)
        {
            if (classify(ginis[i], out.low_cut, out.high_cut) != stratum)
                continue;
            auto key = pool[i];
            std::sort(key.begin(), key.end());
            if (!taken.insert(key).second)
                continue;
            out.teams.push_back(TeamSample { pool[i], ginis[i], stratum });
            ++got;
        }
        if (got < k_per_stratum)
            throw InsufficientDistinct("only " + std::to_string(got) + " distinct " + to_string(stratum)
                                       + "-diversity teams in the candidate pool");
    }
    return out;
}

Json to_json(const Persona& p)
{
    Json j;
    j["gender"] = kGenderNames[p.category(0)];
    j["age"] = kAgeNames[p.category(1)];
    j["ethnicity"] = kEthnicityNames[p.category(2)];
    j["occupation"] = kOccupationNames[p.category(3)];
    return j;
}

Persona persona_from_json(const Json& j)
{
    return Persona {
        static_cast<Gender>(index_of(kGenderNames, j.at("gender").get<std::string>(), "gender")),
        static_cast<AgeBand>(index_of(kAgeNames, j.at("age").get<std::string>(), "age")),
        static_cast<Ethnicity>(index_of(kEthnicityNames, j.at("ethnicity").get<std::string>(), "ethnicity")),
        static_cast<Occupation>(index_of(kOccupationNames, j.at("occupation").get<std::string>(), "occupation")),
    };
}

Json to_json(const TeamSample& t)
{
    Json j;
    auto arr = Json::array();
    for (const auto& p: t.personas)
        arr.push_back(to_json(p));
    j["personas"] = std::move(arr);
    j["gini"] = t.gini;
    j["stratum"] = to_string(t.stratum);
    return j;
}

TeamSample team_sample_from_json(const Json& j)
{
    TeamSample t;
    for (const auto& p: j.at("personas"))
        t.personas.push_back(persona_from_json(p));
    t.gini = gini_index(t.personas);
    auto const s = j.at("stratum").get<std::string>();
    t.stratum = s == "high" ? Stratum::High : s == "medium" ? Stratum::Medium : Stratum::Low;
    return t;
}

} // namespace teamlab
