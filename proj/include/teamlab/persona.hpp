// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <teamlab/json_io.hpp>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace teamlab
{

enum class Gender : std::uint8_t
{
    Male,
    Female,
};

enum class AgeBand : std::uint8_t
{
    YoungAdult,
    YoungWorkingProfessional,
    WorkingProfessional,
    Senior,
};

enum class Ethnicity : std::uint8_t
{
    White,
    Black,
    Asian,
};

enum class Occupation : std::uint8_t
{
    WhiteCollar,
    BlueCollar,
};

/// Category counts per dimension: gender, age, ethnicity, occupation.
inline constexpr std::array<int, 4> kPersonaArity { 2, 4, 3, 2 };
inline constexpr int kPersonaSpaceSize = 2 * 4 * 3 * 2;

struct Persona
{
    Gender gender = Gender::Male;
    AgeBand age = AgeBand::YoungAdult;
    Ethnicity ethnicity = Ethnicity::White;
    Occupation occupation = Occupation::WhiteCollar;

    /// Category index on dimension d (0 gender, 1 age, 2 ethnicity, 3 occupation).
    [[nodiscard]] int category(int d) const;

    /// Position in the lexicographic enumeration, 0..47.
    [[nodiscard]] int index() const;

    auto operator<=>(const Persona&) const = default;
};

/// All 48 personas ordered by (gender, age, ethnicity, occupation).
[[nodiscard]] std::vector<Persona> enumerate_personas();

/// "You are male and of age 18 to 24. You identify as white and work a blue collar job."
[[nodiscard]] std::string render_persona(const Persona& p);

/// Short tag for team descriptions, e.g. "female, 55 and above, Asian, white collar".
[[nodiscard]] std::string describe_persona(const Persona& p);

/// Mean over the four dimensions of 1 - sum_c p_c^2. Team must be nonempty.
[[nodiscard]] double gini_index(std::span<const Persona> team);

enum class Stratum
{
    Low,
    Medium,
    High,
};

[[nodiscard]] std::string to_string(Stratum s);

struct TeamSample
{
    std::vector<Persona> personas;
    double gini = 0.0;
    Stratum stratum = Stratum::Low;
};

struct StratifiedSample
{
    std::vector<TeamSample> teams;
    /// Pool tertile cuts: low < low_cut <= medium < high_cut <= high.
    double low_cut = 0.0;
    double high_cut = 0.0;
};

inline constexpr std::size_t kCandidatePoolSize = 10'000;

[[nodiscard]] Stratum classify(double gini, double low_cut, double high_cut);

/// Draws k distinct teams per stratum (low, medium, high order) from a
/// seeded candidate pool whose gini tertiles define the strata.
[[nodiscard]] StratifiedSample stratified_sample(int team_size, int k_per_stratum, std::uint64_t seed);

Json to_json(const Persona& p);
Persona persona_from_json(const Json& j);
Json to_json(const TeamSample& t);
TeamSample team_sample_from_json(const Json& j);

} // namespace teamlab
