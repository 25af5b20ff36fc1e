// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <teamlab/backend.hpp>
#include <teamlab/domain.hpp>
#include <teamlab/json_io.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace teamlab
{

inline constexpr std::size_t kJudgeDims = 5;

/// comprehension, coordination, reasoning_strength, coherence, confidence
[[nodiscard]] std::span<const std::string_view> judge_dimension_names();

/// The five rating questions, in dimension order.
[[nodiscard]] std::span<const std::string_view> judge_questions();

/// Scale anchors plus per-dimension improvement and decline descriptors.
[[nodiscard]] std::string_view scoring_guide();

struct JudgeScore
{
    std::string transcript_id;
    std::array<int, kJudgeDims> dims {};
    std::string rationale;

    bool operator==(const JudgeScore&) const = default;
};

Json to_json(const JudgeScore& s);
JudgeScore judge_score_from_json(const Json& j);

struct Exemplar
{
    std::string excerpt;
    /// Mean human score per dimension.
    std::array<double, kJudgeDims> scores {};
};

struct CalibrationSet
{
    std::vector<Exemplar> exemplars;

    [[nodiscard]] std::size_t size() const noexcept { return exemplars.size(); }
};

inline constexpr std::size_t kDefaultCalibrationSize = 12;
inline constexpr std::size_t kExcerptChars = 4000;

/// JSONL rows {"excerpt": "...", "scores": [s1..s5]}; "transcript" (a
/// serialized Transcript) may stand in for "excerpt".
[[nodiscard]] CalibrationSet load_calibration(const std::filesystem::path& path);

/// Picks `n` exemplars spread evenly over the ranking by mean score, so the
/// chosen set keeps the pool's score distribution.
[[nodiscard]] CalibrationSet select_calibration(const CalibrationSet& pool, std::size_t n = kDefaultCalibrationSize);

/// The conversation as the judge reads it: one line per turn, tagged with
/// round and agent, then leader instructions and the verdict.
[[nodiscard]] std::string render_conversation(const Transcript& t);

/// The last `max_chars` of the rendered conversation, where the decisive
/// rounds are.
[[nodiscard]] std::string conversation_excerpt(const Transcript& t, std::size_t max_chars = kExcerptChars);

struct JudgeConfig
{
    std::string model_name = "gpt-4o";
    double temperature = kDefaultTemperature;
    int max_tokens = kAgentMaxTokens;
};

/// Throws ValidationError when the calibration set is empty.
[[nodiscard]] ChatRequest build_judge_prompt(const Transcript& t, const CalibrationSet& cal, const JudgeConfig& cfg = {});

/// All five numbered scores in [1,5], or nothing.
[[nodiscard]] std::optional<std::array<int, kJudgeDims>> parse_judge_scores(std::string_view text);

/// Rates one transcript, reprompting once on an unparseable reply.
/// Throws JudgeUnparseable when the second reply fails too.
[[nodiscard]] JudgeScore judge_transcript(const Transcript& t,
                                          const CalibrationSet& cal,
                                          Backend& backend,
                                          const JudgeConfig& cfg = {},
                                          std::string transcript_id = {});

/// Stratified-uniform draw of `n` indices over the distinct cell keys
/// (structure x diversity x model x dataset). Quotas are equal; cells
/// smaller than their quota give the remainder to the others. Returned
/// indices are ascending.
[[nodiscard]] std::vector<std::size_t> sample_for_judging(std::span<const std::string> cell_keys,
                                                          std::size_t n,
                                                          std::uint64_t seed);

inline constexpr std::size_t kDefaultJudgeSample = 2500;

struct ScoreVector
{
    std::string transcript_id;
    std::array<double, kJudgeDims> dims {};
};

/// Annotator-mean scores from a CSV with columns transcript_id,
/// annotator_id, q1..q5, in first-appearance order.
[[nodiscard]] std::vector<ScoreVector> load_human_scores(const std::filesystem::path& path);

struct Agreement
{
    /// Per dimension; absent where either side has no variance.
    std::array<std::optional<double>, kJudgeDims> rho;
    /// Over all (transcript, dimension) cells.
    std::optional<double> pooled_rho;
    double exact_match = 0.0;
    double within_one = 0.0;
    std::size_t n = 0;
};

/// Vectors are aligned by transcript id. Throws StatsError(LengthMismatch)
/// on differing lengths or id sets.
[[nodiscard]] Agreement agreement(std::span<const ScoreVector> human, std::span<const ScoreVector> judge);

} // namespace teamlab
