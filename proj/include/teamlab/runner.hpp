// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <teamlab/backend.hpp>
#include <teamlab/config.hpp>
#include <teamlab/persona.hpp>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace teamlab
{

/// One experimental condition: dataset x model x structure x size x rounds
/// x persona team (or the no-persona baseline).
struct Cell
{
    std::string id;
    std::size_t dataset_index = 0;
    DatasetId dataset = DatasetId::CS;
    std::string model;
    TeamStructure structure = TeamStructure::Flat;
    /// Total agents, leader and managers included.
    int team_size = 3;
    std::optional<HierShape> shape;
    int rounds = 2;
    /// e.g. "flat-n3-r2" or "hier-L1-r2"; shared by a baseline and its persona cells.
    std::string setting;
    std::optional<int> team_index;
    std::optional<TeamSample> team;
    /// The matched no-persona cell; equals `id` for baselines.
    std::string baseline_id;

    [[nodiscard]] bool diverse() const noexcept { return team.has_value(); }
};

/// Datasets, then models, then flat sizes x rounds, then hierarchy shapes x
/// rounds; each setting yields its baseline followed by its persona cells.
/// Persona teams depend only on (seed, team size), so every dataset and
/// model sees the same teams.
[[nodiscard]] std::vector<Cell> expand_matrix(const ExperimentConfig& cfg);

/// structure|diversity|model|dataset, the judge sampling stratum.
[[nodiscard]] std::string judge_cell_key(const Cell& c);

Json to_json(const Cell& c);

/// Characters outside [A-Za-z0-9._-] become '_'.
[[nodiscard]] std::string path_safe(std::string_view s);

[[nodiscard]] std::unique_ptr<Backend> make_backend(const BackendSettings& settings);

struct RunOptions
{
    bool resume = false;
};

struct CellResult
{
    std::string cell_id;
    std::size_t attempted = 0;
    std::size_t correct = 0;
    std::size_t abstained = 0;
    std::size_t timeouts = 0;
    std::size_t failed = 0;
    bool complete = true;
};

struct RunSummary
{
    std::vector<CellResult> cells;
    std::size_t failed_questions = 0;
    std::size_t judged = 0;
    std::size_t judge_failures = 0;

    [[nodiscard]] bool partial() const noexcept { return failed_questions > 0 || judge_failures > 0; }
};

/// Runs every cell, appending one JSONL record per (question, repeat) to
/// <out>/cells/<cell>/transcripts.jsonl in question order, then writes
/// cells.jsonl, summary.json and (judge on) judge.jsonl. Timestamps go to
/// metadata.json only.
///
/// A backend failure fails just that question; it is not recorded and the
/// cell is marked incomplete. A question exceeding the timeout is recorded
/// as an abstention with status "timeout".
///
/// Without `resume`, an output directory that already holds records is a
/// ConfigError. With it, recorded pairs are skipped and a torn final line
/// is cut off.
RunSummary run(const ExperimentConfig& cfg, Backend& backend, Backend* judge_backend, const RunOptions& opts = {});

struct JudgeOutcome
{
    std::size_t judged = 0;
    std::size_t failures = 0;
};

/// Samples recorded transcripts and rewrites <out>/judge.jsonl.
JudgeOutcome run_judge(const ExperimentConfig& cfg, Backend& judge_backend);

/// Pre-task probes only, one interview per agent per cell, written to
/// <out>/cells/<cell>/probes.jsonl.
void run_probe_only(const ExperimentConfig& cfg, Backend& backend);

struct StoredRecord
{
    std::string cell_id;
    std::string question_id;
    int repeat = 0;
    Transcript transcript;
};

[[nodiscard]] std::filesystem::path cell_dir(const std::filesystem::path& out, const std::string& cell_id);

/// Every well-formed record of a cell's transcripts file.
[[nodiscard]] std::vector<StoredRecord> read_cell_records(const std::filesystem::path& out, const std::string& cell_id);

/// "<cell>#<question>#<repeat>"
[[nodiscard]] std::string transcript_key(const std::string& cell_id, const std::string& question_id, int repeat);

} // namespace teamlab
