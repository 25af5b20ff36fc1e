// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <teamlab/datasets.hpp>
#include <teamlab/hier_delegation.hpp>
#include <teamlab/json_io.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace teamlab
{

/// Parses the TOML subset used by experiment configs: comments, bare keys,
/// [table] and [[array-of-tables]] headers, and single-line values that are
/// basic strings, integers, floats, booleans or arrays of those.
/// Throws ConfigError with the offending line number.
[[nodiscard]] Json parse_toml(std::string_view text);

struct BackendSettings
{
    /// "scripted" or "http".
    std::string kind = "scripted";
    std::filesystem::path script;
    std::string endpoint_url;
    std::string path = "/v1/chat/completions";
    /// Each model multiplies the cell grid.
    std::vector<std::string> models { "mock" };
    std::optional<double> temperature;
    std::optional<int> max_tokens;
    int max_in_flight = 8;
};

struct JudgeSettings
{
    bool enabled = false;
    std::string model_name = "gpt-4o";
    double temperature = 0.7;
    std::filesystem::path calibration;
    std::size_t calibration_size = 12;
    std::size_t sample = 2500;
    /// Separate judge backend; the task backend is used when absent.
    std::optional<BackendSettings> backend;
};

struct DatasetSettings
{
    DatasetId dataset = DatasetId::CS;
    std::string split;
    std::filesystem::path path;
    Sampling sampling;
};

struct TeamGrid
{
    std::vector<int> flat_sizes;
    std::vector<HierShape> hier_shapes;
    std::vector<int> rounds;
};

struct DiversitySettings
{
    bool stratified = false;
    /// Persona teams per setting, split evenly over the three strata.
    int k = 15;
};

struct ExperimentConfig
{
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = "runs/out";
    int repeats = 1;
    bool probes = false;
    double question_timeout_s = 120.0;
    BackendSettings backend;
    JudgeSettings judge;
    std::vector<DatasetSettings> datasets;
    TeamGrid teams;
    DiversitySettings diversity;
};

/// Relative paths resolve against `base_dir`. Throws ConfigError on
/// unknown keys, wrong types or out-of-range values, and InvalidGrid when
/// the team grid is empty.
[[nodiscard]] ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

/// Semantic checks shared by parse_config and programmatic callers.
void validate(const ExperimentConfig& cfg);

/// Canonical JSON echo of a config, stored with each run.
[[nodiscard]] Json to_json(const ExperimentConfig& cfg);

} // namespace teamlab
